#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ciph {

/// Base class for every error this library raises. Verification outcomes are
/// never exceptions; only contract violations and operational failures are.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedValue : Error {
    using Error::Error;
};
struct PrivacyViolation : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct AuthenticationFailure : Error {
    using Error::Error;
};
struct DigestMismatch : Error {
    using Error::Error;
};
struct NotFound : Error {
    using Error::Error;
};
struct AlreadyRevoked : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct IoFailure : Error {
    using Error::Error;
};
struct RateLimited : Error {
    using Error::Error;
};
struct UnknownChallenge : Error {
    using Error::Error;
};
struct MatchRejected : Error {
    using Error::Error;
};
struct DeviceUntrusted : Error {
    using Error::Error;
};
struct InvalidCredential : Error {
    using Error::Error;
};

/// Raised by the device integrity gate; names every failed check.
struct AuthBlocked : Error {
    explicit AuthBlocked(std::vector<std::string> checks);
    std::vector<std::string> failed;
};

}  // namespace ciph
