#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "ciph/bytes.hpp"
#include "ciph/canonical.hpp"
#include "ciph/crypto.hpp"

namespace ciph {

inline constexpr std::string_view kDidMethod = "ciph";
inline constexpr std::string_view kSignatureScheme = "ed25519";
inline constexpr std::size_t kDidIdentifierHexChars = 32;
inline constexpr std::size_t kCredentialIdBytes = 16;

/// Self-certifying decentralized identifier. The identifier is the first
/// 32 hex chars of SHA-256 over the public key, so the binding between a DID
/// and its key can be checked without any registry.
struct Did {
    std::string method = std::string(kDidMethod);
    std::string identifier;  // 32 lowercase hex chars

    static Did from_public_key(std::span<const std::uint8_t> public_key,
                               std::string_view method = kDidMethod);
    static std::optional<Did> parse(std::string_view text);

    std::string str() const;
    bool matches_key(std::span<const std::uint8_t> public_key) const;

    bool operator==(const Did&) const = default;
    auto operator<=>(const Did&) const = default;
};

struct KeyPair {
    Bytes public_key;   // 32-byte verification key
    Bytes private_seed; // signing key material; never serialized on any wire

    Bytes sign(std::span<const std::uint8_t> msg) const;
};

struct Credential {
    Bytes credential_id;  // 16 bytes
    Did subject_did;
    Did issuer_did;
    std::map<std::string, std::string> attributes;  // non-biometric claims only
    std::string metadata_cid;                       // "sha256:<64 hex>"
    std::int64_t issued_at = 0;                     // unix ms
    std::string scheme = std::string(kSignatureScheme);
    Bytes signature;  // issuer signature over the canonical signing document

    /// Canonical document covered by the signature (everything but the
    /// signature itself).
    Json signing_document() const;

    Json to_json() const;
    static Credential from_json(const Json& j);  // throws InvalidCredential
};

/// Deterministic: equal seeds yield equal DIDs and key pairs.
std::pair<Did, KeyPair> generate_identity(std::span<const std::uint8_t> seed32);

/// Throws PrivacyViolation when a key smells like biometric material
/// ("embedding", "template"), case-insensitive.
void check_attribute_privacy(const std::map<std::string, std::string>& attributes);

/// Credential ids are a pure function of (issuer, subject, now, counter), so
/// a metadata document can reference the id before the credential is signed.
Bytes derive_credential_id(const Did& issuer, const Did& subject, std::int64_t now_ms,
                           std::uint64_t counter);

Credential issue_credential(const Did& subject, const Did& issuer, const KeyPair& issuer_keys,
                            std::map<std::string, std::string> attributes,
                            std::string metadata_cid, std::int64_t now_ms, std::uint64_t counter);

/// True iff the signature verifies over the canonical signing document.
/// Returns false (never throws) on malformed input.
bool verify_credential(const Credential& cred, std::span<const std::uint8_t> issuer_public_key);

/// Convenience wrapper holding an issuer identity and its issuance counter.
class Issuer {
public:
    Issuer(Did did, KeyPair keys) : did_(std::move(did)), keys_(std::move(keys)) {}

    const Did& did() const { return did_; }
    const KeyPair& keys() const { return keys_; }

    Credential issue(const Did& subject, std::map<std::string, std::string> attributes,
                     std::string metadata_cid, std::int64_t now_ms) {
        return issue_credential(subject, did_, keys_, std::move(attributes),
                                std::move(metadata_cid), now_ms, counter_++);
    }

    /// Reserves the next issuance counter so the caller can pre-compute the
    /// credential id.
    std::uint64_t allocate_counter() { return counter_++; }

    Credential issue_with_counter(const Did& subject,
                                  std::map<std::string, std::string> attributes,
                                  std::string metadata_cid, std::int64_t now_ms,
                                  std::uint64_t counter) const {
        return issue_credential(subject, did_, keys_, std::move(attributes),
                                std::move(metadata_cid), now_ms, counter);
    }

private:
    Did did_;
    KeyPair keys_;
    std::atomic<std::uint64_t> counter_{0};
};

}  // namespace ciph
