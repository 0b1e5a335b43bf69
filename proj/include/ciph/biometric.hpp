#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ciph/bytes.hpp"
#include "ciph/canonical.hpp"
#include "ciph/rng.hpp"

namespace ciph {

inline constexpr std::size_t kEmbeddingDim = 128;
/// Wire encoding: kEmbeddingDim signed 16-bit values, big-endian, scale 2^-14.
inline constexpr double kEmbeddingScale = 16384.0;
inline constexpr double kDefaultMatchThreshold = 0.8;
inline constexpr double kDefaultNoiseSigma = 0.05;

/// L2-normalized 128-dimensional template vector. Hashing and encryption
/// always go through wire(), whose fixed-point encoding is platform-exact;
/// the double components never touch a digest.
struct Embedding {
    std::vector<double> values;  // size kEmbeddingDim, unit norm

    Bytes wire() const;
    static Embedding from_wire(std::span<const std::uint8_t> bytes);  // throws DimensionMismatch
    Bytes wire_digest() const;                                        // SHA-256 of wire()
};

/// Left-to-right accumulation; callers rely on match(a,b) == match(b,a) bit
/// for bit.
double cosine(const Embedding& a, const Embedding& b);  // throws DimensionMismatch

/// Scales to unit L2 norm. Throws DimensionMismatch on wrong length or zero
/// norm.
Embedding normalize(std::vector<double> v);

struct IdentityProfile {
    Bytes profile_seed;  // 32 bytes
    Embedding mean;      // normalized, deterministic in profile_seed
};

IdentityProfile make_profile(std::span<const std::uint8_t> profile_seed32);

/// Draws a noisy sample around the profile mean and re-normalizes.
/// noise_sigma is the noise-to-signal ratio: per-component noise has standard
/// deviation noise_sigma / sqrt(D), i.e. noise_sigma relative to the RMS
/// component magnitude of the unit-norm mean. Deterministic given both seeds.
Embedding sample_embedding(const IdentityProfile& profile, double noise_sigma,
                           std::uint64_t sample_seed);

struct MatchResult {
    double score = 0.0;  // cosine similarity in [-1, 1]
    bool accepted = false;
    double threshold = kDefaultMatchThreshold;
};

MatchResult match(const Embedding& a, const Embedding& b,
                  double threshold = kDefaultMatchThreshold);

/// Encrypted-at-rest template: AES-256-GCM over the wire encoding plus a
/// SHA-256 digest of the plaintext wire bytes. Holds no matchable values; no
/// API accepts a ProtectedTemplate where an Embedding is required.
struct ProtectedTemplate {
    std::string key_id;
    Bytes nonce;
    Bytes ciphertext;
    Bytes digest;

    Json to_json() const;
    static ProtectedTemplate from_json(const Json& j);
};

ProtectedTemplate protect_template(const Embedding& e, std::span<const std::uint8_t> key32,
                                   std::string key_id, RandomSource& random);

/// Throws AuthenticationFailure on wrong key or tampered ciphertext;
/// DigestMismatch if the ciphertext authenticates but the stored digest
/// disagrees (internal corruption).
Embedding recover_template(const ProtectedTemplate& t, std::span<const std::uint8_t> key32);

struct FrameDescriptor {
    bool replay = false;
};

/// Placeholder for a real presentation-attack detector; returns a configured
/// answer so the interface can be exercised end to end. In strict mode a
/// frame marked as a replay is rejected.
struct LivenessStub {
    bool stub_result = true;
    bool strict = false;

    bool check(const FrameDescriptor& frame) const {
        if (strict && frame.replay) return false;
        return stub_result;
    }
};

}  // namespace ciph
