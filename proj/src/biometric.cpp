#include "ciph/biometric.hpp"

#include <cmath>

#include "ciph/crypto.hpp"
#include "ciph/errors.hpp"

namespace ciph {

Bytes Embedding::wire() const {
    if (values.size() != kEmbeddingDim) throw DimensionMismatch("embedding has wrong dimension");
    Bytes out;
    out.reserve(kEmbeddingDim * 2);
    for (double v : values) {
        double scaled = std::floor(v * kEmbeddingScale + 0.5);
        if (scaled > 32767.0) scaled = 32767.0;
        if (scaled < -32767.0) scaled = -32767.0;
        auto q = static_cast<std::int16_t>(scaled);
        auto u = static_cast<std::uint16_t>(q);
        out.push_back(static_cast<std::uint8_t>(u >> 8));
        out.push_back(static_cast<std::uint8_t>(u & 0xff));
    }
    return out;
}

Embedding Embedding::from_wire(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kEmbeddingDim * 2) {
        throw DimensionMismatch("embedding wire encoding must be 256 bytes");
    }
    Embedding e;
    e.values.reserve(kEmbeddingDim);
    for (std::size_t i = 0; i < bytes.size(); i += 2) {
        auto u = static_cast<std::uint16_t>((bytes[i] << 8) | bytes[i + 1]);
        auto q = static_cast<std::int16_t>(u);
        e.values.push_back(static_cast<double>(q) / kEmbeddingScale);
    }
    return e;
}

Bytes Embedding::wire_digest() const { return crypto::sha256(wire()); }

double cosine(const Embedding& a, const Embedding& b) {
    if (a.values.size() != b.values.size()) {
        throw DimensionMismatch("embedding dimensions differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * b.values[i];
    return acc;
}

Embedding normalize(std::vector<double> v) {
    if (v.size() != kEmbeddingDim) throw DimensionMismatch("embedding has wrong dimension");
    double sum_sq = 0.0;
    for (double x : v) sum_sq += x * x;
    if (sum_sq == 0.0) throw DimensionMismatch("cannot normalize the zero vector");
    double inv = 1.0 / std::sqrt(sum_sq);
    for (double& x : v) x *= inv;
    return Embedding{std::move(v)};
}

IdentityProfile make_profile(std::span<const std::uint8_t> profile_seed32) {
    Rng rng(profile_seed32);
    std::vector<double> v(kEmbeddingDim);
    for (double& x : v) x = rng.normal();
    IdentityProfile profile;
    profile.profile_seed.assign(profile_seed32.begin(), profile_seed32.end());
    profile.mean = normalize(std::move(v));
    return profile;
}

Embedding sample_embedding(const IdentityProfile& profile, double noise_sigma,
                           std::uint64_t sample_seed) {
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
    Rng seed_rng(profile.profile_seed);
    Rng rng = Rng::derive(seed_rng.next(), "sample", sample_seed);
    double per_component = noise_sigma / std::sqrt(static_cast<double>(kEmbeddingDim));
    std::vector<double> v(kEmbeddingDim);
    for (std::size_t i = 0; i < kEmbeddingDim; ++i) {
        v[i] = profile.mean.values[i] + per_component * rng.normal();
    }
    return normalize(std::move(v));
}

MatchResult match(const Embedding& a, const Embedding& b, double threshold) {
    double score = cosine(a, b);
    return MatchResult{score, score >= threshold, threshold};
}

Json ProtectedTemplate::to_json() const {
    return Json{
        {"ciphertext", to_hex(ciphertext)},
        {"digest", to_hex(digest)},
        {"key_id", key_id},
        {"nonce", to_hex(nonce)},
    };
}

ProtectedTemplate ProtectedTemplate::from_json(const Json& j) {
    ProtectedTemplate t;
    t.key_id = j.at("key_id").get<std::string>();
    auto nonce = from_hex(j.at("nonce").get<std::string>());
    auto ct = from_hex(j.at("ciphertext").get<std::string>());
    auto digest = from_hex(j.at("digest").get<std::string>());
    if (!nonce || !ct || !digest) throw Error("malformed protected template");
    t.nonce = std::move(*nonce);
    t.ciphertext = std::move(*ct);
    t.digest = std::move(*digest);
    return t;
}

ProtectedTemplate protect_template(const Embedding& e, std::span<const std::uint8_t> key32,
                                   std::string key_id, RandomSource& random) {
    Bytes wire = e.wire();
    Bytes nonce = random.bytes(crypto::kAeadNonceBytes);
    crypto::Sealed sealed = crypto::aes256gcm_seal(key32, nonce, wire);
    ProtectedTemplate t;
    t.key_id = std::move(key_id);
    t.nonce = std::move(sealed.nonce);
    t.ciphertext = std::move(sealed.ciphertext);
    t.digest = crypto::sha256(wire);
    return t;
}

Embedding recover_template(const ProtectedTemplate& t, std::span<const std::uint8_t> key32) {
    Bytes wire = crypto::aes256gcm_open(key32, t.nonce, t.ciphertext);
    if (crypto::sha256(wire) != t.digest) {
        throw DigestMismatch("recovered template digest disagrees with stored digest");
    }
    return Embedding::from_wire(wire);
}

}  // namespace ciph
