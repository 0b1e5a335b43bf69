#include "ciph/rng.hpp"

#include <openssl/rand.h>

#include <cstring>

#include "ciph/crypto.hpp"
#include "ciph/errors.hpp"

namespace ciph {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
}

Rng::Rng(std::span<const std::uint8_t> seed_bytes) {
    // Fold arbitrary-length seed material into one 64-bit word, then expand.
    std::uint64_t s = 0x6a09e667f3bcc908ULL;
    for (std::size_t i = 0; i < seed_bytes.size(); ++i) {
        s ^= static_cast<std::uint64_t>(seed_bytes[i]) << ((i % 8) * 8);
        if (i % 8 == 7) s = splitmix64(s);
    }
    s = splitmix64(s);
    for (auto& word : state_) word = splitmix64(s);
}

Rng Rng::derive(std::uint64_t seed, std::string_view label, std::uint64_t a, std::uint64_t b) {
    Bytes material;
    material.reserve(24 + label.size());
    for (std::uint64_t v : {seed, a, b}) {
        for (int i = 0; i < 8; ++i) material.push_back(static_cast<std::uint8_t>(v >> (i * 8)));
    }
    material.insert(material.end(), label.begin(), label.end());
    Bytes digest = crypto::sha256(material);
    std::uint64_t s = 0;
    std::memcpy(&s, digest.data(), sizeof(s));
    return Rng(s);
}

std::uint64_t Rng::next() {
    // xoshiro256++
    std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw ConfigError("uniform_int: lo > hi");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
    return lo + static_cast<std::int64_t>(next() % span);
}

double Rng::normal() {
    double sum = 0.0;
    for (int i = 0; i < 12; ++i) sum += uniform();
    return sum - 6.0;
}

void Rng::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t v = next();
        for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
            out[i] = static_cast<std::uint8_t>(v >> (k * 8));
        }
    }
}

Bytes RandomSource::bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
}

void OsRandom::fill(std::span<std::uint8_t> out) {
    if (out.empty()) return;
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
        throw IoFailure("OS random source failed");
    }
}

}  // namespace ciph
