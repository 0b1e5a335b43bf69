#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "ciph/bytes.hpp"

namespace ciph {

/// Deterministic PRNG (xoshiro256++ seeded via splitmix64). Integer paths use
/// only integer arithmetic and the floating paths use only IEEE-exact
/// operations, so identical seeds produce identical streams on any platform.
/// Not cryptographic; secrets come from RandomSource implementations instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    explicit Rng(std::span<const std::uint8_t> seed_bytes);

    /// Independent substream addressed by (seed, label, a, b). Streams with
    /// distinct addresses never overlap regardless of draw order.
    static Rng derive(std::uint64_t seed, std::string_view label, std::uint64_t a = 0,
                      std::uint64_t b = 0);

    std::uint64_t next();

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform();

    /// Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Standard normal approximation (Irwin-Hall, 12 uniforms). Bounded to
    /// [-6, 6]; uses additions only, so results are platform-exact.
    double normal();

    void fill(std::span<std::uint8_t> out);

private:
    std::uint64_t state_[4];
};

/// Source of randomness for salts, nonces, challenges and session ids.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;
    Bytes bytes(std::size_t n);
};

/// OS-backed randomness for live deployments.
class OsRandom final : public RandomSource {
public:
    void fill(std::span<std::uint8_t> out) override;
};

/// Seeded randomness for simulation and reproducible tests.
class SeededRandom final : public RandomSource {
public:
    explicit SeededRandom(std::uint64_t seed) : rng_(seed) {}
    explicit SeededRandom(Rng rng) : rng_(rng) {}
    void fill(std::span<std::uint8_t> out) override { rng_.fill(out); }

private:
    Rng rng_;
};

}  // namespace ciph
