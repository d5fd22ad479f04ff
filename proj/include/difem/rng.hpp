#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace difem {

// splitmix64 finaliser; maps (seed, stream) to an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// mt19937_64 with draws defined here rather than by <random>'s
// distributions, whose output differs between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform integer in [0, n). n must be > 0.
    std::size_t below(std::size_t n);
    // Uniform double in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Standard normal via Box-Muller.
    double normal();
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace difem
