#pragma once

#include <cstdint>
#include <string_view>

#include "grclust/mat.hpp"

namespace grclust {

// Deterministic generator (splitmix64 core). All randomness in the library
// flows through explicit seeds; distributions are hand-rolled so streams are
// bit-stable across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    // Standard normal via Box-Muller (fresh pair each call, one value used,
    // keeping the stream length independent of call parity).
    double normal(double mean = 0.0, double stddev = 1.0);

    // Independent stream derived from this seed and a label; initialization
    // order of model tensors then never affects their values.
    Rng fork(std::string_view label) const;

private:
    std::uint64_t state_;
};

// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)], the usual dense-layer
// default.
Mat init_fan_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

// Uniform init in [0, 1).
Mat init_unit_uniform(std::size_t rows, std::size_t cols, Rng& rng);

Mat init_normal(std::size_t rows, std::size_t cols, double stddev, Rng& rng);

} // namespace grclust
