#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace jsmooth {

/// Seeded generator with platform-independent derived distributions.
/// std::uniform_real_distribution is implementation-defined, so uniform
/// doubles and bounded integers are derived from the raw 64-bit stream here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), rejection sampled.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller on the uniform stream.
    double normal();

    /// Fisher-Yates permutation of 0..n-1.
    std::vector<Eigen::Index> permutation(Eigen::Index n);

    /// k distinct indices out of n, sorted ascending.
    std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, Eigen::Index k);

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace jsmooth
