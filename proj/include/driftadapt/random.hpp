#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace driftadapt {

/// Portable seeded generator. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; every derived draw is computed here
/// rather than through the implementation-defined <random> distributions, so
/// a seed yields the same data on every platform.
///
///  uniform01: top 53 bits of one engine output, scaled to [0, 1).
///  normal:    Box-Muller, cosine branch only; two uniforms per draw.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double normal(double mean = 0.0, double stddev = 1.0);
    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n);
    /// Index drawn with probabilities proportional to `weights`.
    std::size_t categorical(std::span<const double> weights);

  private:
    std::mt19937_64 engine_;
};

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

}  // namespace driftadapt
