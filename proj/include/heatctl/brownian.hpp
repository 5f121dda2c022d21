#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace heatctl {

/// Seeded Wiener increments; the same (seed, dt, count) always reproduces
/// the same array, so coupled simulations can share one noise realization.
struct BrownianPath {
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::vector<double> increments;  ///< N(0, dt) samples

  /// Pairwise sums: the same Brownian path sampled at 2*dt.
  BrownianPath coarsened() const;
};

/// Stream seed for path `index` of an ensemble keyed by `master_seed`
/// (splitmix64 mixing; distinct indices give decorrelated streams).
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index);

/// Deterministic standard normals: mt19937_64 + Box-Muller. Avoids the
/// implementation-defined std::normal_distribution so streams are
/// reproducible across standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}
  double next();

 private:
  std::mt19937_64 gen_;
};

BrownianPath brownian_path(std::uint64_t seed, double dt, std::size_t steps);

}  // namespace heatctl
