#include "heatctl/brownian.hpp"

#include <cmath>
#include <numbers>

#include "heatctl/errors.hpp"

namespace heatctl {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

double GaussianStream::next() {
  // 53-bit uniforms; u1 shifted into (0,1] so the log is finite.
  const double u1 = 1.0 - double(gen_() >> 11) * 0x1.0p-53;
  const double u2 = double(gen_() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

BrownianPath brownian_path(std::uint64_t seed, double dt, std::size_t steps) {
  if (!(dt > 0.0)) throw ValidationError("brownian_path: dt must be positive");
  BrownianPath p;
  p.seed = seed;
  p.dt = dt;
  p.increments.resize(steps);
  GaussianStream g(seed);
  const double s = std::sqrt(dt);
  for (std::size_t k = 0; k < steps; ++k) p.increments[k] = s * g.next();
  return p;
}

BrownianPath BrownianPath::coarsened() const {
  BrownianPath c;
  c.seed = seed;
  c.dt = 2.0 * dt;
  c.increments.resize(increments.size() / 2);
  for (std::size_t k = 0; k < c.increments.size(); ++k)
    c.increments[k] = increments[2 * k] + increments[2 * k + 1];
  return c;
}

}  // namespace heatctl
