#include <doctest.h>

#include <cmath>

#include "heatctl/brownian.hpp"
#include "heatctl/errors.hpp"

using namespace heatctl;

TEST_CASE("identical seeds reproduce identical increments") {
  const BrownianPath a = brownian_path(42, 1e-3, 5000);
  const BrownianPath b = brownian_path(42, 1e-3, 5000);
  REQUIRE(a.increments.size() == 5000);
  CHECK(std::equal(a.increments.begin(), a.increments.end(), b.increments.begin()));

  const BrownianPath c = brownian_path(43, 1e-3, 5000);
  CHECK(a.increments != c.increments);
}

TEST_CASE("empty path and bad dt") {
  CHECK(brownian_path(1, 0.1, 0).increments.empty());
  CHECK_THROWS_AS((void)brownian_path(1, 0.0, 10), ValidationError);
  CHECK_THROWS_AS((void)brownian_path(1, -1.0, 10), ValidationError);
}

TEST_CASE("increments carry the right first two moments") {
  const double dt = 1e-3;
  const std::size_t n = 1000000;
  const BrownianPath p = brownian_path(2718, dt, n);
  double sum = 0.0, sumsq = 0.0;
  for (double v : p.increments) {
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / double(n);
  const double var = sumsq / double(n) - mean * mean;
  CHECK(var >= 0.95e-3);
  CHECK(var <= 1.05e-3);
  // |mean of increments/sqrt(dt)| within 4 standard errors of zero
  CHECK(std::abs(mean / std::sqrt(dt)) <= 4.0 / std::sqrt(double(n)));
}

TEST_CASE("stream derivation separates paths") {
  const auto s0 = derive_stream_seed(1234, 0);
  const auto s1 = derive_stream_seed(1234, 1);
  const auto t0 = derive_stream_seed(1235, 0);
  CHECK(s0 != s1);
  CHECK(s0 != t0);
  const BrownianPath p0 = brownian_path(s0, 1e-3, 100);
  const BrownianPath p1 = brownian_path(s1, 1e-3, 100);
  CHECK(p0.increments != p1.increments);
}

TEST_CASE("coarsening sums adjacent increments") {
  const BrownianPath p = brownian_path(7, 1e-3, 10);
  const BrownianPath c = p.coarsened();
  REQUIRE(c.increments.size() == 5);
  CHECK(c.dt == doctest::Approx(2e-3));
  for (int i = 0; i < 5; ++i)
    CHECK(c.increments[i] == p.increments[2 * i] + p.increments[2 * i + 1]);
}
