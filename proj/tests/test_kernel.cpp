#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "heatctl/kernel.hpp"

using namespace heatctl;

namespace {
constexpr double kPi = std::numbers::pi;

double max_bessel_error(const Kernel& k, double coeff) {
  const int n = k.grid.n();
  const double h = k.grid.h();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      worst = std::max(worst, std::abs(k.grid(i, j) - bessel_kernel_value(coeff, i * h, j * h)));
  return worst;
}
}  // namespace

TEST_CASE("homogeneous problem has the zero kernel") {
  const Kernel k = solve_kernel(0.0, 0.0, 101);
  double mx = 0.0;
  for (double v : k.grid.values()) mx = std::max(mx, std::abs(v));
  CHECK(mx <= 1e-15);
  CHECK(k.k11 == 0.0);
}

TEST_CASE("diagonal trace is the closed-form boundary row") {
  // k(1,1) = -1/2 int a - c/2 for constant a
  const double a = 4.0 * kPi * kPi + 1.005;
  const Kernel k = solve_kernel(a, 1.02, 51);
  CHECK(k.k11 == doctest::Approx(-(a + 1.02) / 2.0).epsilon(1e-9));
  CHECK(std::abs(k.k11 - (-20.7517)) < 1e-4);

  // exact (to rounding) against the trapezoid of the samples, also for
  // varying coefficients
  const int n = 41;
  std::vector<double> av(n);
  for (int i = 0; i < n; ++i) av[i] = std::sin(3.0 * i / double(n - 1)) + 2.0;
  const Kernel kv = solve_kernel(av, 0.7, n);
  const double h = 1.0 / (n - 1);
  double cum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i > 0) cum += 0.5 * h * (av[i - 1] + av[i]);
    const double expected = -0.5 * cum - 0.35 * i * h;
    CHECK(std::abs(kv.diag_trace[i] - expected) <= 1e-12);
  }
}

TEST_CASE("bessel closed form") {
  // series limit at the diagonal: -c x / 2
  CHECK(bessel_kernel_value(2.5, 0.8, 0.8) == doctest::Approx(-2.5 * 0.8 / 2.0).epsilon(1e-14));
  // -I1(1) by direct series summation
  CHECK(bessel_kernel_value(1.0, 1.0, 0.0) == doctest::Approx(-0.5651591039924851).epsilon(1e-10));
  // the whole expression carries a factor c
  CHECK(bessel_kernel_value(0.0, 0.7, 0.3) == 0.0);
  CHECK_THROWS_AS((void)bessel_kernel_value(1.0, 0.3, 0.7), ValidationError);
  CHECK_THROWS_AS((void)bessel_kernel_value(1.0, 1.3, 0.0), ValidationError);
}

TEST_CASE("solver agrees with the Bessel oracle and converges at second order") {
  const Kernel k201 = solve_kernel(0.0, 1.02, 201);
  const double e201 = max_bessel_error(k201, 1.02);
  CHECK(e201 <= 1e-4);
  CHECK(std::abs(k201.grid(200, 0) - (-0.56516 * 1.02 / 1.0)) < 1.0);  // sanity scale

  const Kernel k101 = solve_kernel(0.0, 1.02, 101);
  const double e101 = max_bessel_error(k101, 1.02);
  CHECK(e101 / e201 >= 3.0);

  // spec'd point value for c = 1
  const Kernel kc1 = solve_kernel(0.0, 1.0, 201);
  CHECK(std::abs(kc1.grid(200, 0) - (-0.56516)) <= 1e-4);
}

TEST_CASE("constant-coefficient case reduces to the shifted Bessel kernel") {
  const double a = 4.0 * kPi * kPi + 1.005;
  const Kernel k = solve_kernel(a, 1.02, 65);
  const double err = max_bessel_error(k, a + 1.02);
  double mx = 0.0;
  for (double v : k.grid.values()) mx = std::max(mx, std::abs(v));
  CHECK(err / mx <= 5e-3);  // second-order at n=65 with the stiff coefficient
}

TEST_CASE("neumann edge of the kernel vanishes discretely") {
  const int n = 101;
  const Kernel k = solve_kernel(0.0, 1.0, n);
  const double h = k.grid.h();
  double worst = 0.0;
  for (int i = 2; i < n; ++i) {
    const double kz = (-3.0 * k.grid(i, 0) + 4.0 * k.grid(i, 1) - k.grid(i, 2)) / (2.0 * h);
    worst = std::max(worst, std::abs(kz));
  }
  CHECK(worst <= 1.0 * h);
}

TEST_CASE("interior residual shrinks under refinement") {
  const Kernel k101 = solve_kernel(0.0, 1.5, 101);
  const Kernel k201 = solve_kernel(0.0, 1.5, 201);
  const double r101 = kernel_interior_residual(k101);
  const double r201 = kernel_interior_residual(k201);
  CHECK(r201 < r101);
  CHECK(r101 / r201 >= 1.5);
}

TEST_CASE("kx1 trace converges between n and 2n-1 grids") {
  const double a = 4.0 * kPi * kPi + 1.005;
  const Kernel kc = solve_kernel(a, 1.02, 65);
  const Kernel kf = solve_kernel(a, 1.02, 129);
  const Kernel kff = solve_kernel(a, 1.02, 257);
  double d1 = 0.0, d2 = 0.0;
  for (int j = 0; j < 65; ++j) d1 = std::max(d1, std::abs(kc.kx1_trace[j] - kf.kx1_trace[2 * j]));
  for (int j = 0; j < 129; ++j) d2 = std::max(d2, std::abs(kf.kx1_trace[j] - kff.kx1_trace[2 * j]));
  CHECK(d2 < d1);
  CHECK(d1 / d2 >= 1.5);
}

TEST_CASE("solver input validation") {
  CHECK_THROWS_AS((void)solve_kernel(0.0, 1.0, 2), ValidationError);
  std::vector<double> bad(11, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS((void)solve_kernel(bad, 1.0, 11), ValidationError);
  std::vector<double> wrong(7, 0.0);
  CHECK_THROWS_AS((void)solve_kernel(wrong, 1.0, 11), ValidationError);
}

TEST_CASE("iteration cap signals pathological coefficients") {
  CHECK_THROWS_AS((void)solve_kernel(1e5, 1.0, 21), std::runtime_error);
}

TEST_CASE("kernel csv cache round trip") {
  const Kernel k = solve_kernel(2.0, 1.3, 33);
  const auto path = std::filesystem::temp_directory_path() / "heatctl_kernel_test.csv";
  save_kernel_csv(k, path);
  const Kernel r = load_kernel_csv(path);
  std::filesystem::remove(path);
  REQUIRE(r.grid.n() == k.grid.n());
  CHECK(r.c == k.c);
  CHECK(r.a_samples == k.a_samples);
  for (int i = 0; i < k.grid.n(); ++i)
    for (int j = 0; j <= i; ++j) CHECK(r.grid(i, j) == k.grid(i, j));
  CHECK(r.k11 == k.k11);
  for (int j = 0; j < k.grid.n(); ++j) CHECK(r.kx1_trace[j] == k.kx1_trace[j]);
}

TEST_CASE("triangular addressing is enforced") {
  TriGrid g(5);
  CHECK_THROWS_AS((void)g(1, 2), ValidationError);
  CHECK_THROWS_AS((void)g(5, 0), ValidationError);
  g.at(3, 2) = 1.5;
  CHECK(g(3, 2) == 1.5);
  CHECK(g.h() == doctest::Approx(0.25));
}
