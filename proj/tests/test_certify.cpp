#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "heatctl/brownian.hpp"
#include "heatctl/certify.hpp"
#include "heatctl/errors.hpp"

using namespace heatctl;

namespace {
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

PlantSpec section4_spec(double sigma = 0.1) {
  PlantSpec ps;
  ps.c = 1.02;
  ps.sigma = sigma;
  ps.A = Matrix{{0.0, 2.0}, {-2.0, 0.0}};
  ps.C = RowVector{{1.0, 0.0}};
  ps.L = Vector{{-5.0, -1.0}};
  return ps;
}

Matrix printed_Qc() {
  return Matrix{{0.0134, 0.0041, 0.0041}, {0.0041, 0.1667, 0.1667}, {0.0041, 0.1667, 0.6667}};
}
}  // namespace

TEST_CASE("coupled drift assembly") {
  const PlantSpec ps = section4_spec();
  const Matrix M = build_M(ps.c, ps.A, ps.L, ps.C);
  REQUIRE(M.rows() == 3);
  CHECK(std::abs(M(0, 0) - (-10.8896)) <= 1e-4);
  CHECK(M(0, 1) == 1.0);
  CHECK(M(0, 2) == 0.0);
  CHECK(M(1, 0) == 0.0);
  // lower-right block [[-5,2],[-3,0]] with eigenvalues {-2,-3}
  CHECK(M(1, 1) == -5.0);
  CHECK(M(1, 2) == 2.0);
  CHECK(M(2, 1) == -3.0);
  CHECK(M(2, 2) == 0.0);
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(M.block(1, 1, 2, 2)).eigenvalues();
  std::vector<double> re{ev(0).real(), ev(1).real()};
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(re[1] == doctest::Approx(-2.0).epsilon(1e-12));

  // empty exogenous block degenerates to the scalar
  const Matrix M0 = build_M(1.02, Matrix(0, 0), Vector(0), RowVector(0));
  REQUIRE(M0.rows() == 1);
  CHECK(M0(0, 0) == doctest::Approx(-(1.02 + kPi2)).epsilon(1e-15));

  Matrix badA(2, 1);
  CHECK_THROWS_AS((void)build_M(1.0, badA, Vector(2), RowVector(2)), ValidationError);
}

TEST_CASE("lyapunov ground truth fixes the decoupled corner entry") {
  const PlantSpec ps = section4_spec();
  const Matrix M = build_M(ps.c, ps.A, ps.L, ps.C);
  const Matrix Q = lyapunov_solve(M);
  CHECK(lyapunov_residual(M, Q) <= 1e-10);
  CHECK(std::abs(Q(0, 0) - 1.0 / (2.0 * (1.02 + kPi2))) <= 1e-9);
}

TEST_CASE("corner entry is forced for any certifiable gain draw") {
  GaussianStream g(5);
  for (int trial = 0; trial < 8; ++trial) {
    const double c = 1.1 + std::abs(g.next());
    const double l1 = -0.5 - std::abs(g.next());
    const double l2 = 1.9 - std::abs(g.next());
    PlantSpec ps = section4_spec(0.0);
    ps.c = c;
    ps.L = Vector{{l1, l2}};
    const GainCertificate cert = certify_gains(ps);
    CHECK(std::abs(cert.Q(0, 0) - 1.0 / (2.0 * (c + kPi2))) <= 1e-10);
    CHECK(cert.theta_star > 0.0);
  }
}

TEST_CASE("printed reference matrix reproduces the published constants") {
  // the printed Q_c is internally consistent with mu_c = 6.464 and
  // lambda_max = 0.7172 even though it does not solve the equation itself
  // (see ERRATA.md)
  const Vector L{{-5.0, -1.0}};
  const double mu = mu_from_Q(printed_Qc(), L);
  CHECK(std::abs(mu - 6.464) <= 0.005);
  const auto [lmin, lmax] = symmetric_eig_range(printed_Qc());
  CHECK(std::abs(lmax - 0.7172) <= 0.0005);
  CHECK(lmin > 0.0);
}

TEST_CASE("mu_from_Q trivial and error cases") {
  CHECK(mu_from_Q(Matrix::Identity(3, 3), Vector::Zero(2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS((void)mu_from_Q(Matrix::Identity(3, 3), Vector::Zero(3)), ValidationError);
  CHECK_THROWS_AS((void)mu_from_Q(-Matrix::Identity(3, 3), Vector::Zero(2)), ValidationError);
}

TEST_CASE("closed-form n=2 diagnostic") {
  CHECK(std::abs(mu_n2_lambda_star(1.02, -5.0, -1.0) - (-175.03)) <= 0.01);
  // value confirmed by independent term-by-term evaluation
  CHECK(std::abs(mu_closed_form_n2(1.02, -5.0, -1.0) - 8.9381) <= 0.005);
  CHECK_THROWS_AS((void)mu_closed_form_n2(1.02, 0.0, -1.0), ValidationError);
  CHECK_THROWS_AS((void)mu_closed_form_n2(1.02, -5.0, 2.0), ValidationError);

  // tolerance grows along the ray l1 = l2 = -1/c as c increases
  double prev = std::numeric_limits<double>::infinity();
  for (double c : {1e2, 1e3, 1e4}) {
    const double mu = mu_closed_form_n2(c, -1.0 / c, -1.0 / c);
    CHECK(mu > 0.0);
    CHECK(mu < prev);
    prev = mu;
  }
}

TEST_CASE("noise tolerance is nondecreasing along the remark ray") {
  double prev = 0.0;
  for (double c : {1e2, 1e3, 1e4}) {
    PlantSpec ps = section4_spec(0.0);
    ps.c = c;
    ps.L = Vector{{-1.0 / c, -1.0 / c}};
    const GainCertificate cert = certify_gains(ps);
    CHECK(cert.sigma_max >= prev);
    prev = cert.sigma_max;
  }
}

TEST_CASE("section4 preset certificate") {
  const GainCertificate cert = certify_gains(section4_spec());
  CHECK(std::abs(cert.sigma_max - 0.11547) <= 1e-5);
  CHECK(std::abs(cert.theta_star - 0.01) <= 1e-6);
  CHECK(cert.rate_Ze > cert.theta_star);
  CHECK_FALSE(cert.degenerate_branch);
  CHECK(cert.mu_c > 0.0);

  // noise beyond tolerance fails closed
  CHECK_THROWS_AS((void)certify_gains(section4_spec(0.2)), CertificationError);
  CHECK_THROWS_AS((void)certify_gains(section4_spec(0.11547005383793)), CertificationError);

  // sigma = 0 always passes the noise check when c > 1
  const GainCertificate c0 = certify_gains(section4_spec(0.0));
  CHECK(c0.rate_Ze == doctest::Approx(1.0 / c0.lambda_max).epsilon(1e-12));
}

TEST_CASE("structural hypotheses") {
  {
    PlantSpec ps = section4_spec();
    ps.c = 0.9;
    CHECK_THROWS_AS((void)certify_gains(ps), CertificationError);
  }
  {
    PlantSpec ps = section4_spec();
    ps.C = RowVector{{0.0, 0.0}};  // unobservable
    CHECK_THROWS_AS((void)certify_gains(ps), CertificationError);
  }
  {
    PlantSpec ps = section4_spec();
    ps.L = Vector{{5.0, 1.0}};  // A + LC not Hurwitz
    CHECK_THROWS_AS((void)certify_gains(ps), CertificationError);
  }
  CHECK_THROWS_AS((void)certify_gains(section4_spec(), 1.5), ValidationError);
}

TEST_CASE("gamma constants") {
  const GainCertificate cert = certify_gains(section4_spec());

  // zero initial data gives a zero closed-loop amplitude
  const GammaConstants z = gamma_constants(cert, 0.0, 0.0, 0.0, 0.0);
  CHECK(z.gamma_star == doctest::Approx(0.0).scale(1));

  // sigma = 0 keeps only the deterministic branch of Gamma_1
  const GainCertificate c0 = certify_gains(section4_spec(0.0));
  const GammaConstants g0 = gamma_constants(c0, 1.0, 1.0, 1.0, 0.0);
  const PlantSpec& s = c0.spec;
  const double expected =
      std::pow(1.0 + s.c / 2.0, 2) * s.C.squaredNorm() +
      0.25 * (s.C * (s.A + s.L * s.C)).squaredNorm();
  CHECK(g0.gamma1 == doctest::Approx(expected).epsilon(1e-14));

  // the reference scenario produces a finite positive amplitude
  const GammaConstants g = gamma_constants(cert, 0.056, 1.0, 0.5, 430.0);
  CHECK(g.gamma_star > 0.0);
  CHECK(std::isfinite(g.gamma_star));

  CHECK_THROWS_AS((void)gamma_constants(cert, -1.0, 0.0, 0.0, 0.0), ValidationError);
}
