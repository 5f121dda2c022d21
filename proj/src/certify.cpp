#include "heatctl/certify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "heatctl/config.hpp"
#include "heatctl/errors.hpp"

namespace heatctl {

namespace {
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
}

void PlantSpec::validate() const {
  const int n = exo_dim();
  if (A.cols() != n || C.cols() != n || L.rows() != n)
    throw ValidationError("PlantSpec: inconsistent exogenous dimensions");
  if (!(c > 1.0))
    throw CertificationError("PlantSpec: c must exceed 1 (sqrt(2(c-1)/3) must be real positive)");
  if (n > 0) {
    if (observability_rank(A, C) != n)
      throw CertificationError("PlantSpec: (A, C) is not observable");
    if (!is_hurwitz(A + L * C))
      throw CertificationError("PlantSpec: A + LC is not Hurwitz");
  }
}

Matrix build_M(double c, const Matrix& A, const Vector& L, const RowVector& C) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || C.cols() != n || L.rows() != n)
    throw ValidationError("build_M: dimension mismatch");
  Matrix M = Matrix::Zero(n + 1, n + 1);
  M(0, 0) = -(c + kPi2);
  if (n > 0) {
    M.block(0, 1, 1, n) = C;
    M.block(1, 1, n, n) = A + L * C;
  }
  return M;
}

double mu_from_Q(const Matrix& Q, const Vector& L) {
  const Eigen::Index n = L.rows();
  if (Q.rows() != n + 1 || Q.cols() != n + 1) throw ValidationError("mu_from_Q: size mismatch");
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
    if (es.eigenvalues().minCoeff() <= 0.0) throw ValidationError("mu_from_Q: Q is not positive definite");
  }
  // eigenvalue route on the rank-one sandwich S^t Q S, S = [[1,0],[L,0]]
  Matrix S = Matrix::Zero(n + 1, n + 1);
  S(0, 0) = 1.0;
  if (n > 0) S.block(1, 0, n, 1) = L;
  const Matrix sandwich = S.transpose() * Q * S;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sandwich);
  const double mu_eig = es.eigenvalues().maxCoeff();

  // scalar expansion Q1 + Q2 L + L^t Q3 + L^t Q4 L
  double mu = Q(0, 0);
  if (n > 0) {
    mu += (Q.block(0, 1, 1, n) * L).value();
    mu += (L.transpose() * Q.block(1, 0, n, 1)).value();
    mu += (L.transpose() * Q.block(1, 1, n, n) * L).value();
  }
  if (std::abs(mu - mu_eig) > 1e-10 * std::max(1.0, std::abs(mu)))
    throw std::runtime_error("mu_from_Q: eigenvalue and scalar routes disagree");
  return mu;
}

double mu_n2_lambda_star(double c, double l1, double l2) {
  const double cp = c + kPi2;
  return (l1 - cp) * cp + l2 - 1.0;
}

double mu_closed_form_n2(double c, double l1, double l2) {
  const double cp = c + kPi2;
  const double lam_star = mu_n2_lambda_star(c, l1, l2);
  if (l1 == 0.0 || l2 == 2.0 || lam_star == 0.0)
    throw ValidationError("mu_closed_form_n2: division by zero in l1, l2-2 or lambda*");
  const double b = l2 - 3.0 + (2.0 * c + 2.0 * kPi2) / lam_star;
  return 1.0 / (2.0 * c + 2.0 * kPi2) + (-l1 * cp - l2) / (cp * lam_star) + b * l1 / 2.0 -
         l1 * l2 / 2.0 +
         (1.0 / (l2 - 2.0)) * (l2 * l2 / lam_star + l1 * l2 * l2 / 2.0 - b * l2 * l2 / l1);
}

GainCertificate certify_gains(const PlantSpec& spec, double theta_frac) {
  if (!(theta_frac > 0.0 && theta_frac < 1.0))
    throw ValidationError("certify_gains: theta_frac must lie in (0,1)");
  spec.validate();

  GainCertificate cert;
  cert.spec = spec;
  cert.theta_frac = theta_frac;
  cert.M = build_M(spec.c, spec.A, spec.L, spec.C);
  cert.Q = lyapunov_solve(cert.M);
  std::tie(cert.lambda_min, cert.lambda_max) = symmetric_eig_range(cert.Q);
  cert.mu_c = mu_from_Q(cert.Q, spec.L);
  cert.sigma_max = std::min(1.0 / std::sqrt(cert.mu_c), std::sqrt(2.0 * (spec.c - 1.0) / 3.0));
  if (std::abs(spec.sigma) >= cert.sigma_max)
    throw CertificationError("certify_gains: |sigma| = " + format_double(std::abs(spec.sigma)) +
                             " is not below the tolerance " + format_double(cert.sigma_max));
  cert.rate_Ze = (1.0 - cert.mu_c * spec.sigma * spec.sigma) / cert.lambda_max;
  const double ms_rate = 2.0 * spec.c - 2.0 - 3.0 * spec.sigma * spec.sigma;
  const double scale = std::max({1.0, std::abs(ms_rate), std::abs(cert.rate_Ze)});
  cert.degenerate_branch = std::abs(ms_rate - cert.rate_Ze) <= 1e-12 * scale;
  cert.theta_star = cert.degenerate_branch ? theta_frac * ms_rate : std::min(ms_rate, cert.rate_Ze);
  return cert;
}

GammaConstants gamma_constants(const GainCertificate& cert, double EZ0sq, double Eeta0sq,
                               double Ebeta0sq, double max_l_sq) {
  if (EZ0sq < 0.0 || Eeta0sq < 0.0 || Ebeta0sq < 0.0 || max_l_sq < 0.0)
    throw ValidationError("gamma_constants: moments must be nonnegative");
  if (!(cert.theta_star > 0.0)) throw ValidationError("gamma_constants: invalid certificate");

  const PlantSpec& s = cert.spec;
  const double sig2 = s.sigma * s.sigma;
  const double Cnorm2 = s.C.squaredNorm();
  const RowVector CALC = s.C * (s.A + s.L * s.C);
  const double CL = s.exo_dim() > 0 ? (s.C * s.L).value() : 0.0;

  GammaConstants g;
  const double branch_a = (1.0 + s.c / 2.0) * (1.0 + s.c / 2.0) * Cnorm2 +
                          0.25 * CALC.squaredNorm() + 0.75 * sig2 * Cnorm2;
  const double branch_b = 0.75 * sig2 * CL * CL;
  g.gamma1 = std::max(branch_a, branch_b);

  const double ms_rate = 2.0 * s.c - 2.0 - 3.0 * sig2;
  const double cond = cert.lambda_max / cert.lambda_min;
  const double E0 = EZ0sq + Eeta0sq;
  if (cert.degenerate_branch) {
    // sup_{t>=0} t e^{-(ms_rate - theta) t} = 1/(e (ms_rate - theta))
    const double gap = ms_rate - cert.theta_star;
    g.gamma2 = Ebeta0sq + (1.0 / (std::numbers::e * gap)) * g.gamma1 * cond * E0;
  } else {
    g.gamma2 = Ebeta0sq + g.gamma1 / std::abs(ms_rate - cert.rate_Ze) * cond * E0;
  }
  g.gamma = 2.0 * g.gamma2 + 0.5 * Cnorm2 * cond * E0;
  g.gamma_star = 2.0 * (1.0 + max_l_sq) * g.gamma;
  return g;
}

std::vector<std::pair<std::string, std::string>> certificate_report(const GainCertificate& cert) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto put = [&kv](const std::string& k, double v) { kv.emplace_back(k, format_double(v)); };
  kv.emplace_back("exo_dim", std::to_string(cert.spec.exo_dim()));
  put("c", cert.spec.c);
  put("sigma", cert.spec.sigma);
  put("Q11", cert.Q(0, 0));
  put("lambda_min", cert.lambda_min);
  put("lambda_max", cert.lambda_max);
  put("mu_c", cert.mu_c);
  put("sigma_max", cert.sigma_max);
  put("rate_Ze", cert.rate_Ze);
  put("ms_rate_2c_2_3s2", 2.0 * cert.spec.c - 2.0 - 3.0 * cert.spec.sigma * cert.spec.sigma);
  put("theta_star", cert.theta_star);
  put("theta_frac", cert.theta_frac);
  kv.emplace_back("degenerate_branch", cert.degenerate_branch ? "1" : "0");
  if (cert.gammas) {
    put("gamma1", cert.gammas->gamma1);
    put("gamma2", cert.gammas->gamma2);
    put("gamma", cert.gammas->gamma);
    put("gamma_star", cert.gammas->gamma_star);
  }
  return kv;
}

}  // namespace heatctl
