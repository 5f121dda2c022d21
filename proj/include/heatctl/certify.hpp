#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatctl/linalg.hpp"

namespace heatctl {

/// Plant and disturbance data entering the gain certificate.
struct PlantSpec {
  double c = 0.0;
  double sigma = 0.0;
  Matrix A;      ///< exogenous system matrix (n x n)
  RowVector C;   ///< output row (1 x n)
  Vector L;      ///< observer gain column (n x 1)
  std::vector<double> a_samples;  ///< reaction coefficient samples (reporting only)

  int exo_dim() const { return int(A.rows()); }

  /// (A,C) observable, A+LC Hurwitz, c > 1; throws CertificationError.
  void validate() const;
};

struct GammaConstants {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma = 0.0;
  double gamma_star = 0.0;
};

/// Machine-checked stability certificate for the coupled (Z, eta) system:
/// Lyapunov solution, noise tolerance and the certified decay rates.
struct GainCertificate {
  PlantSpec spec;
  Matrix M;            ///< coupled-system drift [[-(c+pi^2), C],[0, A+LC]]
  Matrix Q;            ///< M^t Q + Q M = -I
  double lambda_min = 0.0, lambda_max = 0.0;
  double mu_c = 0.0;
  double sigma_max = 0.0;          ///< min{1/sqrt(mu_c), sqrt(2(c-1)/3)}
  double rate_Ze = 0.0;            ///< (1 - mu_c sigma^2)/lambda_max
  double theta_star = 0.0;
  double theta_frac = 0.9;         ///< fraction used in the equal-rates branch
  bool degenerate_branch = false;
  std::optional<GammaConstants> gammas;
};

Matrix build_M(double c, const Matrix& A, const Vector& L, const RowVector& C);

/// mu_c = lambda_max(S^t Q S) with S = [[1,0],[L,0]]; also evaluated as the
/// scalar expansion Q1 + Q2 L + L^t Q3 + L^t Q4 L. The two routes must agree
/// to 1e-10; the scalar is returned.
double mu_from_Q(const Matrix& Q, const Vector& L);

/// Closed-form mu_c for the n=2 harmonic structure A=[[0,2],[-2,0]], C=[1,0]
/// (diagnostic; see ERRATA.md for how it compares with the Lyapunov route).
double mu_closed_form_n2(double c, double l1, double l2);

/// Inner constant lambda* = (l1 - c - pi^2)(c + pi^2) + l2 - 1 of the formula.
double mu_n2_lambda_star(double c, double l1, double l2);

/// Full certificate; throws CertificationError when |sigma| >= sigma_max or
/// any hypothesis fails.
GainCertificate certify_gains(const PlantSpec& spec, double theta_frac = 0.9);

/// Gamma-family constants for the closed-loop mean-square bound
/// E|y(t)|^2 <= Gamma* e^{-theta* t}; moments are of the initial data and
/// Ebeta0sq = E int (z0 + (x^2/2) C eta0)^2 dx is supplied by the caller.
GammaConstants gamma_constants(const GainCertificate& cert, double EZ0sq, double Eeta0sq,
                               double Ebeta0sq, double max_l_sq);

/// Flat key=value lines for reports and files.
std::vector<std::pair<std::string, std::string>> certificate_report(const GainCertificate& cert);

}  // namespace heatctl
