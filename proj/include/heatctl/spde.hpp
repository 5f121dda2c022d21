#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "heatctl/brownian.hpp"
#include "heatctl/certify.hpp"
#include "heatctl/scenario.hpp"
#include "heatctl/transform.hpp"

namespace heatctl {

/// One drift-implicit / noise-explicit step of
///   dy = (y_xx + a(x) y - c_shift y) dt + sigma y dB,  y_x(0)=0, y_x(1)=g,
/// on m nodes with ghost-node Neumann rows; the flux enters the last row as
/// 2g/h. The constant tridiagonal factorization is precomputed.
class FieldStepper {
 public:
  FieldStepper(std::span<const double> a_samples, double c_shift, double sigma, double dt, int m);

  /// Advance y in place given the held boundary flux and the Wiener increment.
  void step(std::vector<double>& y, double flux, double dB) const;

  double h() const { return h_; }
  int nodes() const { return m_; }

 private:
  int m_;
  double dt_, sigma_, h_, flux_coef_;
  std::vector<double> mult_, dinv_, up_;
};

/// Pure-function form (rebuilds the factorization; loops use FieldStepper).
std::vector<double> step_field(std::span<const double> y, double flux,
                               std::span<const double> a_samples, double c_shift, double sigma,
                               double dB, double dt);

struct Measurements {
  double y1 = 0.0;     ///< pointwise boundary value y(1)
  double Z = 0.0;      ///< trapezoid of cos(pi x) (Lambda y)(x)
  double avg_kx = 0.0; ///< trapezoid of k_x(1,zeta) y(zeta)
};

Measurements measure(std::span<const double> y, const TransformPair& tp);

/// u = k(1,1) y(1) + int k_x(1,zeta) y dzeta - w_hat
inline double dobc_control(double y1, double avg_kx, double k11, double w_hat) {
  return k11 * y1 + avg_kx - w_hat;
}

struct Trajectory {
  std::vector<double> t;
  std::vector<double> norm_sq;  ///< trapezoid of y^2
  std::vector<double> y1;
  std::vector<double> Z;
  std::vector<double> w;
  std::vector<double> w_hat;
  std::vector<double> u;
  std::vector<double> brownian;  ///< B(t_k), accumulated increments
  int exo_dim = 0;
  std::vector<double> eta;  ///< observer error, row-major (records x exo_dim)
  std::vector<double> snapshot_t;
  std::vector<std::vector<double>> snapshot_y;
};

/// Per-path series for ensemble statistics, decimated by the record stride.
struct PathSeries {
  std::vector<double> value;  ///< ||y||^2 (field modes) or |Z|^2+|eta|^2 (coupled)
  std::vector<double> west;   ///< |w_hat - w| (closed/coupled modes; else zeros)
};

/// Immutable simulation setup shared by all paths of a scenario: kernel,
/// transform, certificate, propagators and the factored field matrix.
/// Closed mode requires the certificate to pass (throws CertificationError).
class Simulator {
 public:
  explicit Simulator(const Scenario& sc, std::vector<double> w_tilde_series = {});

  Trajectory run(std::uint64_t seed) const;
  PathSeries run_series(std::uint64_t seed, int record_stride) const;

  /// Record times for a given stride (k = 0, stride, ..., plus the endpoint).
  std::vector<double> record_times(int record_stride) const;

  std::size_t steps() const { return steps_; }
  const Scenario& scenario() const { return sc_; }
  const Kernel* kernel() const { return kernel_.get(); }
  const TransformPair* transform() const { return tp_.get(); }
  const GainCertificate* certificate() const { return cert_.get(); }
  std::span<const double> w_series() const { return exo_w_; }
  double initial_Z() const { return Z0_; }
  std::span<const double> initial_eta() const { return {eta0_.data(), eta0_.size()}; }

 private:
  void run_impl(std::uint64_t seed, Trajectory* traj, PathSeries* series, int stride) const;

  Scenario sc_;
  std::size_t steps_ = 0;
  std::vector<double> trapw_, exo_w_, exo_xi_, w_tilde_;
  std::unique_ptr<Kernel> kernel_;
  std::unique_ptr<TransformPair> tp_;
  std::unique_ptr<GainCertificate> cert_;
  std::unique_ptr<FieldStepper> stepper_;
  std::vector<double> zrow_, kxrow_, theta0_, y0_;
  // raw observer propagators (row-major, exo_dim x exo_dim)
  std::vector<double> obs_phi_, obs_psi_gz_, obs_psi_L_, Lrow_, Crow_;
  double Z0_ = 0.0;
  std::vector<double> eta0_;
};

Trajectory simulate_closed_loop(const Scenario& sc, std::uint64_t seed);
Trajectory simulate_open_loop(const Scenario& sc, std::uint64_t seed);
Trajectory simulate_target(const Scenario& sc, std::uint64_t seed,
                           std::span<const double> w_tilde_series);

}  // namespace heatctl
