#include "heatctl/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "heatctl/errors.hpp"

namespace heatctl {

namespace {
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
}

ExoSeries exo_series(const Vector& xi0, double dt, std::size_t steps, const Matrix& A,
                     const RowVector& C) {
  const Eigen::Index n = A.rows();
  if (xi0.rows() != n || C.cols() != n) throw ValidationError("exo_series: dimension mismatch");
  ExoSeries out;
  out.xi.resize(steps + 1, n);
  out.w.resize(steps + 1);
  const Matrix phi = expm(A * dt);
  Vector xi = xi0;
  for (std::size_t k = 0; k <= steps; ++k) {
    out.xi.row(k) = xi.transpose();
    out.w[k] = n > 0 ? (C * xi).value() : 0.0;
    if (k < steps) xi = phi * xi;
  }
  return out;
}

DisturbanceObserver::DisturbanceObserver(const Matrix& A, const Vector& L, const RowVector& C,
                                         double c, double dt)
    : L_(L), C_(C) {
  const Matrix alc = A + L * C;
  std::tie(phi_, psi_) = zoh_propagators(alc, dt);
  gz_ = alc * L + (c + kPi2) * L;
}

ObserverState DisturbanceObserver::make_state(const Vector& theta0, double Z) const {
  ObserverState s;
  s.theta = theta0;
  refresh(s, Z);
  return s;
}

void DisturbanceObserver::refresh(ObserverState& s, double Z) const {
  s.xi_hat = s.theta + L_ * Z;
  s.w_hat = (C_ * s.xi_hat).value();
}

void DisturbanceObserver::step(ObserverState& s, double Z_held, double u0_held,
                               double Z_next) const {
  s.theta = phi_ * s.theta + psi_ * (gz_ * Z_held + L_ * u0_held);
  refresh(s, Z_next);
}

ObserverState observer_step(const DisturbanceObserver& obs, const ObserverState& s, double Z,
                            double u0, double Z_next) {
  ObserverState next = s;
  obs.step(next, Z, u0, Z_next);
  return next;
}

CoupledTrajectory simulate_coupled(double Z0, const Vector& eta0, const PlantSpec& spec, double dt,
                                   double T, const BrownianPath& path) {
  const Eigen::Index n = spec.exo_dim();
  if (eta0.rows() != n) throw ValidationError("simulate_coupled: eta0 dimension mismatch");
  const std::size_t steps = std::size_t(std::llround(T / dt));
  if (path.increments.size() < steps || path.dt != dt)
    throw ValidationError("simulate_coupled: path does not cover the horizon");

  const Matrix M = build_M(spec.c, spec.A, spec.L, spec.C);
  CoupledTrajectory out;
  out.t.resize(steps + 1);
  out.Z.resize(steps + 1);
  out.eta.resize(steps + 1, n);

  Vector X(n + 1);
  X(0) = Z0;
  X.tail(n) = eta0;
  for (std::size_t k = 0; k <= steps; ++k) {
    out.t[k] = double(k) * dt;
    out.Z[k] = X(0);
    out.eta.row(k) = X.tail(n).transpose();
    if (k == steps) break;
    const double dB = path.increments[k];
    // diffusion [[sigma,0],[sigma L,0]] acts through Z only
    Vector diff(n + 1);
    diff(0) = spec.sigma * X(0);
    diff.tail(n) = spec.sigma * X(0) * spec.L;
    X = X + dt * (M * X) + dB * diff;
    if (!X.allFinite()) throw NumericalAbort("simulate_coupled: non-finite state", long(k));
  }
  return out;
}

std::vector<double> simulate_scalar_Z(double Z0, std::span<const double> u0_series,
                                      std::span<const double> w_series, double c, double sigma,
                                      const BrownianPath& path) {
  const std::size_t steps = path.increments.size();
  if (u0_series.size() < steps || w_series.size() < steps)
    throw ValidationError("simulate_scalar_Z: series shorter than the path");
  std::vector<double> Z(steps + 1);
  Z[0] = Z0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double drift = -((c + kPi2) * Z[k] + u0_series[k] + w_series[k]);
    Z[k + 1] = Z[k] + path.dt * drift + sigma * Z[k] * path.increments[k];
  }
  return Z;
}

}  // namespace heatctl
