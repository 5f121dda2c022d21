#pragma once

#include <span>
#include <vector>

#include "heatctl/brownian.hpp"
#include "heatctl/certify.hpp"
#include "heatctl/linalg.hpp"

namespace heatctl {

/// Exogenous trajectory xi_{k+1} = e^{A dt} xi_k, w_k = C xi_k.
struct ExoSeries {
  Matrix xi;              ///< (steps+1) x n, row k = xi(t_k)
  std::vector<double> w;  ///< steps+1
};

ExoSeries exo_series(const Vector& xi0, double dt, std::size_t steps, const Matrix& A,
                     const RowVector& C);

/// Observer internal state; the estimates are always recomputed from
/// (theta, Z), never integrated separately.
struct ObserverState {
  Vector theta;
  Vector xi_hat;
  double w_hat = 0.0;
};

/// Exact zero-order-hold discretization of
///   theta' = (A+LC) theta + [(A+LC)L + (c+pi^2)L] Z + L u0
/// with (Z, u0) held over the step.
class DisturbanceObserver {
 public:
  DisturbanceObserver(const Matrix& A, const Vector& L, const RowVector& C, double c, double dt);

  ObserverState make_state(const Vector& theta0, double Z) const;
  void step(ObserverState& s, double Z_held, double u0_held, double Z_next) const;
  void refresh(ObserverState& s, double Z) const;

  const Matrix& phi() const { return phi_; }

 private:
  Matrix phi_, psi_;
  Vector gz_, L_;
  RowVector C_;
};

ObserverState observer_step(const DisturbanceObserver& obs, const ObserverState& s, double Z,
                            double u0, double Z_next);

/// Trajectory of the coupled (Z, eta) linear SDE, Euler-Maruyama.
struct CoupledTrajectory {
  std::vector<double> t;
  std::vector<double> Z;
  Matrix eta;  ///< (steps+1) x n
};

CoupledTrajectory simulate_coupled(double Z0, const Vector& eta0, const PlantSpec& spec, double dt,
                                   double T, const BrownianPath& path);

/// Euler-Maruyama for dZ = -[(c+pi^2)Z + u0 + w]dt + sigma Z dB.
/// u0_series/w_series hold per-step held values (size >= steps).
std::vector<double> simulate_scalar_Z(double Z0, std::span<const double> u0_series,
                                      std::span<const double> w_series, double c, double sigma,
                                      const BrownianPath& path);

}  // namespace heatctl
