#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "heatctl/grid.hpp"

namespace heatctl {

/// Backstepping kernel k(x,zeta) on the triangle 0 <= zeta <= x <= 1,
/// solving  k_xx - k_zz = (c + a(zeta)) k,  k_z(x,0) = 0,
///          k(x,x) = -1/2 int_0^x a - (c/2) x.
struct Kernel {
  TriGrid grid;
  double c = 0.0;
  std::vector<double> a_samples;  ///< a(x) on the same n-node axis
  std::vector<double> diag_trace; ///< k(x_i, x_i)
  std::vector<double> kx1_trace;  ///< k_x(1, zeta_j), one-sided differences
  double k11 = 0.0;               ///< k(1,1)
};

/// Closed-form kernel for constant coefficient: -c x I1(s)/s with
/// s = sqrt(c (x^2 - zeta^2)), by direct series summation (the zeta -> x
/// limit is the leading term I1(s)/s -> 1/2).
double bessel_kernel_value(double c, double x, double zeta);

/// I1(w)/w as a series in u = (w/2)^2, truncated at 1e-16 relative.
double bessel_i1_ratio_from_u(double u);

/// Solve the kernel equation by fixed-point iteration of its integral form
/// in characteristic coordinates (xi = x + zeta, eta = x - zeta) with
/// trapezoid quadrature. Converges when the successive-change max norm
/// drops below 1e-12; throws after the iteration cap.
Kernel solve_kernel(std::span<const double> a_samples, double c, int n);

/// Convenience overload for constant a.
Kernel solve_kernel(double a_const, double c, int n);

/// Cache format: '#' key=value header lines, then "i,j,k_value" rows.
void save_kernel_csv(const Kernel& k, const std::filesystem::path& path);
Kernel load_kernel_csv(const std::filesystem::path& path);

/// Max-norm residual of the discrete wave operator at interior nodes,
/// (k_xx - k_zz - (c+a)k via centered second differences); O(h).
double kernel_interior_residual(const Kernel& k);

}  // namespace heatctl
