#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <vector>

#include "heatctl/kernel.hpp"

namespace heatctl {

/// Discretization of the Volterra transform (Lambda y)(x) = y(x) - int_0^x k(x,s) y(s) ds
/// with trapezoid weights on the shared n-node grid. Row i of `forward`:
///   T_ii = 1 - (h/2) k(x_i,x_i),  T_ij = -h w_j k(x_i,zeta_j) for j < i
/// (w_0 = 1/2, interior 1, moving endpoint 1/2; row 0 is the empty integral).
struct TransformPair {
  int n = 0;
  double h = 0.0;
  Eigen::MatrixXd forward;         ///< lower-triangular T
  double inverse_kernel_max_sq = 0.0;  ///< max over the grid of l(x,zeta)^2, from T^-1 - I
  std::vector<double> kx1_trace;   ///< copied from the kernel for the measurement row
  double k11 = 0.0;
};

TransformPair build_transform(const Kernel& kernel);

/// z = T y (lower-triangular matrix-vector product).
std::vector<double> apply_forward(const TransformPair& tp, std::span<const double> y);

/// Solve T y = z by forward substitution.
std::vector<double> apply_inverse(const TransformPair& tp, std::span<const double> z);

/// w = T^t v; used to collapse quadrature functionals of T y into a single row.
std::vector<double> apply_forward_transpose(const TransformPair& tp, std::span<const double> v);

/// Same cache format as the kernel: '#' key=value header (n, k11,
/// inverse_kernel_max_sq, kx1 trace), then "i,j,k_value" rows holding the
/// lower triangle of the forward matrix.
void save_transform_csv(const TransformPair& tp, const std::filesystem::path& path);
TransformPair load_transform_csv(const std::filesystem::path& path);

}  // namespace heatctl
