#pragma once

#include <Eigen/Core>
#include <utility>

namespace heatctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Unique symmetric solution of M^t Q + Q M = -I for Hurwitz M, via the
/// Kronecker-vectorized linear system; symmetrized and checked PD.
/// Throws if M is not Hurwitz or the solution fails its residual/PD checks.
Matrix lyapunov_solve(const Matrix& M);

double lyapunov_residual(const Matrix& M, const Matrix& Q);

/// max Re(eig(M)) < -margin
bool is_hurwitz(const Matrix& M, double margin = 1e-9);
double max_eig_real_part(const Matrix& M);

/// Rank of [C; CA; ...; CA^{n-1}] with a relative singular-value threshold.
int observability_rank(const Matrix& A, const RowVector& C, double rel_tol = 1e-10);

Matrix expm(const Matrix& A);

/// (Phi, Psi) with Phi = e^{A dt}, Psi = int_0^dt e^{A s} ds (block-matrix trick).
std::pair<Matrix, Matrix> zoh_propagators(const Matrix& A, double dt);

/// Extreme eigenvalues of a symmetric matrix.
std::pair<double, double> symmetric_eig_range(const Matrix& S);

}  // namespace heatctl
