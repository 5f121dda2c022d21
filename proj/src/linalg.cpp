#include "heatctl/linalg.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "heatctl/errors.hpp"

namespace heatctl {

double max_eig_real_part(const Matrix& M) {
  Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& M, double margin) {
  if (M.rows() == 0) return true;
  return max_eig_real_part(M) < -margin;
}

double lyapunov_residual(const Matrix& M, const Matrix& Q) {
  const Matrix R = M.transpose() * Q + Q * M + Matrix::Identity(M.rows(), M.cols());
  return R.cwiseAbs().maxCoeff();
}

Matrix lyapunov_solve(const Matrix& M) {
  if (M.rows() != M.cols()) throw ValidationError("lyapunov_solve: matrix must be square");
  const Eigen::Index n = M.rows();
  if (!is_hurwitz(M)) throw ValidationError("lyapunov_solve: M is not Hurwitz; no PD solution");

  // Column-major vec: vec(M^t Q) = (I (x) M^t) vec(Q), vec(Q M) = (M^t (x) I) vec(Q).
  Matrix K = Matrix::Zero(n * n, n * n);
  const Matrix Mt = M.transpose();
  for (Eigen::Index c = 0; c < n; ++c) K.block(c * n, c * n, n, n) = Mt;
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index r = 0; r < n; ++r)
        K(c * n + r, k * n + r) += M(k, c);

  Vector rhs = Vector::Zero(n * n);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i * n + i) = -1.0;

  Eigen::FullPivLU<Matrix> lu(K);
  if (!lu.isInvertible()) throw std::runtime_error("lyapunov_solve: singular Kronecker system");
  Vector q = lu.solve(rhs);

  Matrix Q(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) Q(r, c) = q(c * n + r);
  Q = 0.5 * (Q + Q.transpose()).eval();

  if (lyapunov_residual(M, Q) > 1e-10)
    throw std::runtime_error("lyapunov_solve: residual exceeds 1e-10");
  Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::runtime_error("lyapunov_solve: solution is not positive definite");
  return Q;
}

int observability_rank(const Matrix& A, const RowVector& C, double rel_tol) {
  const Eigen::Index n = A.rows();
  if (n == 0) return 0;
  if (A.cols() != n || C.cols() != n) throw ValidationError("observability_rank: dimension mismatch");
  Matrix stack(n, n);
  RowVector row = C;
  for (Eigen::Index i = 0; i < n; ++i) {
    stack.row(i) = row;
    row = row * A;
  }
  Eigen::JacobiSVD<Matrix> svd(stack);
  const auto& sv = svd.singularValues();
  const double thresh = rel_tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  return rank;
}

Matrix expm(const Matrix& A) { return A.exp(); }

std::pair<Matrix, Matrix> zoh_propagators(const Matrix& A, double dt) {
  const Eigen::Index n = A.rows();
  Matrix blk = Matrix::Zero(2 * n, 2 * n);
  blk.topLeftCorner(n, n) = A;
  blk.topRightCorner(n, n) = Matrix::Identity(n, n);
  const Matrix e = (blk * dt).exp();
  return {e.topLeftCorner(n, n), e.topRightCorner(n, n)};
}

std::pair<double, double> symmetric_eig_range(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace heatctl
