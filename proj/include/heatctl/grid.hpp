#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "heatctl/errors.hpp"

namespace heatctl {

/// Samples over the lower triangle {(i,j): 0 <= j <= i <= n-1} of the unit
/// square, i.e. at (x_i, zeta_j) = (i*h, j*h) with h = 1/(n-1).
class TriGrid {
 public:
  explicit TriGrid(int n) : n_(n), h_(1.0 / (n - 1)), v_(std::size_t(n) * (n + 1) / 2, 0.0) {
    if (n < 2) throw ValidationError("TriGrid: n must be >= 2");
  }

  int n() const { return n_; }
  double h() const { return h_; }

  double operator()(int i, int j) const {
    check(i, j);
    return v_[idx(i, j)];
  }
  double& at(int i, int j) {
    check(i, j);
    return v_[idx(i, j)];
  }

  /// Row i holds k(x_i, zeta_0..zeta_i).
  std::span<const double> row(int i) const { return {v_.data() + idx(i, 0), std::size_t(i) + 1}; }

  std::span<const double> values() const { return v_; }
  std::span<double> values() { return v_; }

 private:
  static std::size_t idx(int i, int j) { return std::size_t(i) * (i + 1) / 2 + j; }
  void check(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j > i)
      throw ValidationError("TriGrid: index outside the lower triangle");
  }

  int n_;
  double h_;
  std::vector<double> v_;
};

/// Composite trapezoid weights on n uniform nodes spanning [0,1].
inline std::vector<double> trapezoid_weights(int n) {
  const double h = 1.0 / (n - 1);
  std::vector<double> w(n, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

inline double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace heatctl
