#include "heatctl/transform.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "heatctl/config.hpp"

namespace heatctl {

TransformPair build_transform(const Kernel& kernel) {
  const int n = kernel.grid.n();
  const double h = kernel.grid.h();
  TransformPair tp;
  tp.n = n;
  tp.h = h;
  tp.kx1_trace = kernel.kx1_trace;
  tp.k11 = kernel.k11;
  tp.forward = Eigen::MatrixXd::Zero(n, n);
  tp.forward(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const double w = (j == 0) ? 0.5 : 1.0;
      tp.forward(i, j) = -h * w * kernel.grid(i, j);
    }
    tp.forward(i, i) = 1.0 - 0.5 * h * kernel.grid(i, i);
    if (std::abs(tp.forward(i, i)) < 1e-12)
      throw std::runtime_error("build_transform: singular diagonal entry");
  }

  // Recover l(x,zeta) from T^-1 = I + h W.l by dividing out the quadrature
  // weights; only its squared max is kept (it feeds the closed-loop bound).
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  for (int col = 0; col < n; ++col) {
    for (int i = col; i < n; ++i) {
      double s = inv(i, col);
      for (int j = col; j < i; ++j) s -= tp.forward(i, j) * inv(j, col);
      inv(i, col) = s / tp.forward(i, i);
    }
  }
  double max_sq = 0.0;
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double w = (j == 0 || j == i) ? 0.5 : 1.0;
      const double dij = (i == j) ? 1.0 : 0.0;
      const double l = (inv(i, j) - dij) / (h * w);
      max_sq = std::max(max_sq, l * l);
    }
  }
  tp.inverse_kernel_max_sq = max_sq;
  return tp;
}

std::vector<double> apply_forward(const TransformPair& tp, std::span<const double> y) {
  if (int(y.size()) != tp.n) throw ValidationError("apply_forward: length mismatch");
  std::vector<double> z(tp.n);
  for (int i = 0; i < tp.n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += tp.forward(i, j) * y[j];
    z[i] = s;
  }
  return z;
}

std::vector<double> apply_inverse(const TransformPair& tp, std::span<const double> z) {
  if (int(z.size()) != tp.n) throw ValidationError("apply_inverse: length mismatch");
  std::vector<double> y(tp.n);
  for (int i = 0; i < tp.n; ++i) {
    double s = z[i];
    for (int j = 0; j < i; ++j) s -= tp.forward(i, j) * y[j];
    y[i] = s / tp.forward(i, i);
  }
  return y;
}

std::vector<double> apply_forward_transpose(const TransformPair& tp, std::span<const double> v) {
  if (int(v.size()) != tp.n) throw ValidationError("apply_forward_transpose: length mismatch");
  std::vector<double> w(tp.n, 0.0);
  for (int i = 0; i < tp.n; ++i)
    for (int j = 0; j <= i; ++j) w[j] += tp.forward(i, j) * v[i];
  return w;
}

void save_transform_csv(const TransformPair& tp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_transform_csv: cannot open " + path.string());
  out << "# heatctl-transform v1\n";
  out << "# n=" << tp.n << "\n";
  out << "# k11=" << format_double(tp.k11) << "\n";
  out << "# inverse_kernel_max_sq=" << format_double(tp.inverse_kernel_max_sq) << "\n";
  out << "# kx1=";
  for (int i = 0; i < tp.n; ++i) out << (i ? ";" : "") << format_double(tp.kx1_trace[i]);
  out << "\n";
  out << "i,j,k_value\n";
  for (int i = 0; i < tp.n; ++i)
    for (int j = 0; j <= i; ++j)
      out << i << "," << j << "," << format_double(tp.forward(i, j)) << "\n";
}

TransformPair load_transform_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_transform_csv: cannot open " + path.string());
  TransformPair tp;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# n=", 0) == 0) tp.n = std::stoi(line.substr(4));
    else if (line.rfind("# k11=", 0) == 0) tp.k11 = std::stod(line.substr(6));
    else if (line.rfind("# inverse_kernel_max_sq=", 0) == 0)
      tp.inverse_kernel_max_sq = std::stod(line.substr(24));
    else if (line.rfind("# kx1=", 0) == 0) {
      std::stringstream ss(line.substr(6));
      std::string tok;
      while (std::getline(ss, tok, ';')) tp.kx1_trace.push_back(std::stod(tok));
    } else if (line == "i,j,k_value") break;
  }
  if (tp.n < 3 || int(tp.kx1_trace.size()) != tp.n)
    throw std::runtime_error("load_transform_csv: malformed header in " + path.string());
  tp.h = 1.0 / (tp.n - 1);
  tp.forward = Eigen::MatrixXd::Zero(tp.n, tp.n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int i = 0, j = 0;
    double v = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf", &i, &j, &v) != 3)
      throw std::runtime_error("load_transform_csv: malformed row: " + line);
    tp.forward(i, j) = v;
  }
  return tp;
}

}  // namespace heatctl
