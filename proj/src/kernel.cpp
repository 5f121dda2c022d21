#include "heatctl/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "heatctl/config.hpp"

namespace heatctl {

double bessel_i1_ratio_from_u(double u) {
  double term = 0.5;
  double sum = term;
  for (int i = 1; i < 1000; ++i) {
    term *= u / (double(i) * double(i + 1));
    sum += term;
    if (std::abs(term) <= 1e-16 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_kernel_value(double c, double x, double zeta) {
  if (!(x >= 0.0 && x <= 1.0) || !(zeta >= 0.0) || zeta > x + 1e-14)
    throw ValidationError("bessel_kernel_value: (x,zeta) outside the triangle");
  if (c == 0.0) return 0.0;
  const double u = c * (x * x - zeta * zeta) / 4.0;  // (w/2)^2 with w = sqrt(c(x^2-z^2))
  return -c * x * bessel_i1_ratio_from_u(u);
}

namespace {

// Solver workspace on the characteristic grid xi = x + zeta, eta = x - zeta.
// Indices p = xi/h in [0, 2(n-1)], q = eta/h in [0, n-1]; valid when
// q <= p and p + q <= 2(n-1).
struct CharGrid {
  int n;        // nodes on the original axis
  int np;       // 2(n-1) + 1 xi-nodes
  double h;
  std::vector<double> v;  // np * n, row-major in p

  explicit CharGrid(int n_) : n(n_), np(2 * (n_ - 1) + 1), h(1.0 / (n_ - 1)), v(std::size_t(np) * n, 0.0) {}
  double& at(int p, int q) { return v[std::size_t(p) * n + q]; }
  double at(int p, int q) const { return v[std::size_t(p) * n + q]; }
  int qmax(int p) const { return std::min({p, np - 1 - p, n - 1}); }
};

}  // namespace

Kernel solve_kernel(std::span<const double> a_samples, double c, int n) {
  if (n < 3) throw ValidationError("solve_kernel: n must be >= 3");
  if (int(a_samples.size()) != n) throw ValidationError("solve_kernel: a_samples size != n");
  for (double a : a_samples)
    if (!std::isfinite(a)) throw ValidationError("solve_kernel: non-finite coefficient sample");

  const double h = 1.0 / (n - 1);
  const int np = 2 * (n - 1) + 1;

  // lambda(zeta) = c + a(zeta) at half-grid points zeta = m*h/2, m = 0..2(n-1);
  // odd nodes by midpoint interpolation of the samples.
  std::vector<double> lam(np);
  for (int m = 0; m < np; ++m) {
    if (m % 2 == 0)
      lam[m] = c + a_samples[m / 2];
    else
      lam[m] = c + 0.5 * (a_samples[(m - 1) / 2] + a_samples[(m + 1) / 2]);
  }
  // cumlam[m] = int_0^{m h} lambda(r/2) dr, trapezoid
  std::vector<double> cumlam(np, 0.0);
  for (int m = 1; m < np; ++m) cumlam[m] = cumlam[m - 1] + 0.5 * h * (lam[m - 1] + lam[m]);

  // Integral form: F = g + 1/2 I2(eta) + 1/4 int_eta^xi int_0^eta lam((tau-s)/2) F(tau,s) ds dtau,
  // I2(eta) = int_0^eta int_0^r lam((r-s)/2) F(r,s) ds dr, with
  // g(xi,eta) = -1/2 cumlam(eta) - 1/4 (cumlam(xi) - cumlam(eta)).
  CharGrid g(n), F(n), P(n), Qc(n), Fn(n);
  for (int p = 0; p < np; ++p)
    for (int q = 0; q <= g.qmax(p); ++q)
      g.at(p, q) = -0.5 * cumlam[q] - 0.25 * (cumlam[p] - cumlam[q]);
  F.v = g.v;

  std::vector<double> I2(n, 0.0);
  const int max_iter = 200;
  const double tol = 1e-12;
  bool converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    for (int p = 0; p < np; ++p) {
      const int qm = F.qmax(p);
      for (int q = 0; q <= qm; ++q) P.at(p, q) = lam[p - q] * F.at(p, q);
      Qc.at(p, 0) = 0.0;
      for (int q = 1; q <= qm; ++q)
        Qc.at(p, q) = Qc.at(p, q - 1) + 0.5 * h * (P.at(p, q - 1) + P.at(p, q));
    }
    I2[0] = 0.0;
    for (int q = 1; q < n; ++q)
      I2[q] = I2[q - 1] + 0.5 * h * (Qc.at(q - 1, q - 1) + Qc.at(q, q));
    double delta = 0.0;
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      const int pmax = np - 1 - q;
      for (int p = q; p <= pmax; ++p) {
        if (p > q) acc += 0.5 * h * (Qc.at(p - 1, q) + Qc.at(p, q));
        const double f = g.at(p, q) + 0.5 * I2[q] + 0.25 * acc;
        delta = std::max(delta, std::abs(f - F.at(p, q)));
        Fn.at(p, q) = f;
      }
    }
    std::swap(F.v, Fn.v);
    if (delta <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error("solve_kernel: fixed-point iteration did not converge (pathological coefficients?)");

  Kernel k{TriGrid(n), c, std::vector<double>(a_samples.begin(), a_samples.end()), {}, {}, 0.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) k.grid.at(i, j) = F.at(i + j, i - j);

  k.diag_trace.resize(n);
  for (int i = 0; i < n; ++i) k.diag_trace[i] = k.grid(i, i);
  k.k11 = k.grid(n - 1, n - 1);

  // k_x(1, zeta): three-point one-sided in x; the two nodes nearest zeta = 1
  // lack the stencil and get a two-point difference / linear extrapolation.
  k.kx1_trace.resize(n);
  for (int j = 0; j < n; ++j) {
    if (j <= n - 3)
      k.kx1_trace[j] = (3.0 * k.grid(n - 1, j) - 4.0 * k.grid(n - 2, j) + k.grid(n - 3, j)) / (2.0 * h);
    else if (j == n - 2)
      k.kx1_trace[j] = (k.grid(n - 1, j) - k.grid(n - 2, j)) / h;
    else
      k.kx1_trace[j] = 2.0 * k.kx1_trace[j - 1] - k.kx1_trace[j - 2];
  }
  return k;
}

Kernel solve_kernel(double a_const, double c, int n) {
  std::vector<double> a(std::size_t(std::max(n, 0)), a_const);
  return solve_kernel(a, c, n);
}

double kernel_interior_residual(const Kernel& k) {
  const int n = k.grid.n();
  const double h = k.grid.h();
  double worst = 0.0;
  for (int i = 1; i <= n - 2; ++i) {
    for (int j = 1; j <= i - 1; ++j) {
      const double kxx = (k.grid(i + 1, j) - 2.0 * k.grid(i, j) + k.grid(i - 1, j)) / (h * h);
      const double kzz = (k.grid(i, j + 1) - 2.0 * k.grid(i, j) + k.grid(i, j - 1)) / (h * h);
      const double r = kxx - kzz - (k.c + k.a_samples[j]) * k.grid(i, j);
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

void save_kernel_csv(const Kernel& k, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_kernel_csv: cannot open " + path.string());
  const int n = k.grid.n();
  out << "# heatctl-kernel v1\n";
  out << "# n=" << n << "\n";
  out << "# c=" << format_double(k.c) << "\n";
  out << "# k11=" << format_double(k.k11) << "\n";
  out << "# a=";
  for (int i = 0; i < n; ++i) out << (i ? ";" : "") << format_double(k.a_samples[i]);
  out << "\n";
  out << "i,j,k_value\n";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      out << i << "," << j << "," << format_double(k.grid(i, j)) << "\n";
}

Kernel load_kernel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_kernel_csv: cannot open " + path.string());
  int n = -1;
  double c = 0.0;
  std::vector<double> a;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# n=", 0) == 0) n = std::stoi(line.substr(4));
    else if (line.rfind("# c=", 0) == 0) c = std::stod(line.substr(4));
    else if (line.rfind("# a=", 0) == 0) {
      std::stringstream ss(line.substr(4));
      std::string tok;
      while (std::getline(ss, tok, ';')) a.push_back(std::stod(tok));
    } else if (line == "i,j,k_value") break;
  }
  if (n < 3 || int(a.size()) != n)
    throw std::runtime_error("load_kernel_csv: malformed header in " + path.string());

  Kernel k{TriGrid(n), c, std::move(a), {}, {}, 0.0};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int i = 0, j = 0;
    double v = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf", &i, &j, &v) != 3)
      throw std::runtime_error("load_kernel_csv: malformed row: " + line);
    k.grid.at(i, j) = v;
  }
  const double h = k.grid.h();
  k.diag_trace.resize(n);
  for (int i = 0; i < n; ++i) k.diag_trace[i] = k.grid(i, i);
  k.k11 = k.grid(n - 1, n - 1);
  k.kx1_trace.resize(n);
  for (int j = 0; j < n; ++j) {
    if (j <= n - 3)
      k.kx1_trace[j] = (3.0 * k.grid(n - 1, j) - 4.0 * k.grid(n - 2, j) + k.grid(n - 3, j)) / (2.0 * h);
    else if (j == n - 2)
      k.kx1_trace[j] = (k.grid(n - 1, j) - k.grid(n - 2, j)) / h;
    else
      k.kx1_trace[j] = 2.0 * k.kx1_trace[j - 1] - k.kx1_trace[j - 2];
  }
  return k;
}

}  // namespace heatctl
