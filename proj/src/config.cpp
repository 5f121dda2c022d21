#include "heatctl/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "heatctl/errors.hpp"

namespace heatctl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_bracket_list(const std::string& s) {
  const auto b = s.find('[');
  const auto e = s.rfind(']');
  if (b == std::string::npos || e == std::string::npos || e < b)
    throw ValidationError("config: expected a bracketed list, got '" + s + "'");
  std::vector<double> out;
  std::stringstream ss(s.substr(b + 1, e - b - 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

std::string to_bracket_list(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + "]";
}

std::vector<double> interp_onto_grid(const std::vector<double>& xs, const std::vector<double>& vs,
                                     int m) {
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) {
    const double x = double(i) / (m - 1);
    if (x <= xs.front()) {
      out[i] = vs.front();
      continue;
    }
    if (x >= xs.back()) {
      out[i] = vs.back();
      continue;
    }
    std::size_t j = 1;
    while (xs[j] < x) ++j;
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    out[i] = (1.0 - t) * vs[j - 1] + t * vs[j];
  }
  return out;
}

std::vector<double> resolve_field_form(const std::string& form, int m) {
  const std::string f = trim(form);
  if (f == "cos2pix") {
    std::vector<double> v(m);
    for (int i = 0; i < m; ++i) v[i] = std::cos(2.0 * std::numbers::pi * i / (m - 1));
    return v;
  }
  if (f == "cospix") {
    std::vector<double> v(m);
    for (int i = 0; i < m; ++i) v[i] = std::cos(std::numbers::pi * i / (m - 1));
    return v;
  }
  if (f.rfind("const", 0) == 0) {
    const double val = std::stod(trim(f.substr(5)));
    return std::vector<double>(m, val);
  }
  if (f.rfind("list", 0) == 0) {
    const std::vector<double> vs = parse_bracket_list(f.substr(4));
    if (int(vs.size()) == m) return vs;
    if (vs.size() < 2) throw ValidationError("config: list form needs at least 2 samples");
    std::vector<double> xs(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) xs[i] = double(i) / double(vs.size() - 1);
    return interp_onto_grid(xs, vs, m);
  }
  if (f.rfind("file", 0) == 0) {
    const std::string path = trim(f.substr(4));
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open sample file " + path);
    std::vector<double> xs, vs;
    double x, v;
    while (in >> x >> v) {
      xs.push_back(x);
      vs.push_back(v);
    }
    if (xs.size() < 2) throw ValidationError("config: sample file needs at least 2 rows");
    return interp_onto_grid(xs, vs, m);
  }
  throw ValidationError("config: unknown field form '" + form + "'");
}

}  // namespace

void resolve_scenario_fields(Scenario& sc) {
  if (sc.mode == SimMode::coupled) {
    sc.a_samples.clear();
    sc.y0.clear();
    return;
  }
  sc.a_samples = resolve_field_form(sc.a_form, sc.m);
  sc.y0 = resolve_field_form(sc.y0_form, sc.m);
}

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::string section;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("config: expected 'key = value': " + line);
    kv[section + "." + trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  auto has = [&](const std::string& k) { return kv.count(k) > 0; };
  auto str = [&](const std::string& k, const std::string& dflt) {
    return has(k) ? kv[k] : dflt;
  };
  auto num = [&](const std::string& k, double dflt) { return has(k) ? std::stod(kv[k]) : dflt; };

  RunConfig cfg;
  Scenario& sc = cfg.scenario;
  sc.name = str("scenario.name", "custom");
  sc.mode = sim_mode_from_string(str("scenario.mode", "open"));
  sc.m = int(num("scenario.nodes", 129));
  sc.dt = num("scenario.dt", 1e-4);
  sc.horizon = num("scenario.T", 1.0);
  sc.c = num("scenario.c", 0.0);
  sc.sigma = num("scenario.sigma", 0.0);
  const int n = int(num("scenario.exo_dim", 0));
  sc.A = Matrix::Zero(n, n);
  sc.C = RowVector::Zero(n);
  sc.L = Vector::Zero(n);
  sc.xi0 = Vector::Zero(n);
  sc.eta0 = Vector::Zero(n);
  if (n > 0) {
    const auto a = parse_bracket_list(str("scenario.A", "[]"));
    if (int(a.size()) != n * n) throw ValidationError("config: A needs exo_dim^2 entries");
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) sc.A(r, c) = a[std::size_t(r) * n + c];
    const auto cr = parse_bracket_list(str("scenario.C", "[]"));
    const auto lr = parse_bracket_list(str("scenario.L", "[]"));
    const auto x0 = parse_bracket_list(str("scenario.xi0", "[]"));
    if (int(cr.size()) != n || int(lr.size()) != n || int(x0.size()) != n)
      throw ValidationError("config: C, L, xi0 need exo_dim entries");
    for (int i = 0; i < n; ++i) {
      sc.C(i) = cr[i];
      sc.L(i) = lr[i];
      sc.xi0(i) = x0[i];
    }
    if (has("scenario.eta0")) {
      const auto e0 = parse_bracket_list(kv["scenario.eta0"]);
      if (int(e0.size()) != n) throw ValidationError("config: eta0 needs exo_dim entries");
      for (int i = 0; i < n; ++i) sc.eta0(i) = e0[i];
    }
  }
  sc.Z0 = num("scenario.Z0", 0.0);
  sc.a_form = str("scenario.a", "const 0");
  sc.y0_form = str("scenario.y0", "const 0");
  sc.snapshot_stride = int(num("scenario.snapshots", 0));
  resolve_scenario_fields(sc);

  cfg.command = str("run.command", "simulate");
  cfg.seed = std::uint64_t(std::stoull(str("run.seed", "1")));
  cfg.paths = int(num("run.paths", 1));
  cfg.record_stride = int(num("run.record_stride", 0));
  cfg.out_dir = str("run.out", ".");
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_text(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  std::string s;
  s += "# heatctl manifest v1\n";
  s += "[scenario]\n";
  s += "name = " + sc.name + "\n";
  s += "mode = " + to_string(sc.mode) + "\n";
  s += "nodes = " + std::to_string(sc.m) + "\n";
  s += "dt = " + format_double(sc.dt) + "\n";
  s += "T = " + format_double(sc.horizon) + "\n";
  s += "c = " + format_double(sc.c) + "\n";
  s += "sigma = " + format_double(sc.sigma) + "\n";
  const int n = sc.exo_dim();
  s += "exo_dim = " + std::to_string(n) + "\n";
  if (n > 0) {
    std::vector<double> a(std::size_t(n) * n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) a[std::size_t(r) * n + c] = sc.A(r, c);
    s += "A = " + to_bracket_list(a) + "\n";
    s += "C = " + to_bracket_list({sc.C.data(), std::size_t(n)}) + "\n";
    s += "L = " + to_bracket_list({sc.L.data(), std::size_t(n)}) + "\n";
    s += "xi0 = " + to_bracket_list({sc.xi0.data(), std::size_t(n)}) + "\n";
  }
  if (sc.mode == SimMode::coupled) {
    s += "Z0 = " + format_double(sc.Z0) + "\n";
    s += "eta0 = " + to_bracket_list({sc.eta0.data(), std::size_t(n)}) + "\n";
  }
  s += "a = " + sc.a_form + "\n";
  s += "y0 = " + sc.y0_form + "\n";
  s += "snapshots = " + std::to_string(sc.snapshot_stride) + "\n";
  s += "[run]\n";
  s += "command = " + cfg.command + "\n";
  s += "seed = " + std::to_string(cfg.seed) + "\n";
  s += "paths = " + std::to_string(cfg.paths) + "\n";
  s += "record_stride = " + std::to_string(cfg.record_stride) + "\n";
  s += "out = " + cfg.out_dir.string() + "\n";
  return s;
}

void write_manifest(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path.string());
  out << config_to_text(cfg);
}

void write_kv_file(const std::vector<std::pair<std::string, std::string>>& kv,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_kv_file: cannot open " + path.string());
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + path.string());
  out << "t,norm_sq,y1,Z,w,w_hat,u\n";
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    out << format_double(traj.t[k]) << "," << format_double(traj.norm_sq[k]) << ","
        << format_double(traj.y1[k]) << "," << format_double(traj.Z[k]) << ","
        << format_double(traj.w[k]) << "," << format_double(traj.w_hat[k]) << ","
        << format_double(traj.u[k]) << "\n";
  }
}

void write_snapshots_csv(const Trajectory& traj, int m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_snapshots_csv: cannot open " + path.string());
  out << "t,x,y\n";
  for (std::size_t s = 0; s < traj.snapshot_t.size(); ++s)
    for (int i = 0; i < m; ++i)
      out << format_double(traj.snapshot_t[s]) << "," << format_double(double(i) / (m - 1)) << ","
          << format_double(traj.snapshot_y[s][std::size_t(i)]) << "\n";
}

void write_coupled_csv(const CoupledTrajectory& traj, std::span<const double> w_series,
                       const RowVector& C, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_coupled_csv: cannot open " + path.string());
  const int n = int(traj.eta.cols());
  out << "t,Z";
  for (int i = 1; i <= n; ++i) out << ",eta_" << i;
  out << ",w,w_hat\n";
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    out << format_double(traj.t[k]) << "," << format_double(traj.Z[k]);
    for (int i = 0; i < n; ++i) out << "," << format_double(traj.eta(Eigen::Index(k), i));
    const double w = k < w_series.size() ? w_series[k] : 0.0;
    const double ceta = (C * traj.eta.row(Eigen::Index(k)).transpose()).value();
    out << "," << format_double(w) << "," << format_double(w + ceta) << "\n";
  }
}

void write_ensemble_csv(const Ensemble& ens, double amplitude, double rate, bool has_bound,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_ensemble_csv: cannot open " + path.string());
  out << "t,mean_norm_sq,se,bound_value\n";
  for (std::size_t k = 0; k < ens.t.size(); ++k) {
    out << format_double(ens.t[k]) << "," << format_double(ens.mean[k]) << ","
        << format_double(ens.se[k]) << ",";
    if (has_bound)
      out << format_double(amplitude * std::exp(-rate * ens.t[k]));
    else
      out << "nan";
    out << "\n";
  }
}

}  // namespace heatctl
