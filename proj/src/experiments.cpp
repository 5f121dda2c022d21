#include "heatctl/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>

#include "heatctl/config.hpp"
#include "heatctl/errors.hpp"

namespace heatctl {

namespace {

int resolve_threads(int requested, int n_paths) {
  int t = requested;
  if (t <= 0) {
    if (const char* env = std::getenv("HEATCTL_THREADS")) t = std::atoi(env);
  }
  if (t <= 0) t = int(std::thread::hardware_concurrency());
  if (t <= 0) t = 1;
  return std::min(t, std::max(1, n_paths));
}

// slope of log|X| over the tail window; -inf for identically-zero tails
double tail_slope(std::span<const double> t, std::span<const double> value_sq, double t_lo,
                  double t_hi) {
  bool all_zero = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (value_sq[i] > 0.0) all_zero = false;
    if (value_sq[i] < 0.0 || !std::isfinite(value_sq[i]))
      return std::numeric_limits<double>::quiet_NaN();
  }
  if (all_zero) return -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  std::vector<double> ts;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (value_sq[i] <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    ts.push_back(t[i]);
    logs.push_back(0.5 * std::log(value_sq[i]));
  }
  if (ts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double st = 0, sl = 0, stt = 0, stl = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sl += logs[i];
    stt += ts[i] * ts[i];
    stl += ts[i] * logs[i];
  }
  const double nn = double(ts.size());
  return (nn * stl - st * sl) / (nn * stt - st * st);
}

}  // namespace

double fit_decay(std::span<const double> times, std::span<const double> values, double t_lo,
                 double t_hi) {
  if (times.size() != values.size()) throw ValidationError("fit_decay: size mismatch");
  double st = 0, sl = 0, stt = 0, stl = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(values[i] > 0.0)) throw ValidationError("fit_decay: nonpositive value in window");
    const double lg = std::log(values[i]);
    st += times[i];
    sl += lg;
    stt += times[i] * times[i];
    stl += times[i] * lg;
    ++count;
  }
  if (count < 2) throw ValidationError("fit_decay: fewer than two samples in window");
  const double nn = double(count);
  return (nn * stl - st * sl) / (nn * stt - st * st);
}

Ensemble run_ensemble(const Scenario& sc, int n_paths, std::uint64_t master_seed,
                      int record_stride, int threads, std::vector<double> w_tilde_series) {
  if (n_paths < 2) throw ValidationError("run_ensemble: need at least 2 paths");
  const Simulator sim(sc, std::move(w_tilde_series));
  const std::size_t steps = sim.steps();
  int stride = record_stride;
  if (stride <= 0) stride = int(std::max<std::size_t>(1, (steps + 1999) / 2000));

  Ensemble ens;
  ens.scenario_name = sc.name;
  ens.mode = sc.mode;
  ens.n_paths = n_paths;
  ens.master_seed = master_seed;
  ens.record_stride = stride;
  ens.t = sim.record_times(stride);
  const std::size_t nrec = ens.t.size();

  struct PathResult {
    std::vector<double> value, west;
    bool aborted = false;
  };
  std::vector<PathResult> results(n_paths);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_paths) return;
      try {
        PathSeries s = sim.run_series(derive_stream_seed(master_seed, std::uint64_t(i)), stride);
        results[i].value = std::move(s.value);
        results[i].west = std::move(s.west);
      } catch (const NumericalAbort&) {
        results[i].aborted = true;
      }
    }
  };
  const int nthreads = resolve_threads(threads, n_paths);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // deterministic reduction in path-index order, compensated sums
  std::vector<double> sum(nrec, 0.0), comp(nrec, 0.0);
  std::vector<double> sum2(nrec, 0.0), comp2(nrec, 0.0);
  std::vector<double> sumw(nrec, 0.0), compw(nrec, 0.0);
  auto kahan = [](std::vector<double>& s, std::vector<double>& c, std::size_t j, double v) {
    const double y = v - c[j];
    const double t = s[j] + y;
    c[j] = (t - s[j]) - y;
    s[j] = t;
  };
  int completed = 0;
  const double t_hi = sc.horizon;
  const double t_lo = 0.5 * sc.horizon;
  for (int i = 0; i < n_paths; ++i) {
    if (results[i].aborted) {
      ++ens.aborts;
      continue;
    }
    ++completed;
    const auto& v = results[i].value;
    for (std::size_t j = 0; j < nrec; ++j) {
      kahan(sum, comp, j, v[j]);
      kahan(sum2, comp2, j, v[j] * v[j]);
      kahan(sumw, compw, j, results[i].west[j]);
    }
    ens.tail_slopes.push_back(tail_slope(ens.t, v, t_lo, t_hi));
  }
  if (completed < 2) throw NumericalAbort("run_ensemble: too few completed paths", 0);
  if (double(ens.aborts) > 0.001 * double(n_paths))
    throw NumericalAbort("run_ensemble: abort fraction exceeds 0.1%", ens.aborts);

  ens.mean.resize(nrec);
  ens.se.resize(nrec);
  ens.mean_west.resize(nrec);
  for (std::size_t j = 0; j < nrec; ++j) {
    const double nn = double(completed);
    ens.mean[j] = sum[j] / nn;
    const double var = std::max(0.0, (sum2[j] - nn * ens.mean[j] * ens.mean[j]) / (nn - 1.0));
    ens.se[j] = std::sqrt(var / nn);
    ens.mean_west[j] = sumw[j] / nn;
  }
  ens.initial_mean = ens.mean.empty() ? 0.0 : ens.mean.front();
  return ens;
}

namespace {

BoundReport margins_against(const Ensemble& ens, double amplitude, double rate,
                            double slope_threshold) {
  BoundReport r;
  r.certified = true;
  r.theta_star = rate;
  r.gamma_star = amplitude;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ens.t.size(); ++j) {
    const double bound = amplitude * std::exp(-rate * ens.t[j]);
    double margin;
    if (ens.se[j] > 0.0)
      margin = (ens.mean[j] - bound) / ens.se[j];
    else
      margin = ens.mean[j] <= bound ? 0.0 : std::numeric_limits<double>::infinity();
    worst = std::max(worst, margin);
  }
  r.max_margin = worst;
  std::size_t ok = 0;
  for (double s : ens.tail_slopes)
    if (s <= slope_threshold) ++ok;
  r.as_pass_fraction =
      ens.tail_slopes.empty() ? 1.0 : double(ok) / double(ens.tail_slopes.size());
  r.pass = r.max_margin <= 3.0;
  return r;
}

}  // namespace

BoundReport check_bound(const Ensemble& ens, const GainCertificate& cert,
                        const GammaConstants& gammas) {
  if (ens.mode == SimMode::coupled)
    throw ValidationError("check_bound: field ensemble expected (use check_coupled_bound)");
  return margins_against(ens, gammas.gamma_star, cert.theta_star,
                         -cert.theta_star / 2.0 + 0.1);
}

BoundReport check_coupled_bound(const Ensemble& ens, const GainCertificate& cert, double E0) {
  if (ens.mode != SimMode::coupled)
    throw ValidationError("check_coupled_bound: coupled ensemble expected");
  const double amplitude = cert.lambda_max / cert.lambda_min * E0;
  return margins_against(ens, amplitude, cert.rate_Ze, -cert.rate_Ze / 2.0 + 0.1);
}

BoundReport uncertified_report() {
  BoundReport r;
  r.certified = false;
  r.pass = false;
  return r;
}

Scenario scenario_preset(const std::string& name) {
  const double pi = std::numbers::pi;
  Scenario sc;
  sc.A = Matrix{{0.0, 2.0}, {-2.0, 0.0}};
  sc.C = RowVector{{1.0, 0.0}};
  sc.L = Vector{{-5.0, -1.0}};
  sc.c = 1.02;
  sc.sigma = 0.1;
  sc.m = 129;
  sc.name = name;

  if (name == "section4") {
    sc.mode = SimMode::closed;
    sc.dt = 1e-4;
    sc.horizon = 3.0;
    sc.xi0 = Vector{{1.0, 0.0}};  // unit-amplitude disturbance (toolkit default)
    sc.a_form = "const " + format_double(4.0 * pi * pi + 1.005);
    sc.y0_form = "cos2pix";
  } else if (name == "remark2") {
    sc.mode = SimMode::open;
    sc.dt = 1e-4;
    sc.horizon = 1.0;
    sc.xi0 = Vector{{0.0, 0.0}};  // w == 0: uncontrolled growth study
    sc.a_form = "const " + format_double(4.0 * pi * pi + 1.005);
    sc.y0_form = "cos2pix";
  } else if (name == "coupledZeta") {
    sc.mode = SimMode::coupled;
    sc.dt = 1e-3;
    sc.horizon = 2.0;
    sc.xi0 = Vector{{1.0, 0.0}};
    sc.Z0 = 0.0;                  // toolkit defaults mirroring the closed-loop start
    sc.eta0 = Vector{{-1.0, 0.0}};
    sc.a_form = "const " + format_double(4.0 * pi * pi + 1.005);
    sc.y0_form = "const 0";
  } else {
    throw ValidationError("scenario_preset: unknown preset '" + name + "'");
  }
  resolve_scenario_fields(sc);
  return sc;
}

GammaConstants scenario_gammas(const Simulator& sim) {
  const Scenario& sc = sim.scenario();
  if (sc.mode != SimMode::closed || !sim.certificate() || !sim.transform())
    throw ValidationError("scenario_gammas: closed-loop simulator required");
  const TransformPair& tp = *sim.transform();
  const std::vector<double> z0 = apply_forward(tp, sc.y0);
  const double Z0 = sim.initial_Z();
  const auto eta0 = sim.initial_eta();
  double eta0_sq = 0.0, ceta0 = 0.0;
  for (std::size_t i = 0; i < eta0.size(); ++i) {
    eta0_sq += eta0[i] * eta0[i];
    ceta0 += sc.C(Eigen::Index(i)) * eta0[i];
  }
  std::vector<double> beta0_sq(z0.size());
  for (std::size_t i = 0; i < z0.size(); ++i) {
    const double x = double(i) / (sc.m - 1);
    const double b = z0[i] + 0.5 * x * x * ceta0;
    beta0_sq[i] = b * b;
  }
  const double Ebeta0 = trapezoid(beta0_sq, 1.0 / (sc.m - 1));
  return gamma_constants(*sim.certificate(), Z0 * Z0, eta0_sq, Ebeta0, tp.inverse_kernel_max_sq);
}

std::vector<std::pair<std::string, std::string>> bound_report_kv(const BoundReport& r) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("certified", r.certified ? "1" : "0");
  if (!r.certified) {
    kv.emplace_back("verdict", "uncertified");
    return kv;
  }
  kv.emplace_back("theta_star", format_double(r.theta_star));
  kv.emplace_back("gamma_star", format_double(r.gamma_star));
  kv.emplace_back("max_margin", format_double(r.max_margin));
  kv.emplace_back("as_pass_fraction", format_double(r.as_pass_fraction));
  kv.emplace_back("verdict", r.pass ? "pass" : "fail");
  return kv;
}

}  // namespace heatctl
