#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heatctl/certify.hpp"
#include "heatctl/scenario.hpp"
#include "heatctl/spde.hpp"

namespace heatctl {

/// Cross-path statistics of a scenario: per-time mean of the squared norm
/// with its standard error, the mean |w_hat - w|, and per-path tail slopes.
struct Ensemble {
  std::string scenario_name;
  SimMode mode = SimMode::open;
  int n_paths = 0;
  std::uint64_t master_seed = 0;
  int record_stride = 1;
  std::vector<double> t;
  std::vector<double> mean;       ///< E ||y||^2 (field) or E[|Z|^2+|eta|^2] (coupled)
  std::vector<double> se;         ///< standard error of the mean
  std::vector<double> mean_west;  ///< E |w_hat - w|
  std::vector<double> tail_slopes;  ///< per-path slope of log|X| over the last half horizon
  int aborts = 0;
  double initial_mean = 0.0;
};

/// N independent paths with seeds derived from (master_seed, i); aggregation
/// is performed in path order so results do not depend on scheduling.
/// record_stride 0 picks a stride with at most ~2000 records; threads 0 uses
/// HEATCTL_THREADS or the hardware count. Fails when > 0.1% of paths abort.
Ensemble run_ensemble(const Scenario& sc, int n_paths, std::uint64_t master_seed,
                      int record_stride = 0, int threads = 0,
                      std::vector<double> w_tilde_series = {});

/// Least-squares slope of log(values) over the window [t_lo, t_hi].
double fit_decay(std::span<const double> times, std::span<const double> values, double t_lo,
                 double t_hi);

struct BoundReport {
  double theta_star = 0.0;   ///< decay rate used
  double gamma_star = 0.0;   ///< amplitude used
  double max_margin = 0.0;   ///< max over time of (mean - bound)/SE
  double as_pass_fraction = 0.0;  ///< share of paths with tail slope <= -rate/2 + 0.1
  bool certified = false;
  bool pass = false;         ///< all margins <= 3
};

/// Closed-loop mean-square bound E|y|^2 <= Gamma* e^{-theta* t} with 3-SE
/// slack, plus the per-path almost-sure rate check at -theta*/2 + 0.1.
BoundReport check_bound(const Ensemble& ens, const GainCertificate& cert,
                        const GammaConstants& gammas);

/// Same machinery against the coupled-system bound
/// (lambda_max/lambda_min) E0 e^{-rate_Ze t}.
BoundReport check_coupled_bound(const Ensemble& ens, const GainCertificate& cert, double E0);

/// Reports for a scenario whose noise exceeds the certified tolerance are
/// marked uncertified and carry no verdict.
BoundReport uncertified_report();

/// Presets: "section4", "remark2", "coupledZeta".
Scenario scenario_preset(const std::string& name);

/// Gamma constants from a closed-loop simulator's (deterministic) initial
/// data: EZ0^2, |eta0|^2, the beta(x,0) moment and max l^2 all come from the
/// scenario itself.
GammaConstants scenario_gammas(const Simulator& sim);

std::vector<std::pair<std::string, std::string>> bound_report_kv(const BoundReport& r);

}  // namespace heatctl
