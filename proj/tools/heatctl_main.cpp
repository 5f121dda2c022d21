#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "heatctl/config.hpp"
#include "heatctl/errors.hpp"
#include "heatctl/grid.hpp"

namespace fs = std::filesystem;
using namespace heatctl;

namespace {

struct CliFlags {
  std::string preset, config_path, out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> paths, nodes, snapshots, record_stride;
  std::optional<double> dt, horizon, sigma;
};

void add_common_flags(CLI::App* sub, CliFlags& f) {
  sub->add_option("--preset", f.preset, "scenario preset (section4, remark2, coupledZeta)");
  sub->add_option("--config", f.config_path, "path to a config/manifest file");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--paths", f.paths, "ensemble path count");
  sub->add_option("--dt", f.dt, "time step override");
  sub->add_option("--nodes", f.nodes, "spatial node count override");
  sub->add_option("--T", f.horizon, "horizon override");
  sub->add_option("--sigma", f.sigma, "noise intensity override");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--snapshots", f.snapshots, "field snapshot stride (0 = off)");
  sub->add_option("--record-stride", f.record_stride, "ensemble record stride (0 = auto)");
}

RunConfig resolve_config(const CliFlags& f, const std::string& command) {
  RunConfig cfg;
  if (!f.config_path.empty())
    cfg = parse_config_file(f.config_path);
  else if (!f.preset.empty())
    cfg.scenario = scenario_preset(f.preset);
  else
    throw ValidationError("either --preset or --config is required");

  cfg.command = command;
  if (f.seed) cfg.seed = *f.seed;
  if (f.paths) cfg.paths = *f.paths;
  if (f.record_stride) cfg.record_stride = *f.record_stride;
  cfg.out_dir = f.out;

  Scenario& sc = cfg.scenario;
  bool regrid = false;
  if (f.nodes) {
    sc.m = *f.nodes;
    regrid = true;
  }
  if (f.dt) sc.dt = *f.dt;
  if (f.horizon) sc.horizon = *f.horizon;
  if (f.sigma) sc.sigma = *f.sigma;
  if (f.snapshots) sc.snapshot_stride = *f.snapshots;
  if (regrid) resolve_scenario_fields(sc);
  sc.validate();
  return cfg;
}

PlantSpec plant_spec_of(const Scenario& sc) {
  return PlantSpec{sc.c, sc.sigma, sc.A, sc.C, sc.L, sc.a_samples};
}

void print_kv(const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) std::cout << k << "=" << v << "\n";
}

void prepare_out(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  write_manifest(cfg, cfg.out_dir / "manifest.cfg");
}

int cmd_kernel(const CliFlags& f) {
  RunConfig cfg = resolve_config(f, "kernel");
  prepare_out(cfg);
  const Scenario& sc = cfg.scenario;
  const fs::path cache = cfg.out_dir / "kernel.csv";

  std::optional<Kernel> k;
  bool cache_hit = false;
  if (fs::exists(cache)) {
    Kernel loaded = load_kernel_csv(cache);
    if (loaded.grid.n() == sc.m && loaded.c == sc.c && loaded.a_samples == sc.a_samples) {
      k = std::move(loaded);
      cache_hit = true;
    }
  }
  if (!k) {
    k = solve_kernel(sc.a_samples, sc.c, sc.m);
    save_kernel_csv(*k, cache);
  }
  const TransformPair tp = build_transform(*k);

  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("n", std::to_string(sc.m));
  kv.emplace_back("c", format_double(sc.c));
  kv.emplace_back("cache_hit", cache_hit ? "1" : "0");
  kv.emplace_back("k11", format_double(k->k11));
  kv.emplace_back("k_1_0", format_double(k->grid(sc.m - 1, 0)));
  double mx = 0.0;
  for (double v : k->grid.values()) mx = std::max(mx, std::abs(v));
  kv.emplace_back("max_abs_k", format_double(mx));
  kv.emplace_back("interior_residual", format_double(kernel_interior_residual(*k)));
  kv.emplace_back("inverse_kernel_max_sq", format_double(tp.inverse_kernel_max_sq));
  print_kv(kv);
  write_kv_file(kv, cfg.out_dir / "kernel_report.txt");
  return 0;
}

int cmd_certify(const CliFlags& f) {
  RunConfig cfg = resolve_config(f, "certify");
  prepare_out(cfg);
  GainCertificate cert = certify_gains(plant_spec_of(cfg.scenario));
  const auto kv = certificate_report(cert);
  print_kv(kv);
  write_kv_file(kv, cfg.out_dir / "certificate.txt");
  return 0;
}

int cmd_simulate(const CliFlags& f) {
  RunConfig cfg = resolve_config(f, "simulate");
  prepare_out(cfg);
  const Scenario& sc = cfg.scenario;

  if (sc.mode == SimMode::coupled) {
    const Simulator sim(sc);
    const BrownianPath path = brownian_path(cfg.seed, sc.dt, sim.steps());
    const CoupledTrajectory traj =
        simulate_coupled(sc.Z0, sc.eta0, plant_spec_of(sc), sc.dt, sc.horizon, path);
    write_coupled_csv(traj, sim.w_series(), sc.C, cfg.out_dir / "trajectory.csv");
    std::cout << "records=" << traj.t.size() << "\n";
    return 0;
  }

  const Simulator sim(sc);
  const Trajectory traj = sim.run(cfg.seed);
  write_trajectory_csv(traj, cfg.out_dir / "trajectory.csv");
  if (sc.snapshot_stride > 0) write_snapshots_csv(traj, sc.m, cfg.out_dir / "snapshots.csv");

  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("records", std::to_string(traj.t.size()));
  kv.emplace_back("initial_norm_sq", format_double(traj.norm_sq.front()));
  kv.emplace_back("final_norm_sq", format_double(traj.norm_sq.back()));
  print_kv(kv);
  return 0;
}

int cmd_mc(const CliFlags& f) {
  RunConfig cfg = resolve_config(f, "mc");
  prepare_out(cfg);
  const Scenario& sc = cfg.scenario;
  const int n_paths = std::max(2, cfg.paths);

  const Simulator sim(sc);  // validates certification for closed mode
  const Ensemble ens = run_ensemble(sc, n_paths, cfg.seed, cfg.record_stride);

  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("paths", std::to_string(n_paths));
  kv.emplace_back("aborts", std::to_string(ens.aborts));
  kv.emplace_back("initial_mean", format_double(ens.initial_mean));
  kv.emplace_back("final_mean", format_double(ens.mean.back()));
  kv.emplace_back("final_se", format_double(ens.se.back()));
  if (ens.initial_mean > 0.0)
    kv.emplace_back("final_ratio", format_double(ens.mean.back() / ens.initial_mean));

  int rc = 0;
  if (sc.mode == SimMode::closed) {
    const GainCertificate& cert = *sim.certificate();
    const GammaConstants g = scenario_gammas(sim);
    const BoundReport rep = check_bound(ens, cert, g);
    write_ensemble_csv(ens, g.gamma_star, cert.theta_star, true, cfg.out_dir / "ensemble.csv");
    const auto rkv = bound_report_kv(rep);
    kv.insert(kv.end(), rkv.begin(), rkv.end());
    write_kv_file(rkv, cfg.out_dir / "bound_report.txt");
    if (!rep.pass) rc = 1;
  } else if (sc.mode == SimMode::coupled) {
    if (sim.certificate()) {
      const GainCertificate& cert = *sim.certificate();
      const double E0 = sc.Z0 * sc.Z0 + sc.eta0.squaredNorm();
      const BoundReport rep = check_coupled_bound(ens, cert, E0);
      write_ensemble_csv(ens, cert.lambda_max / cert.lambda_min * E0, cert.rate_Ze, true,
                         cfg.out_dir / "ensemble.csv");
      const auto rkv = bound_report_kv(rep);
      kv.insert(kv.end(), rkv.begin(), rkv.end());
      write_kv_file(rkv, cfg.out_dir / "bound_report.txt");
      if (!rep.pass) rc = 1;
    } else {
      const auto rkv = bound_report_kv(uncertified_report());
      write_ensemble_csv(ens, 0.0, 0.0, false, cfg.out_dir / "ensemble.csv");
      kv.insert(kv.end(), rkv.begin(), rkv.end());
      write_kv_file(rkv, cfg.out_dir / "bound_report.txt");
    }
  } else {
    write_ensemble_csv(ens, 0.0, 0.0, false, cfg.out_dir / "ensemble.csv");
  }
  print_kv(kv);
  return rc;
}

int cmd_compare(const CliFlags& f) {
  RunConfig cfg = resolve_config(f, "compare");
  prepare_out(cfg);
  const int n_paths = std::max(2, cfg.paths);

  Scenario closed = cfg.scenario;
  closed.mode = SimMode::closed;
  Scenario open = cfg.scenario;
  open.mode = SimMode::open;

  const Ensemble ce = run_ensemble(closed, n_paths, cfg.seed, cfg.record_stride);
  const Ensemble oe = run_ensemble(open, n_paths, cfg.seed, cfg.record_stride);

  {
    std::ofstream out(cfg.out_dir / "compare.csv");
    out << "t,open_mean,open_se,closed_mean,closed_se\n";
    for (std::size_t k = 0; k < ce.t.size(); ++k)
      out << format_double(ce.t[k]) << "," << format_double(oe.mean[k]) << ","
          << format_double(oe.se[k]) << "," << format_double(ce.mean[k]) << ","
          << format_double(ce.se[k]) << "\n";
  }

  // open-loop growth probed at t = 1 (or the horizon when shorter)
  std::size_t i1 = oe.t.size() - 1;
  for (std::size_t k = 0; k < oe.t.size(); ++k)
    if (oe.t[k] >= 1.0 - 1e-12) {
      i1 = k;
      break;
    }
  const bool open_grows = oe.mean[i1] > oe.initial_mean;
  const bool closed_decays = ce.mean.back() <= 0.05 * ce.initial_mean;

  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("paths", std::to_string(n_paths));
  kv.emplace_back("open_initial", format_double(oe.initial_mean));
  kv.emplace_back("open_at_probe", format_double(oe.mean[i1]));
  kv.emplace_back("probe_time", format_double(oe.t[i1]));
  kv.emplace_back("closed_initial", format_double(ce.initial_mean));
  kv.emplace_back("closed_final", format_double(ce.mean.back()));
  kv.emplace_back("open_grows", open_grows ? "1" : "0");
  kv.emplace_back("closed_decays", closed_decays ? "1" : "0");
  print_kv(kv);
  write_kv_file(kv, cfg.out_dir / "compare_report.txt");
  return (open_grows && closed_decays) ? 0 : 1;
}

int cmd_scenario(const CliFlags& f) {
  RunConfig cfg = resolve_config(f, "scenario");
  std::cout << config_to_text(cfg);
  if (f.out != ".") {
    fs::create_directories(cfg.out_dir);
    write_manifest(cfg, cfg.out_dir / "scenario.cfg");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary control toolkit for the anti-stable stochastic heat equation"};
  app.require_subcommand(1);

  CliFlags flags;
  auto* kernel = app.add_subcommand("kernel", "solve and cache the backstepping kernel");
  auto* certify = app.add_subcommand("certify", "print the gain certificate");
  auto* simulate = app.add_subcommand("simulate", "run one path, write trajectory CSV");
  auto* mc = app.add_subcommand("mc", "run an ensemble and check the decay bounds");
  auto* compare = app.add_subcommand("compare", "open vs closed loop on common seeds");
  auto* scenario = app.add_subcommand("scenario", "print a fully resolved preset");
  for (auto* sub : {kernel, certify, simulate, mc, compare, scenario})
    add_common_flags(sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 64;
  }

  try {
    if (kernel->parsed()) return cmd_kernel(flags);
    if (certify->parsed()) return cmd_certify(flags);
    if (simulate->parsed()) return cmd_simulate(flags);
    if (mc->parsed()) return cmd_mc(flags);
    if (compare->parsed()) return cmd_compare(flags);
    if (scenario->parsed()) return cmd_scenario(flags);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const CertificationError& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return 2;
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 64;
}
