#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "heatctl/dynamics.hpp"
#include "heatctl/experiments.hpp"
#include "heatctl/scenario.hpp"
#include "heatctl/spde.hpp"

namespace heatctl {

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

/// Resolved run description; every run writes one of these back out as its
/// manifest so outputs are reproducible from the file alone.
struct RunConfig {
  Scenario scenario;
  std::string command = "simulate";
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 1;
  int paths = 1;
  int record_stride = 0;  ///< 0 = auto
};

/// Line-oriented `key = value` with [section] headers; matrices are
/// bracketed row-major lists.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);
std::string config_to_text(const RunConfig& cfg);
void write_manifest(const RunConfig& cfg, const std::filesystem::path& path);

void write_kv_file(const std::vector<std::pair<std::string, std::string>>& kv,
                   const std::filesystem::path& path);

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
void write_snapshots_csv(const Trajectory& traj, int m, const std::filesystem::path& path);
void write_coupled_csv(const CoupledTrajectory& traj, std::span<const double> w_series,
                       const RowVector& C, const std::filesystem::path& path);

/// `t,mean_norm_sq,se,bound_value`; bound_value is nan when no certificate
/// applies.
void write_ensemble_csv(const Ensemble& ens, double amplitude, double rate, bool has_bound,
                        const std::filesystem::path& path);

}  // namespace heatctl
