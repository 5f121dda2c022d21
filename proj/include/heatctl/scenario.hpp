#pragma once

#include <string>
#include <vector>

#include "heatctl/linalg.hpp"

namespace heatctl {

enum class SimMode { open, closed, target, coupled };

std::string to_string(SimMode m);
SimMode sim_mode_from_string(const std::string& s);

/// Complete experiment description. Presets fill every field; the config
/// parser builds one from a manifest so any run is reproducible from the
/// file alone.
struct Scenario {
  std::string name = "custom";
  SimMode mode = SimMode::open;

  int m = 129;           ///< spatial nodes
  double dt = 1e-4;
  double horizon = 1.0;  ///< T

  double c = 0.0;
  double sigma = 0.0;

  Matrix A;
  RowVector C;
  Vector L;
  Vector xi0;

  /// Declarative forms ("const <v>", "cos2pix", "cospix", "list [..]",
  /// "file <path>") from which the sampled fields are resolved; manifests
  /// store these so a run is reproducible at any grid.
  std::string a_form = "const 0";
  std::string y0_form = "const 0";
  std::vector<double> a_samples;  ///< reaction coefficient on the m-node grid
  std::vector<double> y0;         ///< initial profile on the m-node grid

  double Z0 = 0.0;  ///< coupled-mode initial data
  Vector eta0;

  int snapshot_stride = 0;  ///< 0 = no field snapshots

  int exo_dim() const { return int(A.rows()); }
  void validate() const;  ///< grids, dt bound, dimension consistency
};

/// Fill a_samples and y0 from their declarative forms at the current grid;
/// "list"/"file" data is linearly interpolated onto the m nodes.
void resolve_scenario_fields(Scenario& sc);

}  // namespace heatctl

