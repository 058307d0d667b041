#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "wbfv/config.hpp"
#include "wbfv/diagnostics.hpp"
#include "wbfv/grid.hpp"
#include "wbfv/integrator.hpp"

namespace wbfv {

Grid build_grid(const ScenarioConfig& cfg);
SchemeConfig build_scheme(const ScenarioConfig& cfg);

// Cell averages of the configured initial condition. `file` and `scenario`
// families take density and momentum from their source, re-interpolated
// when the grids differ.
State build_initial_state(const ScenarioConfig& cfg, const Grid& g);

// exact cell averages of the travelling Gaussian at time t
std::vector<double> exact_density(const ScenarioConfig& cfg, const Grid& g, double t);

// Shape-preserving cubic Hermite interpolation of cell data onto new centres.
// Values outside the source range take the nearest end value.
std::vector<double> pchip_resample(std::span<const double> x, std::span<const double> y,
                                   std::span<const double> x_new);

struct Snapshot {
  std::vector<double> x;
  State state;
};
// reads the x, rho and momentum columns of a snapshot CSV
Snapshot read_snapshot_csv(const std::string& path);

struct PreservationRow {
  int order = 1;
  std::size_t cells = 0;
  double time = 0.0;
  double l1 = 0.0, linf = 0.0;
};

struct ConvergenceRow {
  int order = 1;
  std::size_t cells = 0;
  double dx = 0.0;
  double time = 0.0;
  double error = 0.0;
  double rate = std::numeric_limits<double>::quiet_NaN();  // first row: none
};

struct BranchRow {
  double sigma = 0.0;
  std::size_t cells = 0;
  double a = 0.0, b = 0.0;  // mesh used for this sigma
  double time = 0.0;
  std::size_t steps = 0;
  bool steady = false;
  double center_of_mass = 0.0;
};

struct RunReport {
  std::string id;
  std::vector<std::string> snapshot_paths;
  std::string timeseries_path, report_path, table_path;
  bool completed = true;
  std::string error;
  DiagnosticsRecord final;
  Monitors monitors;
  std::size_t steps = 0;
  bool reached_steady = false;
  double concentration_time = std::numeric_limits<double>::quiet_NaN();
  State final_state;
  std::vector<DiagnosticsRecord> history;
  std::vector<PreservationRow> preservation;
  std::vector<ConvergenceRow> convergence;
  std::vector<BranchRow> branch;

  bool ok() const;
};

struct OutputOptions {
  std::string dir;  // empty: nothing is written
  bool keep_history = true;
};

// WBFV_OUTPUT_DIR, or "wbfv_output" when unset
std::string output_dir_from_env();

RunReport run_scenario(const ScenarioConfig& cfg, const OutputOptions& out = {});
RunReport preservation_test(const ScenarioConfig& cfg, double t_end = 5.0, const OutputOptions& out = {});
// cells/ref/time default to the values in cfg.run; both scheme orders unless `orders` says otherwise
RunReport convergence_study(const ScenarioConfig& cfg, const OutputOptions& out = {},
                            std::vector<int> orders = {1, 2});
RunReport continuation_study(const ScenarioConfig& cfg, const OutputOptions& out = {});

}  // namespace wbfv
