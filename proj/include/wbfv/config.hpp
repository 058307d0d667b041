#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wbfv/flux.hpp"
#include "wbfv/free_energy.hpp"
#include "wbfv/reconstruction.hpp"

namespace wbfv {

struct ConfigError : Error {
  using Error::Error;
};

struct GridSpec {
  double a = 0.0;
  double b = 1.0;
  std::size_t cells = 0;
  bool operator==(const GridSpec&) const = default;
};

struct DampingSpec {
  double gamma = 1.0;
  bool cucker_smale = false;
  bool operator==(const DampingSpec&) const = default;
};

struct SchemeSpec {
  int order = 1;
  FluxKind flux = FluxKind::llf;
  InterfaceRule rule = InterfaceRule::max;
  HReconstruction h_reconstruction = HReconstruction::composite;
  double cfl = 0.7;
  double eps_vac = kVacuumDensity;
  bool kinetic_dt_cap = true;
  bool force = false;
  bool operator==(const SchemeSpec&) const = default;
};

enum class InitialFamily { cosine_bump, gaussian_sum, travelling_gaussian, steady_state, uniform, file, scenario };
enum class MomentumProfile { zero, sine, velocity, velocity_sine };

struct InitialSpec {
  InitialFamily family = InitialFamily::uniform;
  double mass = 1.0;
  // cosine_bump: floor + amplitude cos(wavenumber x)
  // gaussian_sum: floor + sum_k weight_k exp(-rate_k (x - center_k)^2)
  double floor = 0.0;
  double amplitude = 1.0;
  double wavenumber = 1.0;
  std::vector<double> centers, rates, weights;
  // travelling_gaussian: mass * N(x; center + velocity t, 1)
  double center = 0.0;
  // sine: momentum = amplitude sin(k x); velocity_sine: u = amplitude sin(k x); velocity: u = velocity
  MomentumProfile momentum = MomentumProfile::zero;
  double momentum_amplitude = 0.0;
  double momentum_wavenumber = 1.0;
  double velocity = 0.0;
  std::string path;  // file: snapshot CSV; scenario: config whose final state is used
  bool operator==(const InitialSpec&) const = default;
};

enum class ExactSolution { none, travelling_gaussian };
enum class ErrorMask { none, support };

struct RunSpec {
  std::string name;
  double t_end = 0.0;
  double snapshot_interval = 0.0;
  bool stop_at_steady = false;
  double steady_velocity_tol = 1e-10;
  double steady_spread_tol = 1e-10;
  double steady_density_floor = kVacuumDensity;
  std::size_t max_steps = 100000000;
  // convergence study
  std::vector<std::size_t> study_cells{50, 100, 200, 400};
  std::size_t reference_cells = 25600;
  double study_time = 0.3;
  ExactSolution exact = ExactSolution::none;
  ErrorMask mask = ErrorMask::none;
  double mask_threshold = 1e-3;
  std::size_t mask_margin = 3;
  // continuation
  std::vector<double> sigmas;
  double continuation_time = 200.0;
  double narrowing_threshold = 1e-8;
  // report: first time a single cell holds this fraction of the mass
  double concentration_fraction = 0.0;
  bool operator==(const RunSpec&) const = default;
};

struct ScenarioConfig {
  GridSpec grid;
  FreeEnergyModel model;
  DampingSpec damping;
  SchemeSpec scheme;
  InitialSpec initial;
  RunSpec run;
  std::string base_dir;  // directory of the config file, for relative paths (not serialized)

  bool operator==(const ScenarioConfig& o) const {
    return grid == o.grid && model == o.model && damping == o.damping && scheme == o.scheme &&
           initial == o.initial && run == o.run;
  }
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);
// "section.key=value"
void apply_override(ScenarioConfig& cfg, const std::string& assignment);
void apply_overrides(ScenarioConfig& cfg, const std::vector<std::string>& assignments);

}  // namespace wbfv
