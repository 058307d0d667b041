#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "wbfv/diagnostics.hpp"
#include "wbfv/flux.hpp"
#include "wbfv/free_energy.hpp"
#include "wbfv/grid.hpp"
#include "wbfv/reconstruction.hpp"

namespace wbfv {

struct SchemeConfig {
  int order = 1;
  FluxKind flux = FluxKind::llf;
  InterfaceRule rule = InterfaceRule::max;
  HReconstruction h_reconstruction = HReconstruction::composite;
  double cfl = 0.7;
  double gamma = 1.0;
  CommunicationFunction psi;  // empty: no alignment
  double eps_vac = kVacuumDensity;
  bool kinetic_dt_cap = true;

  // force skips the flux/pressure pairing rule
  void validate(const FreeEnergyModel& model, bool force = false) const;
};

struct Rhs {
  std::vector<double> rho, mom;
};

struct PositivityError : Error {
  using Error::Error;
};

using RhsFunction = std::function<Rhs(const State&)>;

// Shu-Osher three-stage update. Densities in (-1e-12, 0) are clamped to zero,
// lower values throw. min_density receives the lowest pre-clamp density.
State ssp_rk3(const State& s, double dt, const RhsFunction& L, double* min_density = nullptr);

class Scheme {
 public:
  Scheme(const Grid& g, const FreeEnergyModel& model, const SchemeConfig& cfg, bool force = false);

  const Grid& grid() const { return grid_; }
  const FreeEnergyModel& model() const { return field_.model(); }
  const SchemeConfig& config() const { return cfg_; }
  const PotentialField& field() const { return field_; }
  const DampingOperator& damping() const { return damping_; }

  Rhs rhs(const State& s) const;
  double cfl_dt(const State& s, double t_end) const;
  State step(const State& s, double dt, double* min_density = nullptr) const;
  DiagnosticsRecord diagnose(const State& s, bool per_cell = false) const;

 private:
  Grid grid_;
  SchemeConfig cfg_;
  PotentialField field_;
  DampingOperator damping_;
};

Rhs semidiscrete_rhs(const Grid& g, const State& s, const FreeEnergyModel& model, const SchemeConfig& cfg);
double cfl_dt(const Grid& g, const State& s, const FreeEnergyModel& model, const SchemeConfig& cfg,
              double t_end);
State ssp_rk3_step(const Grid& g, const State& s, const FreeEnergyModel& model, const SchemeConfig& cfg,
                   double dt);

struct RunOptions {
  double t_end = 0.0;
  double snapshot_interval = 0.0;  // <= 0: initial and final state only
  bool record_history = true;
  std::size_t max_steps = std::numeric_limits<std::size_t>::max();
  // stop once max|u| and the variation spread both drop below tolerance
  bool stop_at_steady = false;
  double steady_velocity_tol = 1e-10;
  double steady_spread_tol = 1e-10;
  double steady_density_floor = kVacuumDensity;
  std::size_t steady_check_every = 10;
  double energy_slack = 1e-10;
  std::function<void(const State&)> on_step;
  // checked after every step; true ends the run early
  std::function<bool(const State&)> stop_if;
};

struct Monitors {
  double initial_mass = 0.0;
  double max_mass_drift = 0.0;  // relative
  double min_density = 0.0;     // before clamping
  double max_energy_increase = 0.0;
  double max_dissipation = -std::numeric_limits<double>::infinity();
  bool energy_tracked = false;

  bool mass_ok(double tol = 1e-12) const { return max_mass_drift <= tol; }
  bool positivity_ok() const { return min_density >= -1e-12; }
  bool energy_ok(double slack = 1e-10) const { return !energy_tracked || max_energy_increase <= slack; }
  bool dissipation_ok() const { return !energy_tracked || max_dissipation <= 0.0; }
};

struct Trajectory {
  std::vector<State> snapshots;
  std::vector<DiagnosticsRecord> history;  // one per step, scalars only
  std::size_t steps = 0;
  bool reached_steady = false;
  bool stopped = false;  // stop_if fired
  Monitors monitors;
  const State& final_state() const { return snapshots.back(); }
};

struct RunError : Error {
  double time;
  RunError(const std::string& what, double t) : Error(what), time(t) {}
};

Trajectory run(const Scheme& scheme, const State& s0, const RunOptions& opt);
// Fills `out` as it goes, so a caller catching RunError keeps the partial run.
void run_into(const Scheme& scheme, const State& s0, const RunOptions& opt, Trajectory& out);
Trajectory run(const Grid& g, const State& s0, const FreeEnergyModel& model, const SchemeConfig& cfg,
               double t_end);

}  // namespace wbfv
