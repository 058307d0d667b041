#include "wbfv/integrator.hpp"

#include <cstdio>

#include <algorithm>
#include <cmath>

namespace wbfv {

void SchemeConfig::validate(const FreeEnergyModel& model, bool force) const {
  if (order != 1 && order != 2) throw Error("scheme order must be 1 or 2");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw Error("cfl must lie in (0, 1]");
  if (!(gamma >= 0.0)) throw Error("gamma must be >= 0");
  if (!(eps_vac > 0.0)) throw Error("eps_vac must be > 0");
  if (!force && flux == FluxKind::llf && model.pressure.admits_vacuum())
    throw Error("LLF flux with a power-law pressure cannot handle vacuum; use flux = kinetic (or force = true)");
}

State ssp_rk3(const State& s, double dt, const RhsFunction& L, double* min_density) {
  if (dt == 0.0) return s;
  if (!(dt > 0.0)) throw Error("ssp_rk3: dt must be positive");
  const std::size_t n = s.size();
  double lowest = std::numeric_limits<double>::infinity();
  auto clamp = [&](State& u) {
    for (std::size_t i = 0; i < n; ++i) {
      lowest = std::min(lowest, u.rho[i]);
      if (u.rho[i] < 0.0) {
        if (u.rho[i] < -1e-12)
          {
          char buf[96];
          std::snprintf(buf, sizeof buf, "positivity violation: density %.3e in cell %zu", u.rho[i], i);
          throw PositivityError(buf);
        }
        u.rho[i] = 0.0;
        u.mom[i] = 0.0;
      }
    }
  };
  // increment form of the convex combinations: exact identity when L = 0
  State u1 = s;
  {
    const Rhs k = L(s);
    for (std::size_t i = 0; i < n; ++i) {
      u1.rho[i] = s.rho[i] + dt * k.rho[i];
      u1.mom[i] = s.mom[i] + dt * k.mom[i];
    }
    clamp(u1);
  }
  State u2 = s;
  {
    const Rhs k = L(u1);
    for (std::size_t i = 0; i < n; ++i) {
      u2.rho[i] = s.rho[i] + 0.25 * ((u1.rho[i] - s.rho[i]) + dt * k.rho[i]);
      u2.mom[i] = s.mom[i] + 0.25 * ((u1.mom[i] - s.mom[i]) + dt * k.mom[i]);
    }
    clamp(u2);
  }
  State out = s;
  {
    const Rhs k = L(u2);
    for (std::size_t i = 0; i < n; ++i) {
      out.rho[i] = s.rho[i] + (2.0 / 3.0) * ((u2.rho[i] - s.rho[i]) + dt * k.rho[i]);
      out.mom[i] = s.mom[i] + (2.0 / 3.0) * ((u2.mom[i] - s.mom[i]) + dt * k.mom[i]);
    }
    clamp(out);
  }
  out.time = s.time + dt;
  if (min_density) *min_density = lowest;
  return out;
}

Scheme::Scheme(const Grid& g, const FreeEnergyModel& model, const SchemeConfig& cfg, bool force)
    : grid_(g), cfg_(cfg), field_(g, model), damping_(g, Damping{cfg.gamma, cfg.psi}) {
  cfg_.validate(model, force);
  if (cfg_.order == 2 && g.size() < 3) throw Error("second order needs at least 3 cells");
}

Rhs Scheme::rhs(const State& s) const {
  check_compatible(grid_, s);
  const std::size_t n = grid_.size();
  const PressureLaw& law = field_.model().pressure;
  const double eps = cfg_.eps_vac;
  const auto H = field_.evaluate(s.rho);

  InterfaceStates faces;
  SourceTerms src;
  if (cfg_.order == 1) {
    faces = reconstruct_first_order(grid_, s, H, law, cfg_.rule, eps);
    src = first_order_sources(grid_, s, faces, law, &damping_, eps);
  } else {
    const auto bv = muscl_boundary_values(grid_, s, H, law, cfg_.h_reconstruction, eps);
    faces = reconstruct_second_order(grid_, s, bv, law, cfg_.rule, eps);
    src = second_order_sources(grid_, s, bv, faces, law, &damping_, eps);
  }

  std::vector<FaceFlux> F(n + 1);  // F[0], F[n] are the walls
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double rl = faces.rho_minus[k], ul = faces.u_minus[k];
    const double rr = faces.rho_plus[k], ur = faces.u_plus[k];
    F[k + 1] = cfg_.flux == FluxKind::llf ? llf_flux_primitive(rl, ul, rr, ur, law, eps)
                                          : kinetic_flux_primitive(rl, ul, rr, ur, law);
  }
  Rhs r;
  r.rho.resize(n);
  r.mom.resize(n);
  const auto S = src.total();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = grid_.width(i);
    r.rho[i] = -(F[i + 1].mass - F[i].mass) / dx;
    r.mom[i] = -(F[i + 1].momentum - F[i].momentum) / dx + S[i];
  }
  return r;
}

double Scheme::cfl_dt(const State& s, double t_end) const {
  const PressureLaw& law = field_.model().pressure;
  const double remaining = t_end - s.time;
  const double dx = grid_.min_width();
  double dt = std::numeric_limits<double>::infinity();
  if (cfg_.flux == FluxKind::llf) {
    const double speed = max_wave_speed(s, law, FluxKind::llf, cfg_.eps_vac);
    if (speed > 0.0) dt = cfg_.cfl * dx / speed;
  } else {
    const double speed = kinetic_reference_speed(s, law, cfg_.eps_vac);
    if (speed > 0.0) dt = cfg_.cfl * dx / speed;
    if (cfg_.kinetic_dt_cap) {
      // MUSCL face values each see half a cell, hence the 1/2 at second order
      const double wave = max_wave_speed(s, law, FluxKind::kinetic, cfg_.eps_vac);
      const double c = cfg_.order == 2 ? std::min(cfg_.cfl, 0.5) : cfg_.cfl;
      if (wave > 0.0) dt = std::min(dt, c * dx / wave);
    }
  }
  if (!std::isfinite(dt)) return std::max(remaining, 0.0);
  return std::max(0.0, std::min(dt, remaining));
}

State Scheme::step(const State& s, double dt, double* min_density) const {
  State out = ssp_rk3(s, dt, [this](const State& u) { return rhs(u); }, min_density);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out.rho[i] <= cfg_.eps_vac) out.mom[i] = 0.0;
  return out;
}

DiagnosticsRecord Scheme::diagnose(const State& s, bool per_cell) const {
  return wbfv::diagnose(grid_, s, field_, &damping_, cfg_.eps_vac, per_cell);
}

Rhs semidiscrete_rhs(const Grid& g, const State& s, const FreeEnergyModel& model, const SchemeConfig& cfg) {
  return Scheme(g, model, cfg, true).rhs(s);
}

double cfl_dt(const Grid& g, const State& s, const FreeEnergyModel& model, const SchemeConfig& cfg,
              double t_end) {
  return Scheme(g, model, cfg, true).cfl_dt(s, t_end);
}

State ssp_rk3_step(const Grid& g, const State& s, const FreeEnergyModel& model, const SchemeConfig& cfg,
                   double dt) {
  return Scheme(g, model, cfg, true).step(s, dt);
}

namespace {

bool at_steady_state(const Scheme& scheme, const State& s, const RunOptions& opt) {
  const auto u = velocity(s, scheme.config().eps_vac);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.rho[i] > opt.steady_density_floor && std::abs(u[i]) > opt.steady_velocity_tol) return false;
  const auto H = scheme.field().evaluate(s.rho);
  const auto v = free_energy_variation(s, H, scheme.model().pressure, opt.steady_density_floor);
  return variation_spread(v) <= opt.steady_spread_tol;
}

}  // namespace

void run_into(const Scheme& scheme, const State& s0, const RunOptions& opt, Trajectory& tr) {
  const Grid& g = scheme.grid();
  check_compatible(g, s0);
  State s = s0;
  tr = Trajectory{};
  tr.snapshots.push_back(s);
  Monitors& mon = tr.monitors;
  mon.initial_mass = total_mass(g, s);
  mon.min_density = s.rho.empty() ? 0.0 : *std::min_element(s.rho.begin(), s.rho.end());
  mon.energy_tracked = opt.record_history;
  mon.max_energy_increase = -std::numeric_limits<double>::infinity();
  double prev_energy = 0.0;
  if (opt.record_history) {
    tr.history.push_back(scheme.diagnose(s));
    prev_energy = tr.history.back().total_energy;
    mon.max_dissipation = tr.history.back().dissipation;
  }

  const double t_end = opt.t_end;
  const double t_eps = 1e-13 * std::max(1.0, std::abs(t_end));
  double next_snap = opt.snapshot_interval > 0.0 ? s.time + opt.snapshot_interval : t_end;
  bool last_is_snapshot = true;

  while (t_end - s.time > t_eps && tr.steps < opt.max_steps) {
    const double target = std::min(t_end, next_snap);
    const double dt = scheme.cfl_dt(s, target);
    double lowest = 0.0;
    try {
      s = scheme.step(s, dt, &lowest);
    } catch (const Error& e) {
      throw RunError(std::string(e.what()) + " (t = " + std::to_string(s.time) + ")", s.time);
    }
    if (std::abs(target - s.time) <= t_eps) s.time = target;
    ++tr.steps;
    last_is_snapshot = false;

    mon.min_density = std::min(mon.min_density, lowest);
    if (mon.initial_mass > 0.0)
      mon.max_mass_drift =
          std::max(mon.max_mass_drift, std::abs(total_mass(g, s) - mon.initial_mass) / mon.initial_mass);
    if (opt.record_history) {
      tr.history.push_back(scheme.diagnose(s));
      const DiagnosticsRecord& r = tr.history.back();
      mon.max_energy_increase = std::max(mon.max_energy_increase, r.total_energy - prev_energy);
      mon.max_dissipation = std::max(mon.max_dissipation, r.dissipation);
      prev_energy = r.total_energy;
    }
    if (opt.snapshot_interval > 0.0 && s.time >= next_snap - t_eps) {
      tr.snapshots.push_back(s);
      last_is_snapshot = true;
      next_snap += opt.snapshot_interval;
    }
    if (opt.on_step) opt.on_step(s);
    if (opt.stop_if && opt.stop_if(s)) {
      tr.stopped = true;
      break;
    }
    if (opt.stop_at_steady && tr.steps % opt.steady_check_every == 0 && at_steady_state(scheme, s, opt)) {
      tr.reached_steady = true;
      break;
    }
  }
  if (!last_is_snapshot) tr.snapshots.push_back(s);
  if (!std::isfinite(mon.max_energy_increase)) mon.max_energy_increase = 0.0;
}

Trajectory run(const Scheme& scheme, const State& s0, const RunOptions& opt) {
  Trajectory tr;
  run_into(scheme, s0, opt, tr);
  return tr;
}

Trajectory run(const Grid& g, const State& s0, const FreeEnergyModel& model, const SchemeConfig& cfg,
               double t_end) {
  RunOptions opt;
  opt.t_end = t_end;
  return run(Scheme(g, model, cfg), s0, opt);
}

}  // namespace wbfv
