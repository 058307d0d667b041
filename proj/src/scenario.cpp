#include "wbfv/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

namespace wbfv {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sci(double x, int digits = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*E", digits, x);
  return buf;
}

std::string scenario_id(const ScenarioConfig& cfg) { return cfg.run.name.empty() ? "scenario" : cfg.run.name; }

std::string path_in(const OutputOptions& out, const std::string& file) {
  return (std::filesystem::path(out.dir) / file).string();
}

void open_dir(const OutputOptions& out) {
  if (!out.dir.empty()) std::filesystem::create_directories(out.dir);
}

std::ofstream open_file(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  return f;
}

std::string write_snapshot(const OutputOptions& out, const std::string& id, std::size_t k, const Scheme& scheme,
                           const State& s) {
  char name[64];
  std::snprintf(name, sizeof name, "_snap_%04zu.csv", k);
  const std::string path = path_in(out, id + name);
  auto f = open_file(path);
  const Grid& g = scheme.grid();
  const auto rec = scheme.diagnose(s, true);
  const auto u = velocity(s, scheme.config().eps_vac);
  f << "# t = " << num(s.time) << "\n";
  f << "x,rho,momentum,u,dF_drho,eta\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    f << num(g.center(i)) << ',' << num(s.rho[i]) << ',' << num(s.mom[i]) << ',' << num(u[i]) << ','
      << num(rec.variation[i]) << ',' << num(rec.entropy[i]) << '\n';
  return path;
}

std::string write_timeseries(const OutputOptions& out, const std::string& id,
                             const std::vector<DiagnosticsRecord>& history, const std::string& error,
                             double error_time) {
  const std::string path = path_in(out, id + "_timeseries.csv");
  auto f = open_file(path);
  f << "t,mass,momentum,kinetic,free_energy,total_energy,center_of_mass\n";
  for (const auto& r : history)
    f << num(r.time) << ',' << num(r.mass) << ',' << num(r.momentum) << ',' << num(r.kinetic) << ','
      << num(r.free_energy) << ',' << num(r.total_energy) << ',' << num(r.center_of_mass) << '\n';
  if (!error.empty()) f << "# ERROR t = " << num(error_time) << ": " << error << "\n";
  return path;
}

const char* kernel_name(InteractionKernel::Kind k) {
  switch (k) {
    case InteractionKernel::Kind::none: return "none";
    case InteractionKernel::Kind::quadratic: return "quadratic";
    case InteractionKernel::Kind::homogeneous: return "homogeneous";
    case InteractionKernel::Kind::morse: return "morse";
    case InteractionKernel::Kind::hard_rods: return "hard rods";
  }
  return "?";
}

const char* potential_name(ExternalPotential::Kind k) {
  switch (k) {
    case ExternalPotential::Kind::none: return "none";
    case ExternalPotential::Kind::quadratic: return "quadratic";
    case ExternalPotential::Kind::double_well: return "double well";
    case ExternalPotential::Kind::custom: return "custom";
  }
  return "?";
}

void write_header(std::ostream& o, const ScenarioConfig& cfg) {
  o << "scenario: " << scenario_id(cfg) << "\n";
  o << "grid: [" << num(cfg.grid.a) << ", " << num(cfg.grid.b) << "], " << cfg.grid.cells << " cells\n";
  o << "pressure: " << cfg.model.pressure.describe() << "\n";
  o << "potential: " << potential_name(cfg.model.potential.kind) << ", kernel: " << kernel_name(cfg.model.kernel.kind)
    << "\n";
  o << "damping: gamma = " << num(cfg.damping.gamma) << (cfg.damping.cucker_smale ? ", Cucker-Smale alignment" : "")
    << "\n";
  o << "scheme: flux " << (cfg.scheme.flux == FluxKind::llf ? "llf" : "kinetic") << ", interface rule "
    << (cfg.scheme.rule == InterfaceRule::max ? "max" : "average") << ", cfl " << num(cfg.scheme.cfl) << "\n";
}

void write_monitors(std::ostream& o, const Monitors& m) {
  o << "max relative mass drift: " << sci(m.max_mass_drift, 3) << (m.mass_ok() ? "" : "  [TRIPPED]") << "\n";
  o << "min density (before clamp): " << sci(m.min_density, 3) << (m.positivity_ok() ? "" : "  [TRIPPED]") << "\n";
  if (m.energy_tracked) {
    o << "max step energy increase: " << sci(m.max_energy_increase, 3) << (m.energy_ok() ? "" : "  [TRIPPED]") << "\n";
    o << "max dissipation: " << sci(m.max_dissipation, 3) << (m.dissipation_ok() ? "" : "  [TRIPPED]") << "\n";
  }
}

void merge(Monitors& into, const Monitors& m) {
  into.initial_mass = m.initial_mass;
  into.max_mass_drift = std::max(into.max_mass_drift, m.max_mass_drift);
  into.min_density = std::min(into.min_density, m.min_density);
  into.max_energy_increase = std::max(into.max_energy_increase, m.max_energy_increase);
  into.max_dissipation = std::max(into.max_dissipation, m.max_dissipation);
  into.energy_tracked = into.energy_tracked || m.energy_tracked;
}

Monitors fresh_monitors() {
  Monitors m;
  m.min_density = std::numeric_limits<double>::infinity();
  m.max_energy_increase = -std::numeric_limits<double>::infinity();
  return m;
}

void tidy(Monitors& m) {
  if (!std::isfinite(m.min_density)) m.min_density = 0.0;
  if (!std::isfinite(m.max_energy_increase)) m.max_energy_increase = 0.0;
}

RunOptions run_options(const ScenarioConfig& cfg, const OutputOptions& out) {
  RunOptions opt;
  opt.t_end = cfg.run.t_end;
  opt.snapshot_interval = cfg.run.snapshot_interval;
  opt.record_history = out.keep_history;
  opt.max_steps = cfg.run.max_steps;
  opt.stop_at_steady = cfg.run.stop_at_steady;
  opt.steady_velocity_tol = cfg.run.steady_velocity_tol;
  opt.steady_spread_tol = cfg.run.steady_spread_tol;
  opt.steady_density_floor = cfg.run.steady_density_floor;
  return opt;
}

Scheme make_scheme(const ScenarioConfig& cfg, const Grid& g) {
  return Scheme(g, cfg.model, build_scheme(cfg), cfg.scheme.force);
}

double largest_cell_fraction(const Grid& g, const State& s) {
  const double m = total_mass(g, s);
  double top = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) top = std::max(top, g.width(i) * s.rho[i]);
  return m > 0.0 ? top / m : 0.0;
}

}  // namespace

bool RunReport::ok() const {
  return completed && monitors.mass_ok() && monitors.positivity_ok() && monitors.energy_ok() &&
         monitors.dissipation_ok();
}

std::string output_dir_from_env() {
  const char* d = std::getenv("WBFV_OUTPUT_DIR");
  return d && *d ? d : "wbfv_output";
}

RunReport run_scenario(const ScenarioConfig& cfg, const OutputOptions& out) {
  RunReport rep;
  rep.id = scenario_id(cfg);
  const Grid g = build_grid(cfg);
  const Scheme scheme = make_scheme(cfg, g);
  const State s0 = build_initial_state(cfg, g);

  RunOptions opt = run_options(cfg, out);
  if (cfg.run.concentration_fraction > 0.0) {
    opt.stop_if = [&](const State& s) {
      if (largest_cell_fraction(g, s) < cfg.run.concentration_fraction) return false;
      rep.concentration_time = s.time;
      return true;
    };
  }

  Trajectory tr;
  double error_time = 0.0;
  try {
    run_into(scheme, s0, opt, tr);
  } catch (const RunError& e) {
    rep.completed = false;
    rep.error = e.what();
    error_time = e.time;
  }
  rep.steps = tr.steps;
  rep.reached_steady = tr.reached_steady;
  rep.monitors = tr.monitors;
  rep.final_state = tr.snapshots.empty() ? s0 : tr.snapshots.back();
  rep.final = scheme.diagnose(rep.final_state);
  rep.history = std::move(tr.history);

  if (out.dir.empty()) return rep;
  open_dir(out);
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k)
    rep.snapshot_paths.push_back(write_snapshot(out, rep.id, k, scheme, tr.snapshots[k]));
  rep.timeseries_path = write_timeseries(out, rep.id, rep.history, rep.error, error_time);

  rep.report_path = path_in(out, rep.id + "_report.txt");
  auto f = open_file(rep.report_path);
  write_header(f, cfg);
  f << "order: " << cfg.scheme.order << "\n\n";
  f << "status: " << (rep.completed ? "completed" : "FAILED: " + rep.error) << "\n";
  f << "steps: " << rep.steps << ", final time: " << num(rep.final.time) << "\n";
  if (rep.reached_steady) f << "steady state reached at t = " << num(rep.final.time) << "\n";
  if (!std::isnan(rep.concentration_time))
    f << "one cell holds " << num(100.0 * cfg.run.concentration_fraction)
      << "% of the mass at t = " << num(rep.concentration_time) << " (run stopped)\n";
  else if (cfg.run.concentration_fraction > 0.0)
    f << "no single cell reached " << num(100.0 * cfg.run.concentration_fraction) << "% of the mass\n";
  f << "\nfinal diagnostics\n";
  f << "  mass: " << num(rep.final.mass) << "\n  momentum: " << num(rep.final.momentum)
    << "\n  kinetic energy: " << num(rep.final.kinetic) << "\n  free energy: " << num(rep.final.free_energy)
    << "\n  total energy: " << num(rep.final.total_energy) << "\n  center of mass: " << num(rep.final.center_of_mass)
    << "\n\nmonitors\n";
  write_monitors(f, rep.monitors);
  return rep;
}

RunReport preservation_test(const ScenarioConfig& cfg, double t_end, const OutputOptions& out) {
  RunReport rep;
  rep.id = scenario_id(cfg);
  rep.monitors = fresh_monitors();
  const Grid g = build_grid(cfg);
  const State s0 = solve_discrete_steady_state(g, cfg.model, cfg.initial.mass);

  for (int order : {1, 2}) {
    ScenarioConfig c = cfg;
    c.scheme.order = order;
    const Scheme scheme = make_scheme(c, g);
    RunOptions opt;
    opt.t_end = t_end;
    opt.record_history = out.keep_history;
    Trajectory tr;
    PreservationRow row{order, g.size(), t_end, 0.0, 0.0};
    try {
      run_into(scheme, s0, opt, tr);
    } catch (const RunError& e) {
      rep.completed = false;
      rep.error = e.what();
    }
    const State& s = tr.snapshots.back();
    row.time = s.time;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double d = std::abs(s.rho[i] - s0.rho[i]);
      row.l1 += g.width(i) * d;
      row.linf = std::max(row.linf, d);
    }
    rep.preservation.push_back(row);
    merge(rep.monitors, tr.monitors);
    rep.steps += tr.steps;
    rep.final_state = s;
    rep.final = scheme.diagnose(s);
  }
  tidy(rep.monitors);

  if (out.dir.empty()) return rep;
  open_dir(out);
  rep.table_path = path_in(out, rep.id + "_preservation.csv");
  {
    auto f = open_file(rep.table_path);
    f << "order,cells,t,l1_drift,linf_drift\n";
    for (const auto& r : rep.preservation)
      f << r.order << ',' << r.cells << ',' << num(r.time) << ',' << num(r.l1) << ',' << num(r.linf) << '\n';
  }
  rep.report_path = path_in(out, rep.id + "_preservation.txt");
  auto f = open_file(rep.report_path);
  write_header(f, cfg);
  f << "\nPreservation of the steady state, " << g.size() << " cells, t in [0, " << num(t_end) << "]\n";
  f << "                 L1 drift        Linf drift\n";
  for (const auto& r : rep.preservation) {
    f << (r.order == 1 ? "first order   " : "second order  ");
    char line[80];
    std::snprintf(line, sizeof line, "%15.4E   %15.4E\n", r.l1, r.linf);
    f << line;
  }
  if (!rep.completed) f << "FAILED: " << rep.error << "\n";
  f << "\nmonitors\n";
  write_monitors(f, rep.monitors);
  return rep;
}

RunReport convergence_study(const ScenarioConfig& cfg, const OutputOptions& out, std::vector<int> orders) {
  RunReport rep;
  rep.id = scenario_id(cfg);
  rep.monitors = fresh_monitors();
  const auto& cells = cfg.run.study_cells;
  const bool exact = cfg.run.exact != ExactSolution::none;
  const double t = cfg.run.study_time;
  if (cells.size() < 2) throw ConfigError("convergence study needs at least two resolutions");
  for (std::size_t k = 0; k + 1 < cells.size(); ++k)
    if (cells[k + 1] != 2 * cells[k]) throw Error("incompatible grids: study cells must double at every level");
  if (!exact)
    for (std::size_t n : cells)
      if (n == 0 || cfg.run.reference_cells % n != 0)
        throw Error("incompatible grids: reference cells " + std::to_string(cfg.run.reference_cells) +
                    " is not a multiple of " + std::to_string(n));

  struct Job {
    int order;
    std::size_t n;
    std::future<Trajectory> result;
  };
  auto launch = [&](int order, std::size_t n) {
    ScenarioConfig c = cfg;
    c.scheme.order = order;
    c.grid.cells = n;
    return std::async(std::launch::async, [c, t, keep = out.keep_history] {
      const Grid g = build_grid(c);
      const Scheme scheme = make_scheme(c, g);
      RunOptions opt;
      opt.t_end = t;
      opt.record_history = keep;
      return run(scheme, build_initial_state(c, g), opt);
    });
  };

  std::map<int, std::future<Trajectory>> refs;
  std::vector<Job> jobs;
  for (int order : orders) {
    if (!exact) refs.emplace(order, launch(order, cfg.run.reference_cells));
    for (std::size_t n : cells) jobs.push_back({order, n, launch(order, n)});
  }

  std::map<int, State> ref_state;
  try {
    for (auto& [order, fut] : refs) {
      Trajectory tr = fut.get();
      merge(rep.monitors, tr.monitors);
      ref_state.emplace(order, tr.final_state());
    }
    for (auto& job : jobs) {
      Trajectory tr = job.result.get();
      merge(rep.monitors, tr.monitors);
      ScenarioConfig c = cfg;
      c.grid.cells = job.n;
      const Grid g = build_grid(c);
      const State& s = tr.final_state();
      const std::vector<double> reference =
          exact ? exact_density(cfg, g, s.time) : block_average(ref_state.at(job.order).rho, job.n);
      std::vector<char> mask;
      if (cfg.run.mask == ErrorMask::support) mask = support_mask(reference, cfg.run.mask_threshold, cfg.run.mask_margin);
      ConvergenceRow row{job.order, job.n, g.width(0), s.time, l1_error(g, s.rho, reference, mask)};
      if (!rep.convergence.empty() && rep.convergence.back().order == job.order && rep.convergence.back().error > 0.0 &&
          row.error > 0.0)
        row.rate = std::log2(rep.convergence.back().error / row.error);
      rep.convergence.push_back(row);
      rep.final_state = s;
    }
  } catch (const RunError& e) {
    // drain the remaining jobs before reporting
    for (auto& [o, fut] : refs)
      if (fut.valid()) try { fut.get(); } catch (...) {}
    for (auto& job : jobs)
      if (job.result.valid()) try { job.result.get(); } catch (...) {}
    rep.completed = false;
    rep.error = e.what();
  }
  tidy(rep.monitors);

  if (out.dir.empty()) return rep;
  open_dir(out);
  rep.table_path = path_in(out, rep.id + "_convergence.csv");
  {
    auto f = open_file(rep.table_path);
    f << "order,cells,dx,t,l1_error,rate\n";
    for (const auto& r : rep.convergence)
      f << r.order << ',' << r.cells << ',' << num(r.dx) << ',' << num(r.time) << ',' << num(r.error) << ','
        << num(r.rate) << '\n';
  }
  rep.report_path = path_in(out, rep.id + "_convergence.txt");
  auto f = open_file(rep.report_path);
  write_header(f, cfg);
  f << "\nL1 errors at t = " << num(t) << " against "
    << (exact ? std::string("the exact solution") : std::to_string(cfg.run.reference_cells) + "-cell reference")
    << (cfg.run.mask == ErrorMask::support ? " (support mask)" : "") << "\n";
  f << "cells";
  for (int o : orders) f << (o == 1 ? "   first-order L1   order" : "   second-order L1  order");
  f << "\n";
  for (std::size_t n : cells) {
    char line[64];
    std::snprintf(line, sizeof line, "%5zu", n);
    f << line;
    for (int o : orders) {
      auto it = std::find_if(rep.convergence.begin(), rep.convergence.end(),
                             [&](const ConvergenceRow& r) { return r.order == o && r.cells == n; });
      if (it == rep.convergence.end()) {
        f << "   -                 -   ";
        continue;
      }
      if (std::isnan(it->rate))
        std::snprintf(line, sizeof line, "   %14.4E     -  ", it->error);
      else
        std::snprintf(line, sizeof line, "   %14.4E  %5.2f", it->error, it->rate);
      f << line;
    }
    f << "\n";
  }
  if (!rep.completed) f << "FAILED: " << rep.error << "\n";
  f << "\nmonitors\n";
  write_monitors(f, rep.monitors);
  return rep;
}

RunReport continuation_study(const ScenarioConfig& cfg, const OutputOptions& out) {
  if (cfg.model.pressure.kind() != PressureLaw::Kind::scaled_ideal)
    throw ConfigError("continuation needs pressure = scaled_ideal");
  const auto& sigmas = cfg.run.sigmas;
  if (sigmas.empty()) throw ConfigError("continuation needs a list of sigmas");
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    if (!(sigmas[k] > 0.0)) throw ConfigError("sigmas must be positive");
    if (k && !(sigmas[k] < sigmas[k - 1])) throw ConfigError("sigmas must be strictly decreasing");
  }

  RunReport rep;
  rep.id = scenario_id(cfg);
  rep.monitors = fresh_monitors();
  ScenarioConfig c = cfg;
  Grid g = build_grid(c);
  State s = build_initial_state(c, g);

  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    c.model.pressure = PressureLaw::scaled_ideal(sigmas[k]);
    if (k > 0) {
      // narrow the mesh to the support of the previous steady state
      std::size_t lo = s.size(), hi = 0;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (s.rho[i] > cfg.run.narrowing_threshold) {
          lo = std::min(lo, i);
          hi = i;
        }
      if (lo <= hi) {
        const double pad = 4.0 * g.width(0);
        const double a = std::max(g.lower(), g.face(lo) - pad), b = std::min(g.upper(), g.face(hi + 1) + pad);
        if (b - a < 0.8 * (g.upper() - g.lower())) {
          const double mass = total_mass(g, s);
          Grid ng = Grid::uniform(a, b, g.size());
          auto rho = pchip_resample(g.centers(), s.rho, ng.centers());
          for (double& r : rho) r = std::max(r, 0.0);
          const double m = total_mass(ng, rho);
          for (double& r : rho) r *= mass / m;
          s = State(std::move(rho), std::vector<double>(ng.size(), 0.0), 0.0);
          g = std::move(ng);
        }
      }
    }
    c.grid = {g.lower(), g.upper(), g.size()};
    // a seed on the symmetric branch stays there to round-off even where that
    // branch is unstable; restart from the configured start until it is left
    if (k > 0 && std::abs(rep.branch.back().center_of_mass) <= 0.05) s = build_initial_state(c, g);
    const Scheme scheme(g, c.model, build_scheme(c), c.scheme.force);
    RunOptions opt;
    opt.t_end = cfg.run.continuation_time;
    opt.record_history = out.keep_history;
    opt.max_steps = cfg.run.max_steps;
    opt.stop_at_steady = true;
    opt.steady_velocity_tol = cfg.run.steady_velocity_tol;
    opt.steady_spread_tol = cfg.run.steady_spread_tol;
    opt.steady_density_floor = cfg.run.steady_density_floor;
    State start = s;
    start.time = 0.0;
    Trajectory tr;
    try {
      run_into(scheme, start, opt, tr);
    } catch (const RunError& e) {
      rep.completed = false;
      rep.error = "sigma = " + num(sigmas[k]) + ": " + e.what();
      merge(rep.monitors, tr.monitors);
      break;
    }
    merge(rep.monitors, tr.monitors);
    s = tr.final_state();
    rep.steps += tr.steps;
    BranchRow row{sigmas[k], g.size(), g.lower(), g.upper(), s.time, tr.steps, tr.reached_steady,
                  center_of_mass(g, s)};
    rep.branch.push_back(row);
    if (!tr.reached_steady && rep.completed) {
      rep.completed = false;
      rep.error = "no steady state within the step budget at sigma = " + num(sigmas[k]);
    }
    rep.final_state = s;
    rep.final = scheme.diagnose(s);
    if (!out.dir.empty()) {
      open_dir(out);
      char name[64];
      std::snprintf(name, sizeof name, "_sigma_%02zu", k);
      rep.snapshot_paths.push_back(write_snapshot(out, rep.id + name, 0, scheme, s));
    }
  }
  tidy(rep.monitors);

  if (out.dir.empty()) return rep;
  open_dir(out);
  rep.table_path = path_in(out, rep.id + "_branch.csv");
  {
    auto f = open_file(rep.table_path);
    f << "sigma,cells,a,b,t,steps,steady,center_of_mass\n";
    for (const auto& r : rep.branch)
      f << num(r.sigma) << ',' << r.cells << ',' << num(r.a) << ',' << num(r.b) << ',' << num(r.time) << ','
        << r.steps << ',' << (r.steady ? 1 : 0) << ',' << num(r.center_of_mass) << '\n';
  }
  rep.report_path = path_in(out, rep.id + "_branch.txt");
  auto f = open_file(rep.report_path);
  write_header(f, cfg);
  f << "\nsteady center of mass along the continuation\n";
  f << "   sigma      mesh                   t         steady   center of mass\n";
  for (const auto& r : rep.branch) {
    char line[160];
    std::snprintf(line, sizeof line, "%8.4f   [%7.3f, %7.3f]   %10.3f   %-6s   %.6f\n", r.sigma, r.a, r.b, r.time,
                  r.steady ? "yes" : "no", r.center_of_mass);
    f << line;
  }
  // empirical threshold: first sigma whose centre leaves the symmetric branch
  for (const auto& r : rep.branch)
    if (std::abs(r.center_of_mass) > 0.05) {
      f << "symmetric branch left at sigma = " << num(r.sigma) << "\n";
      break;
    }
  if (!rep.completed) f << "FAILED: " << rep.error << "\n";
  f << "\nmonitors\n";
  write_monitors(f, rep.monitors);
  return rep;
}

}  // namespace wbfv
