#include <math.h>  // pchip.hpp calls isnan unqualified

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "wbfv/scenario.hpp"

namespace wbfv {

namespace {

// 5-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 5> kNodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                       0.9061798459386640};
constexpr std::array<double, 5> kWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                         0.4786286704993665, 0.2369268850561891};

std::vector<double> cell_averages(const Grid& g, const std::function<double(double)>& f) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double c = g.center(i), h = 0.5 * g.width(i);
    double acc = 0.0;
    for (std::size_t q = 0; q < kNodes.size(); ++q) acc += kWeights[q] * f(c + h * kNodes[q]);
    out[i] = 0.5 * acc;
  }
  return out;
}

void rescale_mass(const Grid& g, std::vector<double>& rho, double mass) {
  const double m = total_mass(g, rho);
  if (!(m > 0.0)) throw ConfigError("initial density has no mass on this grid");
  for (double& r : rho) r *= mass / m;
}

std::vector<double> gaussian_averages(const Grid& g, double center, double mass) {
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double lo = (g.face(i) - center) / std::sqrt(2.0);
    const double hi = (g.face(i + 1) - center) / std::sqrt(2.0);
    // erfc form keeps the far tails accurate
    const double p = lo >= 0.0 ? 0.5 * (std::erfc(lo) - std::erfc(hi)) : 0.5 * (std::erfc(-hi) - std::erfc(-lo));
    rho[i] = mass * p / g.width(i);
  }
  return rho;
}

State resample(const Grid& g, std::span<const double> x, const State& src) {
  if (x.size() == g.size()) {
    bool same = true;
    for (std::size_t i = 0; i < g.size() && same; ++i)
      same = std::abs(x[i] - g.center(i)) <= 1e-12 * std::max(1.0, std::abs(x[i]));
    if (same) return State(src.rho, src.mom, 0.0);
  }
  const double mass = [&] {
    double m = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      const double left = i == 0 ? x[0] - 0.5 * (x[1] - x[0]) : 0.5 * (x[i - 1] + x[i]);
      const double right = i + 1 == src.size() ? x[i] + 0.5 * (x[i] - x[i - 1]) : 0.5 * (x[i] + x[i + 1]);
      m += (right - left) * src.rho[i];
    }
    return m;
  }();
  auto rho = pchip_resample(x, src.rho, g.centers());
  for (double& r : rho) r = std::max(r, 0.0);
  auto mom = pchip_resample(x, src.mom, g.centers());
  if (mass > 0.0) rescale_mass(g, rho, mass);
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho[i] <= 0.0) mom[i] = 0.0;
  return State(std::move(rho), std::move(mom), 0.0);
}

thread_local int scenario_depth = 0;

}  // namespace

Grid build_grid(const ScenarioConfig& cfg) { return Grid::uniform(cfg.grid.a, cfg.grid.b, cfg.grid.cells); }

SchemeConfig build_scheme(const ScenarioConfig& cfg) {
  SchemeConfig s;
  s.order = cfg.scheme.order;
  s.flux = cfg.scheme.flux;
  s.rule = cfg.scheme.rule;
  s.h_reconstruction = cfg.scheme.h_reconstruction;
  s.cfl = cfg.scheme.cfl;
  s.gamma = cfg.damping.gamma;
  if (cfg.damping.cucker_smale) s.psi = cucker_smale_psi;
  s.eps_vac = cfg.scheme.eps_vac;
  s.kinetic_dt_cap = cfg.scheme.kinetic_dt_cap;
  return s;
}

std::vector<double> pchip_resample(std::span<const double> x, std::span<const double> y,
                                   std::span<const double> x_new) {
  if (x.size() != y.size() || x.size() < 4) throw Error("pchip_resample needs at least 4 matching points");
  using boost::math::interpolators::pchip;
  const pchip<std::vector<double>> p(std::vector<double>(x.begin(), x.end()), std::vector<double>(y.begin(), y.end()));
  std::vector<double> out(x_new.size());
  for (std::size_t i = 0; i < x_new.size(); ++i) {
    const double t = x_new[i];
    if (t <= x.front())
      out[i] = y.front();
    else if (t >= x.back())
      out[i] = y.back();
    else
      out[i] = p(t);
  }
  return out;
}

Snapshot read_snapshot_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open snapshot '" + path + "'");
  std::string line;
  Snapshot snap;
  std::vector<double> rho, mom;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      if (line.rfind("x,rho,momentum", 0) != 0) throw ConfigError("snapshot '" + path + "' lacks the x,rho,momentum header");
      header = false;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::array<double, 3> v{};
    for (double& d : v) {
      if (!std::getline(row, cell, ',')) throw ConfigError("short row in snapshot '" + path + "'");
      d = std::stod(cell);
    }
    snap.x.push_back(v[0]);
    rho.push_back(v[1]);
    mom.push_back(v[2]);
  }
  snap.state = State(std::move(rho), std::move(mom), 0.0);
  return snap;
}

State build_initial_state(const ScenarioConfig& cfg, const Grid& g) {
  const InitialSpec& ic = cfg.initial;
  std::vector<double> rho;
  switch (ic.family) {
    case InitialFamily::cosine_bump:
      rho = cell_averages(g, [&](double x) { return ic.floor + ic.amplitude * std::cos(ic.wavenumber * x); });
      rescale_mass(g, rho, ic.mass);
      break;
    case InitialFamily::gaussian_sum:
      rho = cell_averages(g, [&](double x) {
        double f = ic.floor;
        for (std::size_t k = 0; k < ic.centers.size(); ++k) {
          const double d = x - ic.centers[k];
          f += ic.weights[k] * std::exp(-ic.rates[k] * d * d);
        }
        return f;
      });
      rescale_mass(g, rho, ic.mass);
      break;
    case InitialFamily::travelling_gaussian:
      rho = gaussian_averages(g, ic.center, ic.mass);
      break;
    case InitialFamily::steady_state:
      return solve_discrete_steady_state(g, cfg.model, ic.mass);
    case InitialFamily::uniform:
      rho.assign(g.size(), ic.mass / (g.upper() - g.lower()));
      break;
    case InitialFamily::file: {
      const auto p = std::filesystem::path(cfg.base_dir) / ic.path;
      const Snapshot snap = read_snapshot_csv(p.string());
      return resample(g, snap.x, snap.state);
    }
    case InitialFamily::scenario: {
      if (scenario_depth > 8) throw ConfigError("initial.path: scenario chain too deep");
      const auto p = std::filesystem::path(cfg.base_dir) / ic.path;
      const ScenarioConfig src = load_config(p.string());
      ++scenario_depth;
      RunReport rep;
      try {
        rep = run_scenario(src, OutputOptions{"", false});
      } catch (...) {
        --scenario_depth;
        throw;
      }
      --scenario_depth;
      if (!rep.completed) throw ConfigError("source scenario '" + p.string() + "' failed: " + rep.error);
      const Grid sg = build_grid(src);
      return resample(g, sg.centers(), rep.final_state);
    }
  }
  for (double r : rho)
    if (!(r >= 0.0)) throw ConfigError("initial density is negative somewhere; check floor and amplitude");

  std::vector<double> mom(g.size(), 0.0);
  switch (ic.momentum) {
    case MomentumProfile::zero: break;
    case MomentumProfile::sine:
      mom = cell_averages(g, [&](double x) { return ic.momentum_amplitude * std::sin(ic.momentum_wavenumber * x); });
      break;
    case MomentumProfile::velocity:
      for (std::size_t i = 0; i < g.size(); ++i) mom[i] = ic.velocity * rho[i];
      break;
    case MomentumProfile::velocity_sine:
      // u = amplitude sin(k x) sampled at centres
      for (std::size_t i = 0; i < g.size(); ++i)
        mom[i] = rho[i] * ic.momentum_amplitude * std::sin(ic.momentum_wavenumber * g.center(i));
      break;
  }
  return State(std::move(rho), std::move(mom), 0.0);
}

std::vector<double> exact_density(const ScenarioConfig& cfg, const Grid& g, double t) {
  if (cfg.run.exact != ExactSolution::travelling_gaussian) throw ConfigError("scenario declares no exact solution");
  return gaussian_averages(g, cfg.initial.center + cfg.initial.velocity * t, cfg.initial.mass);
}

}  // namespace wbfv
