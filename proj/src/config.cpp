#include "wbfv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <type_traits>

namespace wbfv {

namespace {

using Section = std::map<std::string, std::string>;
using Raw = std::map<std::string, Section>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid", {"a", "b", "cells"}},
      {"model",
       {"pressure", "m", "sigma", "potential", "potential_a", "potential_b", "potential_c", "potential_values",
        "kernel", "alpha", "rod_length", "nonlinearity"}},
      {"damping", {"gamma", "cucker_smale"}},
      {"scheme", {"order", "flux", "interface_rule", "h_reconstruction", "cfl", "eps_vac", "kinetic_dt_cap", "force"}},
      {"initial",
       {"family", "mass", "floor", "amplitude", "wavenumber", "centers", "rates", "weights", "center", "momentum",
        "momentum_amplitude", "momentum_wavenumber", "velocity", "path"}},
      {"run",
       {"name", "t_end", "snapshot_interval", "stop_at_steady", "steady_velocity_tol", "steady_spread_tol",
        "steady_density_floor", "max_steps", "study_cells", "reference_cells", "study_time", "exact", "mask",
        "mask_threshold", "mask_margin", "sigmas", "continuation_time", "narrowing_threshold",
        "concentration_fraction"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Raw read_raw(const std::string& text) {
  Raw raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      raw[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    if (!schema().at(section).count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "' in [" + section + "]");
    if (raw[section].count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + section + "." + key + "'");
    raw[section][key] = trim(line.substr(eq + 1));
  }
  return raw;
}

class Reader {
 public:
  explicit Reader(const Raw& raw) : raw_(raw) {}

  bool has(const std::string& sec, const std::string& key) const {
    const auto it = raw_.find(sec);
    return it != raw_.end() && it->second.count(key);
  }
  const std::string& text(const std::string& sec, const std::string& key) const {
    if (!has(sec, key)) throw ConfigError("missing mandatory key '" + sec + "." + key + "'");
    return raw_.at(sec).at(key);
  }
  std::string str(const std::string& sec, const std::string& key, const std::string& def) const {
    return has(sec, key) ? text(sec, key) : def;
  }
  double num(const std::string& sec, const std::string& key) const { return to_double(sec, key, text(sec, key)); }
  double num(const std::string& sec, const std::string& key, double def) const {
    return has(sec, key) ? num(sec, key) : def;
  }
  std::size_t count(const std::string& sec, const std::string& key) const {
    return to_size(sec, key, text(sec, key));
  }
  std::size_t count(const std::string& sec, const std::string& key, std::size_t def) const {
    return has(sec, key) ? count(sec, key) : def;
  }
  bool flag(const std::string& sec, const std::string& key, bool def) const {
    if (!has(sec, key)) return def;
    const std::string& v = text(sec, key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("type mismatch: '" + sec + "." + key + "' expects a boolean, got '" + v + "'");
  }
  std::vector<double> nums(const std::string& sec, const std::string& key) const {
    std::vector<double> out;
    if (!has(sec, key)) return out;
    for (const auto& item : split(text(sec, key))) out.push_back(to_double(sec, key, item));
    return out;
  }
  std::vector<std::size_t> counts(const std::string& sec, const std::string& key, std::vector<std::size_t> def) const {
    if (!has(sec, key)) return def;
    std::vector<std::size_t> out;
    for (const auto& item : split(text(sec, key))) out.push_back(to_size(sec, key, item));
    return out;
  }
  template <class E>
  E choice(const std::string& sec, const std::string& key, const std::map<std::string, E>& options,
           std::optional<std::type_identity_t<E>> def = std::nullopt) const {
    if (!has(sec, key)) {
      if (def) return *def;
      text(sec, key);  // throws
    }
    const std::string& v = text(sec, key);
    const auto it = options.find(v);
    if (it == options.end()) {
      std::string allowed;
      for (const auto& [k, _] : options) allowed += (allowed.empty() ? "" : ", ") + k;
      throw ConfigError("invalid value '" + v + "' for '" + sec + "." + key + "' (expected one of: " + allowed + ")");
    }
    return it->second;
  }

 private:
  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> items;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
      cur = trim(cur);
      if (!cur.empty()) items.push_back(cur);
    }
    return items;
  }
  static double to_double(const std::string& sec, const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
      throw ConfigError("type mismatch: '" + sec + "." + key + "' expects a number, got '" + v + "'");
    return x;
  }
  static std::size_t to_size(const std::string& sec, const std::string& key, const std::string& v) {
    unsigned long long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
      throw ConfigError("type mismatch: '" + sec + "." + key + "' expects a non-negative integer, got '" + v + "'");
    return static_cast<std::size_t>(x);
  }
  const Raw& raw_;
};

template <class E>
std::string name_of(const std::map<std::string, E>& options, E value) {
  for (const auto& [k, v] : options)
    if (v == value) return k;
  return "?";
}

const std::map<std::string, FluxKind> kFlux = {{"llf", FluxKind::llf}, {"kinetic", FluxKind::kinetic}};
const std::map<std::string, InterfaceRule> kRule = {{"max", InterfaceRule::max}, {"average", InterfaceRule::average}};
const std::map<std::string, HReconstruction> kHRec = {{"composite", HReconstruction::composite},
                                                      {"direct", HReconstruction::direct}};
const std::map<std::string, InitialFamily> kFamily = {{"cosine_bump", InitialFamily::cosine_bump},
                                                      {"gaussian_sum", InitialFamily::gaussian_sum},
                                                      {"travelling_gaussian", InitialFamily::travelling_gaussian},
                                                      {"steady_state", InitialFamily::steady_state},
                                                      {"uniform", InitialFamily::uniform},
                                                      {"file", InitialFamily::file},
                                                      {"scenario", InitialFamily::scenario}};
const std::map<std::string, MomentumProfile> kMomentum = {
    {"zero", MomentumProfile::zero}, {"sine", MomentumProfile::sine}, {"velocity", MomentumProfile::velocity},
    {"velocity_sine", MomentumProfile::velocity_sine}};
const std::map<std::string, ExactSolution> kExact = {{"none", ExactSolution::none},
                                                     {"travelling_gaussian", ExactSolution::travelling_gaussian}};
const std::map<std::string, ErrorMask> kMask = {{"none", ErrorMask::none}, {"support", ErrorMask::support}};
const std::map<std::string, PressureLaw::Kind> kPressure = {{"ideal_gas", PressureLaw::Kind::ideal_gas},
                                                            {"power_law", PressureLaw::Kind::power_law},
                                                            {"scaled_ideal", PressureLaw::Kind::scaled_ideal}};
const std::map<std::string, int> kPotential = {{"none", 0}, {"quadratic", 1}, {"double_well", 2}, {"quartic", 3}, {"custom", 4}};
const std::map<std::string, InteractionKernel::Kind> kKernel = {{"none", InteractionKernel::Kind::none},
                                                                {"quadratic", InteractionKernel::Kind::quadratic},
                                                                {"homogeneous", InteractionKernel::Kind::homogeneous},
                                                                {"morse", InteractionKernel::Kind::morse},
                                                                {"hard_rods", InteractionKernel::Kind::hard_rods}};
const std::map<std::string, Nonlinearity> kNonlin = {{"identity", Nonlinearity::identity},
                                                     {"log_complement", Nonlinearity::log_complement}};

template <class F>
auto wrap(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

ScenarioConfig build(const Raw& raw) {
  const Reader r(raw);
  ScenarioConfig c;

  c.grid.a = r.num("grid", "a");
  c.grid.b = r.num("grid", "b");
  c.grid.cells = r.count("grid", "cells");
  if (!(c.grid.a < c.grid.b)) throw ConfigError("grid: a must be smaller than b");
  if (c.grid.cells < 2) throw ConfigError("grid: cells must be at least 2");

  FreeEnergyModel& m = c.model;
  wrap("model", [&] {
    switch (r.choice("model", "pressure", kPressure)) {
      case PressureLaw::Kind::ideal_gas: m.pressure = PressureLaw::ideal_gas(); break;
      case PressureLaw::Kind::power_law: m.pressure = PressureLaw::power_law(r.num("model", "m")); break;
      case PressureLaw::Kind::scaled_ideal: m.pressure = PressureLaw::scaled_ideal(r.num("model", "sigma")); break;
    }
    switch (r.choice("model", "potential", kPotential, 0)) {
      case 0: m.potential = ExternalPotential::none(); break;
      case 1: m.potential = ExternalPotential::quadratic(r.num("model", "potential_a", 1.0)); break;
      case 2: m.potential = ExternalPotential::double_well(r.num("model", "potential_a"), r.num("model", "potential_b")); break;
      case 3: m.potential = ExternalPotential::quartic(r.num("model", "potential_c")); break;
      case 4: {
        m.potential = ExternalPotential::custom(r.nums("model", "potential_values"));
        if (m.potential.values.size() != c.grid.cells)
          throw ConfigError("model.potential_values needs one value per cell");
        break;
      }
    }
    const auto kk = r.choice("model", "kernel", kKernel, InteractionKernel::Kind::none);
    switch (kk) {
      case InteractionKernel::Kind::none: m.kernel = InteractionKernel::none(); break;
      case InteractionKernel::Kind::quadratic: m.kernel = InteractionKernel::quadratic(); break;
      case InteractionKernel::Kind::homogeneous: m.kernel = InteractionKernel::homogeneous(r.num("model", "alpha")); break;
      case InteractionKernel::Kind::morse: m.kernel = InteractionKernel::morse(); break;
      case InteractionKernel::Kind::hard_rods: m.kernel = InteractionKernel::hard_rods(r.num("model", "rod_length")); break;
    }
    m.nonlinearity = r.choice("model", "nonlinearity", kNonlin,
                              kk == InteractionKernel::Kind::hard_rods ? Nonlinearity::log_complement
                                                                       : Nonlinearity::identity);
    m.validate();
    return 0;
  });

  c.damping.gamma = r.num("damping", "gamma", 1.0);
  if (!(c.damping.gamma >= 0.0)) throw ConfigError("damping.gamma must be >= 0");
  c.damping.cucker_smale = r.flag("damping", "cucker_smale", false);

  SchemeSpec& s = c.scheme;
  const long order = static_cast<long>(r.count("scheme", "order", 1));
  if (order != 1 && order != 2) throw ConfigError("scheme.order must be 1 or 2");
  s.order = static_cast<int>(order);
  s.flux = r.choice("scheme", "flux", kFlux, FluxKind::llf);
  s.rule = r.choice("scheme", "interface_rule", kRule, InterfaceRule::max);
  s.h_reconstruction = r.choice("scheme", "h_reconstruction", kHRec, HReconstruction::composite);
  s.cfl = r.num("scheme", "cfl", 0.7);
  if (!(s.cfl > 0.0 && s.cfl <= 1.0)) throw ConfigError("scheme.cfl must lie in (0, 1]");
  s.eps_vac = r.num("scheme", "eps_vac", kVacuumDensity);
  if (!(s.eps_vac > 0.0)) throw ConfigError("scheme.eps_vac must be positive");
  s.kinetic_dt_cap = r.flag("scheme", "kinetic_dt_cap", true);
  s.force = r.flag("scheme", "force", false);
  if (s.flux == FluxKind::llf && m.pressure.admits_vacuum() && !s.force)
    throw ConfigError("pairing error: flux = llf cannot handle vacuum with pressure = power_law; "
                      "use flux = kinetic or set scheme.force = true");

  InitialSpec& i = c.initial;
  i.family = r.choice("initial", "family", kFamily);
  i.mass = r.num("initial", "mass", 1.0);
  if (!(i.mass >= 0.0)) throw ConfigError("initial.mass must be >= 0");
  i.floor = r.num("initial", "floor", 0.0);
  i.amplitude = r.num("initial", "amplitude", 1.0);
  i.wavenumber = r.num("initial", "wavenumber", 1.0);
  i.centers = r.nums("initial", "centers");
  i.rates = r.nums("initial", "rates");
  i.weights = r.nums("initial", "weights");
  i.center = r.num("initial", "center", 0.0);
  i.momentum = r.choice("initial", "momentum", kMomentum, MomentumProfile::zero);
  i.momentum_amplitude = r.num("initial", "momentum_amplitude", 0.0);
  i.momentum_wavenumber = r.num("initial", "momentum_wavenumber", 1.0);
  i.velocity = r.num("initial", "velocity", 0.0);
  i.path = r.str("initial", "path", "");
  if (i.family == InitialFamily::gaussian_sum) {
    if (i.centers.empty() || i.centers.size() != i.rates.size())
      throw ConfigError("initial: gaussian_sum needs matching 'centers' and 'rates' lists");
    if (i.weights.empty()) i.weights.assign(i.centers.size(), 1.0);
    if (i.weights.size() != i.centers.size()) throw ConfigError("initial: 'weights' length differs from 'centers'");
  }
  if ((i.family == InitialFamily::file || i.family == InitialFamily::scenario) && i.path.empty())
    throw ConfigError("missing mandatory key 'initial.path'");

  RunSpec& u = c.run;
  u.name = r.str("run", "name", "");
  u.t_end = r.num("run", "t_end", 0.0);
  if (!(u.t_end >= 0.0)) throw ConfigError("run.t_end must be >= 0");
  u.snapshot_interval = r.num("run", "snapshot_interval", 0.0);
  u.stop_at_steady = r.flag("run", "stop_at_steady", false);
  u.steady_velocity_tol = r.num("run", "steady_velocity_tol", 1e-10);
  u.steady_spread_tol = r.num("run", "steady_spread_tol", 1e-10);
  u.steady_density_floor = r.num("run", "steady_density_floor", kVacuumDensity);
  u.max_steps = r.count("run", "max_steps", 100000000);
  u.study_cells = r.counts("run", "study_cells", {50, 100, 200, 400});
  u.reference_cells = r.count("run", "reference_cells", 25600);
  u.study_time = r.num("run", "study_time", 0.3);
  u.exact = r.choice("run", "exact", kExact, ExactSolution::none);
  u.mask = r.choice("run", "mask", kMask, ErrorMask::none);
  u.mask_threshold = r.num("run", "mask_threshold", 1e-3);
  u.mask_margin = r.count("run", "mask_margin", 3);
  u.sigmas = r.nums("run", "sigmas");
  u.continuation_time = r.num("run", "continuation_time", 200.0);
  u.narrowing_threshold = r.num("run", "narrowing_threshold", 1e-8);
  u.concentration_fraction = r.num("run", "concentration_fraction", 0.0);
  return c;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    if constexpr (std::is_floating_point_v<T>)
      s += fmt(v[k]);
    else
      s += std::to_string(v[k]);
  }
  return s;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) { return build(read_raw(text)); }

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c = parse_config(ss.str());
  const std::filesystem::path p(path);
  c.base_dir = p.parent_path().string();
  if (c.run.name.empty()) c.run.name = p.stem().string();
  return c;
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "[grid]\na = " << fmt(c.grid.a) << "\nb = " << fmt(c.grid.b) << "\ncells = " << c.grid.cells << "\n\n";

  const FreeEnergyModel& m = c.model;
  o << "[model]\n";
  switch (m.pressure.kind()) {
    case PressureLaw::Kind::ideal_gas: o << "pressure = ideal_gas\n"; break;
    case PressureLaw::Kind::power_law: o << "pressure = power_law\nm = " << fmt(m.pressure.exponent()) << "\n"; break;
    case PressureLaw::Kind::scaled_ideal: o << "pressure = scaled_ideal\nsigma = " << fmt(m.pressure.noise()) << "\n"; break;
  }
  switch (m.potential.kind) {
    case ExternalPotential::Kind::none: o << "potential = none\n"; break;
    case ExternalPotential::Kind::quadratic: o << "potential = quadratic\npotential_a = " << fmt(m.potential.a) << "\n"; break;
    case ExternalPotential::Kind::double_well:
      o << "potential = double_well\npotential_a = " << fmt(m.potential.a) << "\npotential_b = " << fmt(m.potential.b) << "\n";
      break;
    case ExternalPotential::Kind::custom: o << "potential = custom\npotential_values = " << join(m.potential.values) << "\n"; break;
  }
  o << "kernel = " << name_of(kKernel, m.kernel.kind) << "\n";
  if (m.kernel.kind == InteractionKernel::Kind::homogeneous) o << "alpha = " << fmt(m.kernel.param) << "\n";
  if (m.kernel.kind == InteractionKernel::Kind::hard_rods) o << "rod_length = " << fmt(m.kernel.param) << "\n";
  o << "nonlinearity = " << name_of(kNonlin, m.nonlinearity) << "\n\n";

  o << "[damping]\ngamma = " << fmt(c.damping.gamma) << "\ncucker_smale = " << (c.damping.cucker_smale ? "true" : "false")
    << "\n\n";

  const SchemeSpec& s = c.scheme;
  o << "[scheme]\norder = " << s.order << "\nflux = " << name_of(kFlux, s.flux)
    << "\ninterface_rule = " << name_of(kRule, s.rule) << "\nh_reconstruction = " << name_of(kHRec, s.h_reconstruction)
    << "\ncfl = " << fmt(s.cfl) << "\neps_vac = " << fmt(s.eps_vac)
    << "\nkinetic_dt_cap = " << (s.kinetic_dt_cap ? "true" : "false") << "\nforce = " << (s.force ? "true" : "false")
    << "\n\n";

  const InitialSpec& i = c.initial;
  o << "[initial]\nfamily = " << name_of(kFamily, i.family) << "\nmass = " << fmt(i.mass) << "\nfloor = " << fmt(i.floor)
    << "\namplitude = " << fmt(i.amplitude) << "\nwavenumber = " << fmt(i.wavenumber) << "\ncenters = " << join(i.centers)
    << "\nrates = " << join(i.rates) << "\nweights = " << join(i.weights) << "\ncenter = " << fmt(i.center)
    << "\nmomentum = " << name_of(kMomentum, i.momentum) << "\nmomentum_amplitude = " << fmt(i.momentum_amplitude)
    << "\nmomentum_wavenumber = " << fmt(i.momentum_wavenumber) << "\nvelocity = " << fmt(i.velocity) << "\n";
  if (!i.path.empty()) o << "path = " << i.path << "\n";
  o << "\n";

  const RunSpec& u = c.run;
  o << "[run]\n";
  if (!u.name.empty()) o << "name = " << u.name << "\n";
  o << "t_end = " << fmt(u.t_end) << "\nsnapshot_interval = " << fmt(u.snapshot_interval)
    << "\nstop_at_steady = " << (u.stop_at_steady ? "true" : "false") << "\nsteady_velocity_tol = " << fmt(u.steady_velocity_tol)
    << "\nsteady_spread_tol = " << fmt(u.steady_spread_tol) << "\nsteady_density_floor = " << fmt(u.steady_density_floor)
    << "\nmax_steps = " << u.max_steps << "\nstudy_cells = " << join(u.study_cells)
    << "\nreference_cells = " << u.reference_cells << "\nstudy_time = " << fmt(u.study_time)
    << "\nexact = " << name_of(kExact, u.exact) << "\nmask = " << name_of(kMask, u.mask)
    << "\nmask_threshold = " << fmt(u.mask_threshold) << "\nmask_margin = " << u.mask_margin
    << "\nsigmas = " << join(u.sigmas) << "\ncontinuation_time = " << fmt(u.continuation_time)
    << "\nnarrowing_threshold = " << fmt(u.narrowing_threshold)
    << "\nconcentration_fraction = " << fmt(u.concentration_fraction) << "\n";
  return o.str();
}

void apply_overrides(ScenarioConfig& cfg, const std::vector<std::string>& assignments) {
  if (assignments.empty()) return;
  Raw raw = read_raw(serialize_config(cfg));
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    const auto dot = a.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + a + "' is not of the form section.key=value");
    const std::string sec = trim(a.substr(0, dot));
    const std::string key = trim(a.substr(dot + 1, eq - dot - 1));
    if (!schema().count(sec)) throw ConfigError("override: unknown section '" + sec + "'");
    if (!schema().at(sec).count(key)) throw ConfigError("override: unknown key '" + key + "' in [" + sec + "]");
    raw[sec][key] = trim(a.substr(eq + 1));
  }
  // validated as a whole, so dependent keys can change together
  const std::string base = cfg.base_dir;
  cfg = build(raw);
  cfg.base_dir = base;
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment) { apply_overrides(cfg, {assignment}); }

}  // namespace wbfv
