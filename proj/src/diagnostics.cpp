#include "wbfv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wbfv {

double kinetic_energy(const Grid& g, const State& s, double eps_vac) {
  check_compatible(g, s);
  const auto u = velocity(s, eps_vac);
  double k = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) k += 0.5 * g.width(i) * s.rho[i] * u[i] * u[i];
  return k;
}

double discrete_free_energy(const Grid& g, const State& s, const PotentialField& field) {
  check_compatible(g, s);
  return field.free_energy(s.rho);
}

double discrete_free_energy(const Grid& g, const State& s, const FreeEnergyModel& model) {
  return discrete_free_energy(g, s, PotentialField(g, model));
}

double total_energy(const Grid& g, const State& s, const FreeEnergyModel& model, double eps_vac) {
  return kinetic_energy(g, s, eps_vac) + discrete_free_energy(g, s, model);
}

std::vector<double> free_energy_variation(const State& s, std::span<const double> H, const PressureLaw& law,
                                          double eps_vac) {
  std::vector<double> v(s.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.rho[i] > eps_vac) v[i] = law.pi_prime(s.rho[i]) + H[i];
  return v;
}

std::vector<double> free_energy_variation(const Grid& g, const State& s, const FreeEnergyModel& model,
                                          double eps_vac) {
  const auto H = potential_field(g, s, model);
  return free_energy_variation(s, H, model.pressure, eps_vac);
}

double variation_spread(std::span<const double> variation) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : variation) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi >= lo ? hi - lo : 0.0;
}

std::vector<double> entropy_field(const State& s, const PressureLaw& law, double eps_vac) {
  const auto u = velocity(s, eps_vac);
  std::vector<double> eta(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) eta[i] = law.pi(s.rho[i]) + 0.5 * s.rho[i] * u[i] * u[i];
  return eta;
}

double center_of_mass(const Grid& g, const State& s) {
  check_compatible(g, s);
  double m = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    m += g.width(i) * s.rho[i];
    mx += g.width(i) * s.rho[i] * g.center(i);
  }
  if (!(m > 0.0)) throw Error("center of mass undefined for zero mass");
  return mx / m;
}

DiagnosticsRecord diagnose(const Grid& g, const State& s, const PotentialField& field,
                           const DampingOperator* damping, double eps_vac, bool per_cell) {
  DiagnosticsRecord r;
  r.time = s.time;
  r.mass = total_mass(g, s);
  r.momentum = total_momentum(g, s);
  r.kinetic = kinetic_energy(g, s, eps_vac);
  r.free_energy = field.free_energy(s.rho);
  r.total_energy = r.kinetic + r.free_energy;
  r.center_of_mass = r.mass > 0.0 ? center_of_mass(g, s) : 0.0;
  const auto u = velocity(s, eps_vac);
  r.dissipation = damping ? damping->dissipation(s.rho, u) : 0.0;
  if (per_cell) {
    const auto H = field.evaluate(s.rho);
    r.variation = free_energy_variation(s, H, field.model().pressure, eps_vac);
    r.entropy = entropy_field(s, field.model().pressure, eps_vac);
  }
  return r;
}

std::vector<double> block_average(std::span<const double> fine, std::size_t n_coarse) {
  if (n_coarse == 0 || fine.size() % n_coarse != 0)
    throw Error("incompatible grids: " + std::to_string(fine.size()) + " cells do not coarsen to " +
                std::to_string(n_coarse));
  const std::size_t r = fine.size() / n_coarse;
  std::vector<double> out(n_coarse);
  for (std::size_t i = 0; i < n_coarse; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < r; ++k) acc += fine[i * r + k];
    out[i] = acc / static_cast<double>(r);
  }
  return out;
}

double l1_error(const Grid& coarse, std::span<const double> rho, std::span<const double> reference,
                std::span<const char> mask) {
  if (rho.size() != coarse.size() || reference.size() != coarse.size())
    throw Error("l1_error: size mismatch");
  if (!mask.empty() && mask.size() != coarse.size()) throw Error("l1_error: mask size mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (mask.empty() || mask[i]) e += coarse.width(i) * std::abs(rho[i] - reference[i]);
  return e;
}

double l1_error(const Grid& coarse, const State& s, const Grid& fine, const State& reference,
                std::span<const char> mask) {
  if (std::abs(coarse.lower() - fine.lower()) > 1e-12 || std::abs(coarse.upper() - fine.upper()) > 1e-12)
    throw Error("incompatible grids: domains differ");
  const auto ref = block_average(reference.rho, coarse.size());
  return l1_error(coarse, s.rho, ref, mask);
}

double linf_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("linf_error: size mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

std::vector<double> convergence_order(std::span<const double> errors) {
  if (errors.size() < 2) throw Error("convergence_order needs at least two errors");
  for (double e : errors)
    if (!(e > 0.0)) throw Error("convergence_order: errors must be positive");
  std::vector<double> p(errors.size() - 1);
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) p[k] = std::log2(errors[k] / errors[k + 1]);
  return p;
}

std::vector<char> support_mask(std::span<const double> reference, double threshold, std::size_t margin) {
  const std::size_t n = reference.size();
  std::vector<char> mask(n, 0);
  // distance to the nearest cell outside the support
  std::vector<std::size_t> dist(n, std::numeric_limits<std::size_t>::max());
  std::size_t last = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(reference[i] > threshold)) last = i;
    if (last != std::numeric_limits<std::size_t>::max()) dist[i] = i - last;
  }
  last = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = n; i-- > 0;) {
    if (!(reference[i] > threshold)) last = i;
    if (last != std::numeric_limits<std::size_t>::max()) dist[i] = std::min(dist[i], last - i);
  }
  for (std::size_t i = 0; i < n; ++i) mask[i] = reference[i] > threshold && dist[i] >= margin;
  return mask;
}

std::vector<std::pair<std::size_t, std::size_t>> support_components(std::span<const double> rho,
                                                                     double threshold) {
  std::vector<std::pair<std::size_t, std::size_t>> parts;
  std::size_t i = 0;
  while (i < rho.size()) {
    if (rho[i] > threshold) {
      std::size_t j = i;
      while (j < rho.size() && rho[j] > threshold) ++j;
      parts.emplace_back(i, j);
      i = j;
    } else {
      ++i;
    }
  }
  return parts;
}

}  // namespace wbfv
