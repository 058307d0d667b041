#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "wbfv/free_energy.hpp"

namespace wbfv {

double mass_constant(const Grid& g, const PressureLaw& law, std::span<const double> H, double mass) {
  if (!(mass > 0.0)) throw Error("steady state needs positive mass");
  const double hmin = *std::min_element(H.begin(), H.end());
  const double hmax = *std::max_element(H.begin(), H.end());
  if (!law.admits_vacuum()) {
    const double sigma = law.noise();
    double z = 0.0;
    for (std::size_t i = 0; i < H.size(); ++i) z += g.width(i) * std::exp(-(H[i] - hmin) / sigma);
    return hmin + sigma * std::log(mass / z);
  }
  double length = 0.0;
  for (std::size_t i = 0; i < H.size(); ++i) length += g.width(i);
  auto excess = [&](double c) {
    double m = 0.0;
    for (std::size_t i = 0; i < H.size(); ++i) m += g.width(i) * law.xi(c - H[i]);
    return m - mass;
  };
  const double lo = hmin;
  const double hi = hmax + law.pi_prime(mass / length);
  if (excess(hi) == 0.0) return hi;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(excess, lo, hi, -mass, excess(hi),
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
  const double a = r.first, b = r.second;
  return std::abs(excess(a)) <= std::abs(excess(b)) ? a : b;
}

namespace {

double residual(const PressureLaw& law, std::span<const double> rho, std::span<const double> H, double c) {
  double r = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] > 0.0)
      r = std::max(r, std::abs(law.pi_prime(rho[i]) + H[i] - c));
    else
      r = std::max(r, c - H[i]);  // dry cells must satisfy H_i >= C
  }
  return r;
}

}  // namespace

SteadyStateResult solve_steady_state(const Grid& g, const FreeEnergyModel& model, double mass,
                                     const SteadyStateOptions& opt) {
  const PotentialField field(g, model);
  const PressureLaw& law = model.pressure;
  const std::size_t n = g.size();
  double length = 0.0;
  for (double w : g.widths()) length += w;

  std::vector<double> rho(n, mass / length), H(n), target(n);
  SteadyStateResult best;
  best.residual = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    field.evaluate(rho, H);
    const double c = mass_constant(g, law, H, mass);
    const double r = residual(law, rho, H, c);
    if (r < best.residual) {
      best.state = State(rho, std::vector<double>(n, 0.0));
      best.constant = c;
      best.residual = r;
      best.iterations = it;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (best.residual <= opt.tolerance) return best;
    // roundoff floor: stop once no progress is made near the tolerance
    if (since_best > 100 && best.residual <= 100.0 * opt.tolerance) return best;

    for (std::size_t i = 0; i < n; ++i) target[i] = law.xi(c - H[i]);
    if (!model.has_interaction()) {
      rho = target;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) rho[i] = (1.0 - opt.damping) * rho[i] + opt.damping * target[i];
  }
  throw SteadyStateError("steady state iteration did not converge, residual " + std::to_string(best.residual),
                         best.residual);
}

State solve_discrete_steady_state(const Grid& g, const FreeEnergyModel& model, double mass) {
  return solve_steady_state(g, model, mass).state;
}

}  // namespace wbfv
