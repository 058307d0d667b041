#include "wbfv/flux.hpp"

#include <algorithm>
#include <cmath>

namespace wbfv {

FaceFlux physical_flux(Conserved U, const PressureLaw& law, double eps_vac) {
  const double u = U.rho > eps_vac ? U.mom / U.rho : 0.0;
  return {U.rho * u, U.rho * u * u + law.pressure(U.rho)};
}

FaceFlux llf_flux_primitive(double rho_l, double u_l, double rho_r, double u_r, const PressureLaw& law,
                            double eps_vac) {
  if (law.admits_vacuum() && (rho_l <= eps_vac || rho_r <= eps_vac))
    throw FluxVacuumError("flux/vacuum mismatch: LLF flux cannot handle vacuum with a power-law pressure");
  const double ml = rho_l * u_l, mr = rho_r * u_r;
  const double lam = std::max(std::abs(u_l) + std::sqrt(law.pressure_derivative(rho_l)),
                              std::abs(u_r) + std::sqrt(law.pressure_derivative(rho_r)));
  const double fl = ml * u_l + law.pressure(rho_l);
  const double fr = mr * u_r + law.pressure(rho_r);
  return {0.5 * (ml + mr - lam * (rho_r - rho_l)), 0.5 * (fl + fr - lam * (mr - ml))};
}

FaceFlux llf_flux(Conserved left, Conserved right, const PressureLaw& law, double eps_vac) {
  const double ul = left.rho > eps_vac ? left.mom / left.rho : 0.0;
  const double ur = right.rho > eps_vac ? right.mom / right.rho : 0.0;
  if (law.admits_vacuum() && (left.rho <= eps_vac || right.rho <= eps_vac))
    throw FluxVacuumError("flux/vacuum mismatch: LLF flux cannot handle vacuum with a power-law pressure");
  const double lam = std::max(std::abs(ul) + std::sqrt(law.pressure_derivative(left.rho)),
                              std::abs(ur) + std::sqrt(law.pressure_derivative(right.rho)));
  const FaceFlux fl = physical_flux(left, law, eps_vac), fr = physical_flux(right, law, eps_vac);
  return {0.5 * (fl.mass + fr.mass - lam * (right.rho - left.rho)),
          0.5 * (fl.momentum + fr.momentum - lam * (right.mom - left.mom))};
}

FaceFlux kinetic_half_flux(double rho, double u, const PressureLaw& law, bool positive_speeds) {
  if (!(rho > 0.0)) return {};
  const double c = std::sqrt(3.0 * law.pressure_over_density(rho));
  double a = u - c, b = u + c;
  if (positive_speeds) {
    a = std::max(a, 0.0);
    b = std::max(b, 0.0);
  } else {
    a = std::min(a, 0.0);
    b = std::min(b, 0.0);
  }
  const double len = b - a;
  if (len <= 0.0) return {};
  // rho/(2c) times the integrals of xi and xi^2 over [a, b]
  const double scale = rho / (2.0 * c) * len;
  return {scale * 0.5 * (a + b), scale * (a * a + a * b + b * b) / 3.0};
}

FaceFlux kinetic_flux_primitive(double rho_l, double u_l, double rho_r, double u_r, const PressureLaw& law) {
  const FaceFlux out = kinetic_half_flux(rho_l, u_l, law, true);
  const FaceFlux in = kinetic_half_flux(rho_r, u_r, law, false);
  return {out.mass + in.mass, out.momentum + in.momentum};
}

FaceFlux kinetic_flux(Conserved left, Conserved right, const PressureLaw& law, double eps_vac) {
  if (left.rho < 0.0 || right.rho < 0.0) throw Error("kinetic flux: negative density");
  const double ul = left.rho > eps_vac ? left.mom / left.rho : 0.0;
  const double ur = right.rho > eps_vac ? right.mom / right.rho : 0.0;
  return kinetic_flux_primitive(left.rho, ul, right.rho, ur, law);
}

double max_wave_speed(const State& s, const PressureLaw& law, FluxKind kind, double eps_vac) {
  const auto u = velocity(s, eps_vac);
  double speed = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double rho = s.rho[i];
    if (rho <= eps_vac) continue;
    const double c = kind == FluxKind::llf ? std::sqrt(law.pressure_derivative(rho))
                                           : std::sqrt(3.0 * law.pressure_over_density(rho));
    speed = std::max(speed, std::abs(u[i]) + c);
  }
  return speed;
}

double kinetic_reference_speed(const State& s, const PressureLaw& law, double eps_vac) {
  if (!law.admits_vacuum()) return max_wave_speed(s, law, FluxKind::kinetic, eps_vac);
  const auto u = velocity(s, eps_vac);
  const double c = std::pow(3.0, 0.25 * (law.exponent() - 1.0));
  double speed = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.rho[i] > eps_vac) speed = std::max(speed, std::abs(u[i]) + c);
  return speed;
}

}  // namespace wbfv
