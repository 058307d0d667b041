#pragma once

#include "wbfv/free_energy.hpp"
#include "wbfv/grid.hpp"

namespace wbfv {

enum class FluxKind { llf, kinetic };

struct Conserved {
  double rho = 0.0;
  double mom = 0.0;
};

struct FaceFlux {
  double mass = 0.0;
  double momentum = 0.0;
};

struct FluxVacuumError : Error {
  using Error::Error;
};

FaceFlux physical_flux(Conserved U, const PressureLaw& law, double eps_vac = kVacuumDensity);

FaceFlux llf_flux(Conserved left, Conserved right, const PressureLaw& law, double eps_vac = kVacuumDensity);
// primitive-variable form used by the scheme (u given at the face)
FaceFlux llf_flux_primitive(double rho_l, double u_l, double rho_r, double u_r, const PressureLaw& law,
                            double eps_vac = kVacuumDensity);

// Half-moments of the kinetic Maxwellian with a flat profile of half-width
// sqrt(3 P/rho): A_minus integrates xi >= 0, A_plus integrates xi <= 0.
FaceFlux kinetic_half_flux(double rho, double u, const PressureLaw& law, bool positive_speeds);
FaceFlux kinetic_flux(Conserved left, Conserved right, const PressureLaw& law, double eps_vac = kVacuumDensity);
FaceFlux kinetic_flux_primitive(double rho_l, double u_l, double rho_r, double u_r, const PressureLaw& law);

// Largest local signal speed, dry cells (rho <= eps_vac) skipped.
double max_wave_speed(const State& s, const PressureLaw& law, FluxKind kind, double eps_vac = kVacuumDensity);
// |u| + 3^{(m-1)/4} over wet cells
double kinetic_reference_speed(const State& s, const PressureLaw& law, double eps_vac = kVacuumDensity);

}  // namespace wbfv
