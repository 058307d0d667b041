#pragma once

#include <span>
#include <vector>

#include "wbfv/free_energy.hpp"
#include "wbfv/grid.hpp"
#include "wbfv/reconstruction.hpp"

namespace wbfv {

struct DiagnosticsRecord {
  double time = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double kinetic = 0.0;
  double free_energy = 0.0;
  double total_energy = 0.0;
  double center_of_mass = 0.0;
  double dissipation = 0.0;      // right side of the discrete energy identity, <= 0
  std::vector<double> variation;  // Pi'(rho_i) + H_i, NaN on dry cells
  std::vector<double> entropy;
};

double kinetic_energy(const Grid& g, const State& s, double eps_vac = kVacuumDensity);
double discrete_free_energy(const Grid& g, const State& s, const FreeEnergyModel& model);
double discrete_free_energy(const Grid& g, const State& s, const PotentialField& field);
double total_energy(const Grid& g, const State& s, const FreeEnergyModel& model, double eps_vac = kVacuumDensity);

std::vector<double> free_energy_variation(const Grid& g, const State& s, const FreeEnergyModel& model,
                                          double eps_vac = kVacuumDensity);
std::vector<double> free_energy_variation(const State& s, std::span<const double> H, const PressureLaw& law,
                                          double eps_vac = kVacuumDensity);
// max - min over finite entries
double variation_spread(std::span<const double> variation);

std::vector<double> entropy_field(const State& s, const PressureLaw& law, double eps_vac = kVacuumDensity);
double center_of_mass(const Grid& g, const State& s);

DiagnosticsRecord diagnose(const Grid& g, const State& s, const PotentialField& field,
                           const DampingOperator* damping, double eps_vac, bool per_cell);

// Block means of a fine field onto n_coarse cells (fine size must be a multiple).
std::vector<double> block_average(std::span<const double> fine, std::size_t n_coarse);
// sum dx_i |rho_i - ref_i| over cells with mask[i] (all cells if mask empty)
double l1_error(const Grid& coarse, std::span<const double> rho, std::span<const double> reference,
                std::span<const char> mask = {});
double l1_error(const Grid& coarse, const State& s, const Grid& fine, const State& reference,
                std::span<const char> mask = {});
double linf_error(std::span<const double> a, std::span<const double> b);
std::vector<double> convergence_order(std::span<const double> errors);

// Cells with reference density above threshold and at least `margin` cells
// away from any cell at or below it.
std::vector<char> support_mask(std::span<const double> reference, double threshold, std::size_t margin);

// Connected runs [begin, end) of cells with rho > threshold.
std::vector<std::pair<std::size_t, std::size_t>> support_components(std::span<const double> rho,
                                                                     double threshold);

}  // namespace wbfv
