#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wbfv/convolution.hpp"
#include "wbfv/grid.hpp"

namespace wbfv {

// Internal energy density Pi, its derivative, the inverse xi of Pi' (extended
// by zero) and the pressure P with rho Pi'' = P'.
class PressureLaw {
 public:
  enum class Kind { ideal_gas, power_law, scaled_ideal };

  static PressureLaw ideal_gas() { return PressureLaw(Kind::ideal_gas, 1.0); }
  static PressureLaw power_law(double m);
  static PressureLaw scaled_ideal(double sigma);

  Kind kind() const { return kind_; }
  double exponent() const { return kind_ == Kind::power_law ? param_ : 1.0; }
  double noise() const { return kind_ == Kind::power_law ? 0.0 : param_; }
  // Pi'(0) finite, so xi has compactly supported range.
  bool admits_vacuum() const { return kind_ == Kind::power_law; }

  double pi(double rho) const;
  double pi_prime(double rho) const;
  double xi(double s) const;
  double pressure(double rho) const;
  double pressure_derivative(double rho) const;
  // P(rho)/rho, the squared thermal spread of the kinetic Maxwellian
  double pressure_over_density(double rho) const;

  std::string describe() const;
  bool operator==(const PressureLaw&) const = default;

 private:
  PressureLaw(Kind k, double p) : kind_(k), param_(p) {}
  Kind kind_;
  double param_;
};

struct ExternalPotential {
  enum class Kind { none, quadratic, double_well, custom };
  Kind kind = Kind::none;
  double a = 0.0, b = 0.0;     // quadratic: a x^2/2, double_well: a x^4 - b x^2
  std::vector<double> values;  // custom: one value per cell centre

  static ExternalPotential none() { return {}; }
  static ExternalPotential quadratic(double a) { return {Kind::quadratic, a, 0.0, {}}; }
  static ExternalPotential double_well(double a, double b) { return {Kind::double_well, a, b, {}}; }
  static ExternalPotential quartic(double c) { return double_well(0.25, 0.5 * c); }
  static ExternalPotential custom(std::vector<double> v) { return {Kind::custom, 0, 0, std::move(v)}; }

  double operator()(double x) const;
  std::vector<double> sample(const Grid& g) const;
  bool operator==(const ExternalPotential&) const = default;
};

struct InteractionKernel {
  enum class Kind { none, quadratic, homogeneous, morse, hard_rods };
  Kind kind = Kind::none;
  double param = 0.0;  // alpha for homogeneous, rod length for hard_rods

  static InteractionKernel none() { return {}; }
  static InteractionKernel quadratic() { return {Kind::quadratic, 0.0}; }
  static InteractionKernel homogeneous(double alpha);
  static InteractionKernel morse() { return {Kind::morse, 0.0}; }
  static InteractionKernel hard_rods(double length);

  double operator()(double x) const;
  // Mean of W over [offset - width/2, offset + width/2].
  double cell_average(double offset, double width) const;
  // Entry used by the discrete convolution.
  double matrix_entry(double offset, double width) const;
  bool operator==(const InteractionKernel&) const = default;
};

enum class Nonlinearity { identity, log_complement };

struct FreeEnergyModel {
  PressureLaw pressure = PressureLaw::ideal_gas();
  ExternalPotential potential;
  InteractionKernel kernel;
  Nonlinearity nonlinearity = Nonlinearity::identity;

  void validate() const;
  bool has_interaction() const { return kernel.kind != InteractionKernel::Kind::none; }
  bool hard_rods() const { return kernel.kind == InteractionKernel::Kind::hard_rods; }
  bool operator==(const FreeEnergyModel&) const = default;
};

struct OverpackedError : Error {
  using Error::Error;
};

// Percus excess functional on a grid: packing integrals by exact overlap with
// the piecewise-constant density, offset densities by linear interpolation.
class HardRodFunctional {
 public:
  HardRodFunctional(const Grid& g, double rod_length);
  double rod_length() const { return sigma_; }

  std::vector<double> packing_fraction(std::span<const double> rho) const;
  void variation(std::span<const double> rho, std::span<double> out) const;
  double excess_energy(std::span<const double> rho) const;

 private:
  std::vector<double> cumulative(std::span<const double> values) const;
  double primitive(std::span<const double> cum, std::span<const double> values, double x) const;
  double interpolate(std::span<const double> rho, double x) const;
  std::vector<double> faces_, centers_, widths_;
  double sigma_;
};

// H[rho] for a fixed grid and model, with the interaction operator cached.
class PotentialField {
 public:
  PotentialField(const Grid& g, const FreeEnergyModel& model);

  const FreeEnergyModel& model() const { return model_; }
  std::span<const double> external() const { return V_; }
  void evaluate(std::span<const double> rho, std::span<double> H) const;
  std::vector<double> evaluate(std::span<const double> rho) const;
  // c_i = sum_j dx_j W_ij rho_j (zero without interaction)
  std::vector<double> convolve(std::span<const double> rho) const;
  double free_energy(std::span<const double> rho) const;
  const HardRodFunctional* hard_rods() const { return rods_ ? &*rods_ : nullptr; }

 private:
  Grid grid_;
  FreeEnergyModel model_;
  std::vector<double> V_;
  std::optional<GridConvolution> conv_;
  std::optional<HardRodFunctional> rods_;
};

std::vector<double> kernel_matrix(const Grid& g, const InteractionKernel& W);
std::vector<double> potential_field(const Grid& g, const State& s, const FreeEnergyModel& model);
std::vector<double> packing_fraction(const Grid& g, const State& s, double rod_length);

struct SteadyStateOptions {
  double damping = 0.5;
  double tolerance = 1e-13;
  std::size_t max_iterations = 10000;
};

struct SteadyStateResult {
  State state;
  double constant = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
};

struct SteadyStateError : Error {
  double residual;
  SteadyStateError(const std::string& what, double r) : Error(what), residual(r) {}
};

// Discrete solution of Pi'(rho_i) + H_i[rho] = C on the support with the
// given mass. Single connected support is assumed through C.
SteadyStateResult solve_steady_state(const Grid& g, const FreeEnergyModel& model, double mass,
                                     const SteadyStateOptions& opt = {});
State solve_discrete_steady_state(const Grid& g, const FreeEnergyModel& model, double mass);

// C with sum_i dx_i xi(C - H_i) = mass.
double mass_constant(const Grid& g, const PressureLaw& law, std::span<const double> H, double mass);

}  // namespace wbfv
