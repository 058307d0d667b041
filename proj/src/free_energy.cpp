#include "wbfv/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wbfv {

PressureLaw PressureLaw::power_law(double m) {
  if (!(m > 1.0) || !std::isfinite(m)) throw Error("power law needs exponent m > 1");
  return PressureLaw(Kind::power_law, m);
}

PressureLaw PressureLaw::scaled_ideal(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error("scaled ideal pressure needs sigma > 0 (sigma = 0 loses hyperbolicity)");
  return PressureLaw(Kind::scaled_ideal, sigma);
}

static void require_nonnegative(double rho, const char* what) {
  if (!(rho >= 0.0)) throw Error(std::string(what) + ": negative density");
}

double PressureLaw::pi(double rho) const {
  require_nonnegative(rho, "pi");
  if (kind_ == Kind::power_law) return std::pow(rho, param_) / (param_ - 1.0);
  if (rho == 0.0) return 0.0;
  return param_ * rho * (std::log(rho) - 1.0);
}

double PressureLaw::pi_prime(double rho) const {
  require_nonnegative(rho, "pi_prime");
  if (kind_ == Kind::power_law) return param_ * std::pow(rho, param_ - 1.0) / (param_ - 1.0);
  if (rho == 0.0) throw Error("pi_prime: log-type law is singular at rho = 0");
  return param_ * std::log(rho);
}

double PressureLaw::xi(double s) const {
  if (kind_ == Kind::power_law) {
    if (!(s > 0.0)) return 0.0;
    return std::pow((param_ - 1.0) * s / param_, 1.0 / (param_ - 1.0));
  }
  return kind_ == Kind::ideal_gas ? std::exp(s) : std::exp(s / param_);
}

double PressureLaw::pressure(double rho) const {
  require_nonnegative(rho, "pressure");
  if (kind_ == Kind::power_law) return std::pow(rho, param_);
  return param_ * rho;
}

double PressureLaw::pressure_derivative(double rho) const {
  require_nonnegative(rho, "pressure_derivative");
  if (kind_ == Kind::power_law) return param_ * std::pow(rho, param_ - 1.0);
  return param_;
}

double PressureLaw::pressure_over_density(double rho) const {
  if (kind_ == Kind::power_law) return rho > 0.0 ? std::pow(rho, param_ - 1.0) : 0.0;
  return param_;
}

std::string PressureLaw::describe() const {
  char buf[64];
  switch (kind_) {
    case Kind::ideal_gas: return "ideal_gas";
    case Kind::power_law: std::snprintf(buf, sizeof buf, "power_law(m=%.17g)", param_); return buf;
    case Kind::scaled_ideal: std::snprintf(buf, sizeof buf, "scaled_ideal(sigma=%.17g)", param_); return buf;
  }
  return "?";
}

double ExternalPotential::operator()(double x) const {
  switch (kind) {
    case Kind::none: return 0.0;
    case Kind::quadratic: return 0.5 * a * x * x;
    case Kind::double_well: return a * x * x * x * x - b * x * x;
    case Kind::custom: throw Error("custom potential has no point evaluation");
  }
  return 0.0;
}

std::vector<double> ExternalPotential::sample(const Grid& g) const {
  if (kind == Kind::custom) {
    if (values.size() != g.size())
      throw Error("custom potential has " + std::to_string(values.size()) + " values for " +
                  std::to_string(g.size()) + " cells");
    return values;
  }
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = (*this)(g.center(i));
  return v;
}

InteractionKernel InteractionKernel::homogeneous(double alpha) {
  if (!(alpha > -1.0) || !std::isfinite(alpha))
    throw Error("homogeneous kernel needs alpha > -1 (local integrability)");
  return {Kind::homogeneous, alpha};
}

InteractionKernel InteractionKernel::hard_rods(double length) {
  if (!(length > 0.0)) throw Error("hard rods need a positive rod length");
  return {Kind::hard_rods, length};
}

double InteractionKernel::operator()(double x) const {
  switch (kind) {
    case Kind::none: return 0.0;
    case Kind::quadratic: return 0.5 * x * x;
    case Kind::homogeneous:
      if (param == 0.0) return std::log(std::abs(x));
      return std::pow(std::abs(x), param) / param;
    case Kind::morse: return -std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case Kind::hard_rods: return std::abs(x) <= 0.5 * param ? 1.0 : 0.0;
  }
  return 0.0;
}

namespace {

// antiderivative of |y|^alpha/alpha (ln|y| for alpha = 0), zero at y = 0
double homogeneous_primitive(double y, double alpha) {
  if (y == 0.0) return 0.0;
  if (alpha == 0.0) return y * std::log(std::abs(y)) - y;
  return std::copysign(std::pow(std::abs(y), alpha + 1.0), y) / (alpha * (alpha + 1.0));
}

}  // namespace

double InteractionKernel::cell_average(double offset, double width) const {
  const double lo = offset - 0.5 * width, hi = offset + 0.5 * width;
  switch (kind) {
    case Kind::none: return 0.0;
    case Kind::quadratic: return 0.5 * (offset * offset + width * width / 12.0);
    case Kind::homogeneous:
      return (homogeneous_primitive(hi, param) - homogeneous_primitive(lo, param)) / width;
    case Kind::morse: {
      const double c = -0.5 / width;
      return c * (std::erf(hi / std::numbers::sqrt2) - std::erf(lo / std::numbers::sqrt2));
    }
    case Kind::hard_rods: {
      const double r = 0.5 * param;
      return std::max(0.0, std::min(hi, r) - std::max(lo, -r)) / width;
    }
  }
  return 0.0;
}

double InteractionKernel::matrix_entry(double offset, double width) const {
  if (kind == Kind::homogeneous) return cell_average(offset, width);
  return (*this)(offset);
}

void FreeEnergyModel::validate() const {
  if (kernel.kind == InteractionKernel::Kind::hard_rods && nonlinearity != Nonlinearity::log_complement)
    throw Error("hard-rod kernel requires the log_complement nonlinearity");
  if (nonlinearity == Nonlinearity::log_complement && kernel.kind == InteractionKernel::Kind::none)
    throw Error("log_complement nonlinearity requires an interaction kernel");
}

PotentialField::PotentialField(const Grid& g, const FreeEnergyModel& model)
    : grid_(g), model_(model), V_(model.potential.sample(g)) {
  model_.validate();
  if (model_.hard_rods()) {
    rods_.emplace(g, model_.kernel.param);
  } else if (model_.has_interaction()) {
    const InteractionKernel W = model_.kernel;
    conv_.emplace(g, [W](double d, double w) { return W.matrix_entry(d, w); });
  }
}

std::vector<double> PotentialField::convolve(std::span<const double> rho) const {
  if (conv_) return conv_->apply(rho);
  if (rods_) return rods_->packing_fraction(rho);
  return std::vector<double>(rho.size(), 0.0);
}

void PotentialField::evaluate(std::span<const double> rho, std::span<double> H) const {
  const std::size_t n = V_.size();
  if (rho.size() != n || H.size() != n) throw Error("potential_field: size mismatch");
  if (rods_) {
    rods_->variation(rho, H);
    for (std::size_t i = 0; i < n; ++i) H[i] += V_[i];
    return;
  }
  if (!conv_) {
    std::copy(V_.begin(), V_.end(), H.begin());
    return;
  }
  conv_->apply(rho, H);
  if (model_.nonlinearity == Nonlinearity::identity) {
    for (std::size_t i = 0; i < n; ++i) H[i] += V_[i];
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double c = H[i];
    if (!(c < 1.0)) throw OverpackedError("overpacked: K argument " + std::to_string(c) + " >= 1");
    // K = ln(1 - c), K' = -1/(1 - c)
    H[i] = V_[i] + 0.5 * std::log1p(-c) - 0.5 * c / (1.0 - c);
  }
}

std::vector<double> PotentialField::evaluate(std::span<const double> rho) const {
  std::vector<double> H(rho.size());
  evaluate(rho, H);
  return H;
}

double PotentialField::free_energy(std::span<const double> rho) const {
  const PressureLaw& law = model_.pressure;
  double f = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    f += grid_.width(i) * (law.pi(rho[i]) + V_[i] * rho[i]);
  if (rods_) return f + rods_->excess_energy(rho);
  if (!conv_) return f;
  const std::vector<double> c = conv_->apply(rho);
  double e = 0.0;
  if (model_.nonlinearity == Nonlinearity::identity) {
    for (std::size_t i = 0; i < rho.size(); ++i) e += grid_.width(i) * rho[i] * c[i];
  } else {
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (!(c[i] < 1.0)) throw OverpackedError("overpacked state in free energy");
      e += grid_.width(i) * rho[i] * std::log1p(-c[i]);
    }
  }
  return f + 0.5 * e;
}

std::vector<double> kernel_matrix(const Grid& g, const InteractionKernel& W) {
  if (W.kind == InteractionKernel::Kind::none) throw Error("kernel_matrix: no kernel");
  return GridConvolution(g, [W](double d, double w) { return W.matrix_entry(d, w); }).dense();
}

std::vector<double> potential_field(const Grid& g, const State& s, const FreeEnergyModel& model) {
  check_compatible(g, s);
  return PotentialField(g, model).evaluate(s.rho);
}

std::vector<double> packing_fraction(const Grid& g, const State& s, double rod_length) {
  check_compatible(g, s);
  return HardRodFunctional(g, rod_length).packing_fraction(s.rho);
}

}  // namespace wbfv
