#include <algorithm>
#include <cmath>

#include "wbfv/free_energy.hpp"

namespace wbfv {

HardRodFunctional::HardRodFunctional(const Grid& g, double rod_length)
    : faces_(g.faces().begin(), g.faces().end()),
      centers_(g.centers().begin(), g.centers().end()),
      widths_(g.widths().begin(), g.widths().end()),
      sigma_(rod_length) {
  if (!(rod_length > 0.0)) throw Error("hard rods need a positive rod length");
}

std::vector<double> HardRodFunctional::cumulative(std::span<const double> values) const {
  std::vector<double> cum(values.size() + 1, 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) cum[k + 1] = cum[k] + widths_[k] * values[k];
  return cum;
}

// integral of the piecewise-constant field from the left wall to x
double HardRodFunctional::primitive(std::span<const double> cum, std::span<const double> values,
                                    double x) const {
  if (x <= faces_.front()) return 0.0;
  if (x >= faces_.back()) return cum.back();
  const auto it = std::upper_bound(faces_.begin(), faces_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - faces_.begin()) - 1;
  return cum[k] + (x - faces_[k]) * values[k];
}

double HardRodFunctional::interpolate(std::span<const double> rho, double x) const {
  if (x < faces_.front() || x > faces_.back()) return 0.0;
  if (x <= centers_.front()) return rho.front();
  if (x >= centers_.back()) return rho.back();
  const auto it = std::upper_bound(centers_.begin(), centers_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - centers_.begin()) - 1;
  const double t = (x - centers_[k]) / (centers_[k + 1] - centers_[k]);
  return (1.0 - t) * rho[k] + t * rho[k + 1];
}

std::vector<double> HardRodFunctional::packing_fraction(std::span<const double> rho) const {
  const auto cum = cumulative(rho);
  const double h = 0.5 * sigma_;
  std::vector<double> eta(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i)
    eta[i] = primitive(cum, rho, centers_[i] + h) - primitive(cum, rho, centers_[i] - h);
  return eta;
}

void HardRodFunctional::variation(std::span<const double> rho, std::span<double> out) const {
  const std::size_t n = rho.size();
  const double h = 0.5 * sigma_;
  const auto cum = cumulative(rho);
  std::vector<double> ratio(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = centers_[j];
    const double eta = primitive(cum, rho, x + h) - primitive(cum, rho, x - h);
    if (!(eta < 1.0)) throw OverpackedError("overpacked: packing fraction >= 1 at x = " + std::to_string(x));
    ratio[j] = (interpolate(rho, x + h) + interpolate(rho, x - h)) / (1.0 - eta);
  }
  const auto rcum = cumulative(ratio);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = centers_[i];
    const double m0 = primitive(cum, rho, x);
    const double left = m0 - primitive(cum, rho, x - sigma_);
    const double right = primitive(cum, rho, x + sigma_) - m0;
    if (!(left < 1.0) || !(right < 1.0))
      throw OverpackedError("overpacked: rod-length mass >= 1 at x = " + std::to_string(x));
    const double tail = primitive(rcum, ratio, x + h) - primitive(rcum, ratio, x - h);
    out[i] = -0.5 * std::log1p(-left) - 0.5 * std::log1p(-right) + 0.5 * tail;
  }
}

double HardRodFunctional::excess_energy(std::span<const double> rho) const {
  const auto eta = packing_fraction(rho);
  const double h = 0.5 * sigma_;
  double e = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (!(eta[j] < 1.0)) throw OverpackedError("overpacked state in excess energy");
    const double x = centers_[j];
    e += widths_[j] * (interpolate(rho, x + h) + interpolate(rho, x - h)) * std::log1p(-eta[j]);
  }
  return -0.5 * e;
}

}  // namespace wbfv
