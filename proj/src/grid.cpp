#include "wbfv/grid.hpp"

#include <algorithm>
#include <cmath>

namespace wbfv {

Grid::Grid(std::vector<double> faces) : faces_(std::move(faces)) {
  if (faces_.size() < 3) throw Error("grid needs at least 2 cells");
  const std::size_t n = faces_.size() - 1;
  centers_.resize(n);
  widths_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(faces_[i + 1] > faces_[i])) throw Error("grid faces must be strictly increasing");
    centers_[i] = 0.5 * (faces_[i] + faces_[i + 1]);
    widths_[i] = faces_[i + 1] - faces_[i];
  }
}

Grid Grid::uniform(double a, double b, std::size_t n) {
  if (n < 2) throw Error("uniform grid needs n >= 2");
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw Error("uniform grid needs a < b");
  Grid g;
  g.faces_.resize(n + 1);
  const double dn = static_cast<double>(n);
  // a*(n-i) + b*i is mirror-exact when a = -b
  for (std::size_t i = 0; i <= n; ++i) {
    const double di = static_cast<double>(i);
    g.faces_[i] = (a * (dn - di) + b * di) / dn;
  }
  g.faces_.front() = a;
  g.faces_.back() = b;
  g.centers_.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.centers_[i] = 0.5 * (g.faces_[i] + g.faces_[i + 1]);
  g.widths_.assign(n, (b - a) / dn);
  g.uniform_ = true;
  return g;
}

double Grid::min_width() const { return *std::min_element(widths_.begin(), widths_.end()); }

Grid make_uniform_grid(double a, double b, std::size_t n) { return Grid::uniform(a, b, n); }

State::State(std::vector<double> r, std::vector<double> m, double t)
    : rho(std::move(r)), mom(std::move(m)), time(t) {
  if (rho.size() != mom.size()) throw Error("state: rho and mom lengths differ");
  for (double v : rho)
    if (!(v >= 0.0)) throw Error("state: negative or NaN density");
}

void check_compatible(const Grid& g, const State& s) {
  if (s.rho.size() != g.size() || s.mom.size() != g.size())
    throw Error("state size " + std::to_string(s.rho.size()) + " does not match grid size " +
                std::to_string(g.size()));
}

double total_mass(const Grid& g, std::span<const double> rho) {
  double m = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) m += g.width(i) * rho[i];
  return m;
}

double total_mass(const Grid& g, const State& s) {
  check_compatible(g, s);
  return total_mass(g, std::span<const double>(s.rho));
}

double total_momentum(const Grid& g, const State& s) {
  check_compatible(g, s);
  double p = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) p += g.width(i) * s.mom[i];
  return p;
}

std::vector<double> velocity(const State& s, double eps_vac) {
  std::vector<double> u(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.rho[i] > eps_vac) u[i] = s.mom[i] / s.rho[i];
  return u;
}

}  // namespace wbfv
