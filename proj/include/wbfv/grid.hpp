#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wbfv {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kVacuumDensity = 1e-12;

// 1D partition of [a, b]. Widths are stored, not recomputed, so a uniform
// grid has bit-identical widths (kernel matrices stay exactly symmetric).
class Grid {
 public:
  explicit Grid(std::vector<double> faces);
  static Grid uniform(double a, double b, std::size_t n);

  std::size_t size() const { return centers_.size(); }
  std::span<const double> faces() const { return faces_; }
  std::span<const double> centers() const { return centers_; }
  std::span<const double> widths() const { return widths_; }
  double face(std::size_t i) const { return faces_[i]; }
  double center(std::size_t i) const { return centers_[i]; }
  double width(std::size_t i) const { return widths_[i]; }
  double lower() const { return faces_.front(); }
  double upper() const { return faces_.back(); }
  double min_width() const;
  bool is_uniform() const { return uniform_; }

 private:
  Grid() = default;
  std::vector<double> faces_, centers_, widths_;
  bool uniform_ = false;
};

Grid make_uniform_grid(double a, double b, std::size_t n);

struct State {
  std::vector<double> rho;
  std::vector<double> mom;
  double time = 0.0;

  State() = default;
  explicit State(std::size_t n, double t = 0.0) : rho(n, 0.0), mom(n, 0.0), time(t) {}
  State(std::vector<double> r, std::vector<double> m, double t = 0.0);
  std::size_t size() const { return rho.size(); }
};

double total_mass(const Grid& g, const State& s);
double total_mass(const Grid& g, std::span<const double> rho);
double total_momentum(const Grid& g, const State& s);

// u = mom/rho above eps_vac, 0 otherwise.
std::vector<double> velocity(const State& s, double eps_vac = kVacuumDensity);

void check_compatible(const Grid& g, const State& s);

}  // namespace wbfv
