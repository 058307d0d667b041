#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wbfv/convolution.hpp"
#include "wbfv/free_energy.hpp"
#include "wbfv/grid.hpp"

namespace wbfv {

enum class InterfaceRule { max, average };
enum class HReconstruction { composite, direct };

double interface_H(double h_left, double h_right, InterfaceRule rule);

// Dry cells give zero interface densities. Log-type laws are only dry at 0.
inline bool is_dry(double rho, const PressureLaw& law, double eps_vac) {
  return law.admits_vacuum() ? rho <= eps_vac : rho <= 0.0;
}

// Values on interior face k, between cells k and k+1 (n-1 faces).
struct InterfaceStates {
  std::vector<double> rho_minus, u_minus;  // from cell k
  std::vector<double> rho_plus, u_plus;    // from cell k+1
  std::vector<double> H_face;
  std::size_t size() const { return H_face.size(); }
};

// Per-cell momentum source pieces; the density equation carries no source.
struct SourceTerms {
  std::vector<double> right_face;  // S^-_{i+1/2}
  std::vector<double> left_face;   // S^+_{i-1/2}
  std::vector<double> centered;    // S^c_i (second order only)
  std::vector<double> damping;
  std::vector<double> total() const;
};

struct BoundaryValues {
  std::vector<double> rho_l, rho_r, u_l, u_r, H_l, H_r;
  std::vector<double> w_l, w_r;  // Pi'(rho) + H at the faces (-inf on dry log-law cells)
};

using CommunicationFunction = std::function<double(double)>;
// (1 + x^2)^(-1/4)
double cucker_smale_psi(double x);

struct Damping {
  double gamma = 1.0;
  CommunicationFunction psi;  // empty: no alignment term
};

std::vector<double> psi_matrix(const Grid& g, const CommunicationFunction& psi);

// Linear damping plus nonlocal alignment, cached for a grid.
class DampingOperator {
 public:
  DampingOperator(const Grid& g, const Damping& d);
  // -gamma rho_i u_i - rho_i sum_j dx_j (u_i - u_j) rho_j psi_ij
  void evaluate(std::span<const double> rho, std::span<const double> u, std::span<double> out) const;
  // dissipation identity terms: -gamma sum dx rho u^2 - 1/2 sum sum dx dx rho rho (u_i-u_j)^2 psi_ij
  double dissipation(std::span<const double> rho, std::span<const double> u) const;
  double gamma() const { return gamma_; }
  bool has_alignment() const { return conv_.has_value(); }

 private:
  std::vector<double> widths_;
  double gamma_;
  std::optional<GridConvolution> conv_;
};

InterfaceStates reconstruct_first_order(const Grid& g, const State& s, std::span<const double> H,
                                        const PressureLaw& law, InterfaceRule rule,
                                        double eps_vac = kVacuumDensity);

SourceTerms first_order_sources(const Grid& g, const State& s, const InterfaceStates& faces,
                                const PressureLaw& law, const DampingOperator* damping,
                                double eps_vac = kVacuumDensity);

BoundaryValues muscl_boundary_values(const Grid& g, const State& s, std::span<const double> H,
                                     const PressureLaw& law, HReconstruction mode = HReconstruction::composite,
                                     double eps_vac = kVacuumDensity);

InterfaceStates reconstruct_second_order(const Grid& g, const State& s, const BoundaryValues& bv,
                                         const PressureLaw& law, InterfaceRule rule,
                                         double eps_vac = kVacuumDensity);

SourceTerms second_order_sources(const Grid& g, const State& s, const BoundaryValues& bv,
                                 const InterfaceStates& faces, const PressureLaw& law,
                                 const DampingOperator* damping, double eps_vac = kVacuumDensity);

double minmod(double a, double b);

}  // namespace wbfv
