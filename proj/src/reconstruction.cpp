#include "wbfv/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wbfv {

double interface_H(double h_left, double h_right, InterfaceRule rule) {
  if (rule == InterfaceRule::max) return std::max(h_left, h_right);
  return 0.5 * (h_left + h_right);
}

double minmod(double a, double b) {
  if (a > 0.0 && b > 0.0) return std::min(a, b);
  if (a < 0.0 && b < 0.0) return std::max(a, b);
  return 0.0;
}

std::vector<double> SourceTerms::total() const {
  std::vector<double> t(damping.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = right_face[i] + left_face[i] + damping[i];
    if (!centered.empty()) t[i] += centered[i];
  }
  return t;
}

double cucker_smale_psi(double x) { return 1.0 / std::sqrt(std::sqrt(1.0 + x * x)); }

std::vector<double> psi_matrix(const Grid& g, const CommunicationFunction& psi) {
  if (!psi) return std::vector<double>(g.size() * g.size(), 0.0);
  return GridConvolution(g, [&psi](double d, double) { return psi(d); }).dense();
}

DampingOperator::DampingOperator(const Grid& g, const Damping& d)
    : widths_(g.widths().begin(), g.widths().end()), gamma_(d.gamma) {
  if (!(gamma_ >= 0.0)) throw Error("damping coefficient gamma must be >= 0");
  if (d.psi) {
    const CommunicationFunction psi = d.psi;
    conv_.emplace(g, [psi](double dist, double) { return psi(dist); });
  }
}

void DampingOperator::evaluate(std::span<const double> rho, std::span<const double> u,
                               std::span<double> out) const {
  const std::size_t n = rho.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = -gamma_ * rho[i] * u[i];
  if (!conv_) return;
  std::vector<double> flux(n);
  for (std::size_t i = 0; i < n; ++i) flux[i] = rho[i] * u[i];
  const auto a = conv_->apply(rho);
  const auto b = conv_->apply(flux);
  for (std::size_t i = 0; i < n; ++i) out[i] -= rho[i] * (u[i] * a[i] - b[i]);
}

double DampingOperator::dissipation(std::span<const double> rho, std::span<const double> u) const {
  const std::size_t n = rho.size();
  double lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) lin += widths_[i] * rho[i] * u[i] * u[i];
  double d = -gamma_ * lin;
  if (!conv_) return d;
  double pair = 0.0;
  if (n <= 4096) {
    // explicit pair sum: every term is nonnegative
    for (std::size_t i = 0; i < n; ++i) {
      if (rho[i] == 0.0) continue;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double du = u[i] - u[j];
        acc += widths_[j] * rho[j] * du * du * conv_->entry(i, j);
      }
      pair += widths_[i] * rho[i] * acc;
    }
    pair *= 0.5;
  } else {
    std::vector<double> ru(n), ru2(n);
    for (std::size_t i = 0; i < n; ++i) {
      ru[i] = rho[i] * u[i];
      ru2[i] = ru[i] * u[i];
    }
    const auto a = conv_->apply(rho), b = conv_->apply(ru), c = conv_->apply(ru2);
    for (std::size_t i = 0; i < n; ++i)
      pair += widths_[i] * (0.5 * ru2[i] * a[i] - ru[i] * b[i] + 0.5 * rho[i] * c[i]);
  }
  return d - pair;
}

namespace {

// Density at a face after moving the potential from h_cell to h_face along
// Pi'(rho) + H = w. Equal potentials return the cell value untouched.
double shifted_density(const PressureLaw& law, double rho, double w, double h_cell, double h_face) {
  if (h_cell == h_face) return rho;
  return law.xi(w - h_face);
}

}  // namespace

InterfaceStates reconstruct_first_order(const Grid& g, const State& s, std::span<const double> H,
                                        const PressureLaw& law, InterfaceRule rule, double eps_vac) {
  check_compatible(g, s);
  const std::size_t n = g.size();
  const auto u = velocity(s, eps_vac);
  InterfaceStates f;
  f.rho_minus.resize(n - 1);
  f.rho_plus.resize(n - 1);
  f.u_minus.resize(n - 1);
  f.u_plus.resize(n - 1);
  f.H_face.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double hf = interface_H(H[k], H[k + 1], rule);
    f.H_face[k] = hf;
    const double rl = s.rho[k], rr = s.rho[k + 1];
    f.rho_minus[k] = is_dry(rl, law, eps_vac) ? 0.0 : shifted_density(law, rl, law.pi_prime(rl) + H[k], H[k], hf);
    f.rho_plus[k] =
        is_dry(rr, law, eps_vac) ? 0.0 : shifted_density(law, rr, law.pi_prime(rr) + H[k + 1], H[k + 1], hf);
    f.u_minus[k] = u[k];
    f.u_plus[k] = u[k + 1];
  }
  return f;
}

static void assemble_damping(const State& s, const DampingOperator* damping, double eps_vac,
                             std::vector<double>& out) {
  out.assign(s.size(), 0.0);
  if (damping) damping->evaluate(s.rho, velocity(s, eps_vac), out);
}

SourceTerms first_order_sources(const Grid& g, const State& s, const InterfaceStates& faces,
                                const PressureLaw& law, const DampingOperator* damping, double eps_vac) {
  check_compatible(g, s);
  const std::size_t n = g.size();
  SourceTerms src;
  src.right_face.assign(n, 0.0);
  src.left_face.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double pc = law.pressure(s.rho[i]);
    const double pr = i + 1 < n ? law.pressure(faces.rho_minus[i]) : 0.0;
    const double pl = i > 0 ? law.pressure(faces.rho_plus[i - 1]) : 0.0;
    src.right_face[i] = (pr - pc) / g.width(i);
    src.left_face[i] = (pc - pl) / g.width(i);
  }
  assemble_damping(s, damping, eps_vac, src.damping);
  return src;
}

BoundaryValues muscl_boundary_values(const Grid& g, const State& s, std::span<const double> H,
                                     const PressureLaw& law, HReconstruction mode, double eps_vac) {
  check_compatible(g, s);
  const std::size_t n = g.size();
  if (n < 3) throw Error("second-order reconstruction needs at least 3 cells");
  const auto u = velocity(s, eps_vac);
  const bool log_law = !law.admits_vacuum();
  const double ninf = -std::numeric_limits<double>::infinity();

  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = (log_law && s.rho[i] <= 0.0) ? ninf : law.pi_prime(s.rho[i]) + H[i];

  BoundaryValues bv;
  for (auto* v : {&bv.rho_l, &bv.rho_r, &bv.u_l, &bv.u_r, &bv.H_l, &bv.H_r, &bv.w_l, &bv.w_r}) v->resize(n);

  const bool uniform = g.is_uniform();
  auto half_jump = [&](std::span<const double> q, std::size_t i) {
    if (uniform) return 0.5 * minmod(q[i] - q[i - 1], q[i + 1] - q[i]);
    const double dl = (q[i] - q[i - 1]) / (g.center(i) - g.center(i - 1));
    const double dr = (q[i + 1] - q[i]) / (g.center(i + 1) - g.center(i));
    return 0.5 * g.width(i) * minmod(dl, dr);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double rho = s.rho[i];
    if (log_law && rho <= 0.0) {
      bv.rho_l[i] = bv.rho_r[i] = 0.0;
      bv.u_l[i] = bv.u_r[i] = 0.0;
      bv.H_l[i] = bv.H_r[i] = H[i];
      bv.w_l[i] = bv.w_r[i] = ninf;
      continue;
    }
    bool flat = i == 0 || i + 1 == n;
    if (!flat && log_law) flat = s.rho[i - 1] <= 0.0 || s.rho[i + 1] <= 0.0;
    const double jr = flat ? 0.0 : half_jump(s.rho, i);
    const double ju = flat ? 0.0 : half_jump(u, i);
    bv.rho_l[i] = std::max(0.0, rho - jr);
    bv.rho_r[i] = std::max(0.0, rho + jr);
    bv.u_l[i] = u[i] - ju;
    bv.u_r[i] = u[i] + ju;
    if (mode == HReconstruction::composite) {
      const double jw = flat ? 0.0 : half_jump(w, i);
      bv.w_l[i] = w[i] - jw;
      bv.w_r[i] = w[i] + jw;
      bv.H_l[i] = bv.w_l[i] - law.pi_prime(bv.rho_l[i]);
      bv.H_r[i] = bv.w_r[i] - law.pi_prime(bv.rho_r[i]);
      if (jw == 0.0 && jr == 0.0) bv.H_l[i] = bv.H_r[i] = H[i];
    } else {
      const double jh = flat ? 0.0 : half_jump(H, i);
      bv.H_l[i] = H[i] - jh;
      bv.H_r[i] = H[i] + jh;
      bv.w_l[i] = law.pi_prime(bv.rho_l[i]) + bv.H_l[i];
      bv.w_r[i] = law.pi_prime(bv.rho_r[i]) + bv.H_r[i];
    }
    // Thin layer: the half-cell potential drop exceeds the enthalpy, so the
    // centred source would see a dry side and push with P(xi(dH/2)) instead of
    // rho dH. Such cells fall back to flat values.
    if (!flat && law.admits_vacuum() && rho > 0.0) {
      const double hstar = 0.5 * (bv.H_l[i] + bv.H_r[i]);
      if (law.xi(bv.w_l[i] - hstar) <= 0.0 || law.xi(bv.w_r[i] - hstar) <= 0.0) {
        bv.rho_l[i] = bv.rho_r[i] = rho;
        bv.u_l[i] = bv.u_r[i] = u[i];
        bv.H_l[i] = bv.H_r[i] = H[i];
        bv.w_l[i] = bv.w_r[i] = w[i];
      }
    }
  }
  return bv;
}

InterfaceStates reconstruct_second_order(const Grid& g, const State& s, const BoundaryValues& bv,
                                         const PressureLaw& law, InterfaceRule rule, double eps_vac) {
  check_compatible(g, s);
  const std::size_t n = g.size();
  InterfaceStates f;
  f.rho_minus.resize(n - 1);
  f.rho_plus.resize(n - 1);
  f.u_minus.resize(n - 1);
  f.u_plus.resize(n - 1);
  f.H_face.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double hf = interface_H(bv.H_r[k], bv.H_l[k + 1], rule);
    f.H_face[k] = hf;
    f.rho_minus[k] = is_dry(s.rho[k], law, eps_vac)
                         ? 0.0
                         : shifted_density(law, bv.rho_r[k], bv.w_r[k], bv.H_r[k], hf);
    f.rho_plus[k] = is_dry(s.rho[k + 1], law, eps_vac)
                        ? 0.0
                        : shifted_density(law, bv.rho_l[k + 1], bv.w_l[k + 1], bv.H_l[k + 1], hf);
    f.u_minus[k] = bv.u_r[k];
    f.u_plus[k] = bv.u_l[k + 1];
  }
  return f;
}

SourceTerms second_order_sources(const Grid& g, const State& s, const BoundaryValues& bv,
                                 const InterfaceStates& faces, const PressureLaw& law,
                                 const DampingOperator* damping, double eps_vac) {
  check_compatible(g, s);
  const std::size_t n = g.size();
  SourceTerms src;
  src.right_face.assign(n, 0.0);
  src.left_face.assign(n, 0.0);
  src.centered.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_dry(s.rho[i], law, eps_vac)) continue;
    const double dx = g.width(i);
    const double p_l = law.pressure(bv.rho_l[i]), p_r = law.pressure(bv.rho_r[i]);
    const double pr = i + 1 < n ? law.pressure(faces.rho_minus[i]) : 0.0;
    const double pl = i > 0 ? law.pressure(faces.rho_plus[i - 1]) : 0.0;
    src.right_face[i] = (pr - p_r) / dx;
    src.left_face[i] = (p_l - pl) / dx;
    const double hstar = 0.5 * (bv.H_l[i] + bv.H_r[i]);
    const double star_l = shifted_density(law, bv.rho_l[i], bv.w_l[i], bv.H_l[i], hstar);
    const double star_r = shifted_density(law, bv.rho_r[i], bv.w_r[i], bv.H_r[i], hstar);
    src.centered[i] = (p_r - law.pressure(star_r) - p_l + law.pressure(star_l)) / dx;
  }
  assemble_damping(s, damping, eps_vac, src.damping);
  return src;
}

}  // namespace wbfv
