#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

#include "wbfv/flux.hpp"

using namespace wbfv;
using doctest::Approx;

namespace {

// Half moments of the flat Maxwellian by quadrature: uniform density rho/(2c)
// on [u - c, u + c], c = sqrt(3 P/rho).
FaceFlux quadrature_half(double rho, double u, const PressureLaw& law, bool positive) {
  if (rho <= 0.0) return {};
  const double c = std::sqrt(3.0 * law.pressure_over_density(rho));
  double lo = u - c, hi = u + c;
  if (positive) lo = std::max(lo, 0.0);
  else hi = std::min(hi, 0.0);
  if (hi <= lo) return {};
  const double f = rho / (2.0 * c);
  using Q = boost::math::quadrature::gauss_kronrod<double, 15>;
  return {Q::integrate([&](double v) { return f * v; }, lo, hi),
          Q::integrate([&](double v) { return f * v * v; }, lo, hi)};
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("physical flux") {
  const FaceFlux f = physical_flux({2.0, 3.0}, PressureLaw::power_law(2.0));
  CHECK(f.mass == 3.0);
  CHECK(f.momentum == Approx(4.5 + 4.0));
  const FaceFlux v = physical_flux({0.0, 0.0}, PressureLaw::power_law(2.0));
  CHECK(v.mass == 0.0);
  CHECK(v.momentum == 0.0);
}

TEST_CASE("llf examples") {
  const auto gas = PressureLaw::ideal_gas();
  const FaceFlux rest = llf_flux({1.0, 0.0}, {1.0, 0.0}, gas);
  CHECK(rest.mass == 0.0);
  CHECK(rest.momentum == Approx(1.0));
  // F(UL) = (1, 2), F(UR) = (-1, 2), lambda = 2, UR - UL = (0, -2)
  const FaceFlux colliding = llf_flux({1.0, 1.0}, {1.0, -1.0}, gas);
  CHECK(colliding.mass == Approx(0.0));
  CHECK(colliding.momentum == Approx(4.0));
}

TEST_CASE("llf refuses vacuum with a power law") {
  CHECK_THROWS_AS(llf_flux({0.0, 0.0}, {1.0, 0.0}, PressureLaw::power_law(2.0)), FluxVacuumError);
}

TEST_CASE("kinetic flux examples") {
  const auto law = PressureLaw::power_law(2.0);
  const FaceFlux am = kinetic_half_flux(1.0, 0.0, law, true);
  const FaceFlux ap = kinetic_half_flux(1.0, 0.0, law, false);
  CHECK(am.mass == Approx(std::sqrt(3.0) / 4.0).epsilon(1e-14));
  CHECK(am.momentum == Approx(0.5).epsilon(1e-14));
  CHECK(ap.mass == Approx(-std::sqrt(3.0) / 4.0).epsilon(1e-14));
  CHECK(ap.momentum == Approx(0.5).epsilon(1e-14));
  const FaceFlux f = kinetic_flux({1.0, 0.0}, {1.0, 0.0}, law);
  CHECK(std::abs(f.mass) <= 1e-15);
  CHECK(f.momentum == Approx(1.0).epsilon(1e-14));

  const FaceFlux dry = kinetic_flux({0.0, 0.0}, {0.0, 0.0}, law);
  CHECK(dry.mass == 0.0);
  CHECK(dry.momentum == 0.0);
}

TEST_CASE("supersonic kinetic state sends everything one way") {
  const auto law = PressureLaw::power_law(2.0);
  const double rho = 0.5, u = 2.0;  // c = sqrt(3/2) < u
  const FaceFlux am = kinetic_half_flux(rho, u, law, true);
  const FaceFlux ap = kinetic_half_flux(rho, u, law, false);
  const FaceFlux F = physical_flux({rho, rho * u}, law);
  CHECK(am.mass == Approx(F.mass).epsilon(1e-14));
  CHECK(am.momentum == Approx(F.momentum).epsilon(1e-14));
  CHECK(ap.mass == 0.0);
  CHECK(ap.momentum == 0.0);
}

TEST_CASE("kinetic half moments sum to the physical flux and match quadrature") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> lr(-4, 1), uu(-3, 3);
  for (double m : {1.3, 1.5, 2.0, 3.0}) {
    const auto law = PressureLaw::power_law(m);
    for (int k = 0; k < 250; ++k) {
      const double rho = std::pow(10.0, lr(rng)), u = uu(rng);
      const FaceFlux am = kinetic_half_flux(rho, u, law, true);
      const FaceFlux ap = kinetic_half_flux(rho, u, law, false);
      const FaceFlux F = physical_flux({rho, rho * u}, law);
      CHECK(close(am.mass + ap.mass, F.mass, 1e-12));
      CHECK(close(am.momentum + ap.momentum, F.momentum, 1e-12));
      const FaceFlux qm = quadrature_half(rho, u, law, true), qp = quadrature_half(rho, u, law, false);
      CHECK(close(am.mass, qm.mass, 1e-8));
      CHECK(close(am.momentum, qm.momentum, 1e-8));
      CHECK(close(ap.mass, qp.mass, 1e-8));
      CHECK(close(ap.momentum, qp.momentum, 1e-8));
    }
  }
}

TEST_CASE("flux consistency on equal states") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> lr(-3, 1), uu(-3, 3);
  for (const auto& law : {PressureLaw::ideal_gas(), PressureLaw::scaled_ideal(0.3)})
    for (int k = 0; k < 200; ++k) {
      const double rho = std::pow(10.0, lr(rng));
      const Conserved U{rho, rho * uu(rng)};
      const FaceFlux a = llf_flux(U, U, law), F = physical_flux(U, law);
      CHECK(close(a.mass, F.mass, 1e-12));
      CHECK(close(a.momentum, F.momentum, 1e-12));
    }
  for (double m : {1.3, 2.0, 3.0})
    for (int k = 0; k < 200; ++k) {
      const auto law = PressureLaw::power_law(m);
      const double rho = std::pow(10.0, lr(rng));
      const Conserved U{rho, rho * uu(rng)};
      const FaceFlux a = kinetic_flux(U, U, law), F = physical_flux(U, law);
      CHECK(close(a.mass, F.mass, 1e-12));
      CHECK(close(a.momentum, F.momentum, 1e-12));
      const FaceFlux b = llf_flux(U, U, law);
      CHECK(close(b.mass, F.mass, 1e-12));
      CHECK(close(b.momentum, F.momentum, 1e-12));
    }
}

TEST_CASE("primitive forms agree with conserved forms") {
  const auto law = PressureLaw::power_law(1.5);
  const FaceFlux a = kinetic_flux({0.7, -0.35}, {0.2, 0.1}, law);
  const FaceFlux b = kinetic_flux_primitive(0.7, -0.5, 0.2, 0.5, law);
  CHECK(a.mass == Approx(b.mass).epsilon(1e-14));
  CHECK(a.momentum == Approx(b.momentum).epsilon(1e-14));
  const auto gas = PressureLaw::ideal_gas();
  const FaceFlux c = llf_flux({0.7, -0.35}, {0.2, 0.1}, gas);
  const FaceFlux d = llf_flux_primitive(0.7, -0.5, 0.2, 0.5, gas);
  CHECK(c.mass == Approx(d.mass).epsilon(1e-14));
  CHECK(c.momentum == Approx(d.momentum).epsilon(1e-14));
}

TEST_CASE("max wave speed") {
  CHECK(max_wave_speed(State({1.0, 1.0}, {0.0, 0.0}), PressureLaw::ideal_gas(), FluxKind::llf) == Approx(1.0));
  CHECK(max_wave_speed(State({1.0, 1.0}, {2.0, 2.0}), PressureLaw::power_law(2.0), FluxKind::kinetic) ==
        Approx(2.0 + std::sqrt(3.0)));
  CHECK(max_wave_speed(State(5), PressureLaw::power_law(2.0), FluxKind::kinetic) == 0.0);
  CHECK(max_wave_speed(State(5), PressureLaw::ideal_gas(), FluxKind::llf) == 0.0);
  CHECK(kinetic_reference_speed(State(std::vector<double>{0.01}, std::vector<double>{0.0}), PressureLaw::power_law(3.0)) == Approx(std::sqrt(3.0)));
}

TEST_CASE("homogeneous update keeps densities nonnegative under the CFL rule") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> lr(-3, 1), uu(-2, 2), coin(0, 1);
  const std::size_t n = 40;
  const double dx = 0.1;
  for (int trial = 0; trial < 200; ++trial) {
    const bool kinetic = trial % 2 == 0;
    const auto law = kinetic ? PressureLaw::power_law(1.3 + 0.5 * (trial % 4)) : PressureLaw::ideal_gas();
    State s(n);
    for (std::size_t i = 0; i < n; ++i) {
      // piecewise data with dry cells for the kinetic runs
      const bool dry = kinetic && coin(rng) < 0.3;
      s.rho[i] = dry ? 0.0 : std::pow(10.0, lr(rng));
      s.mom[i] = s.rho[i] * uu(rng);
    }
    const FluxKind kind = kinetic ? FluxKind::kinetic : FluxKind::llf;
    const double speed = max_wave_speed(s, law, kind);
    const double dt = (kinetic ? 0.9 : 0.5) * dx / speed;
    std::vector<FaceFlux> F(n + 1);
    for (std::size_t k = 1; k < n; ++k) {
      const Conserved L{s.rho[k - 1], s.mom[k - 1]}, R{s.rho[k], s.mom[k]};
      F[k] = kinetic ? kinetic_flux(L, R, law) : llf_flux(L, R, law);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double next = s.rho[i] - dt / dx * (F[i + 1].mass - F[i].mass);
      CHECK(next >= -1e-14 * std::max(1.0, s.rho[i]));
    }
  }
}
