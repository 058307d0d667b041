#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wbfv/diagnostics.hpp"
#include "wbfv/integrator.hpp"

using namespace wbfv;
using doctest::Approx;

namespace {

struct Setup {
  const char* name;
  FreeEnergyModel model;
  FluxKind flux;
  double gamma;
  bool align;
};

std::vector<Setup> steady_setups() {
  return {
      {"ideal gas, quadratic V", {PressureLaw::ideal_gas(), ExternalPotential::quadratic(1.0), {}, {}}, FluxKind::llf, 1.0, false},
      {"ideal gas, alignment", {PressureLaw::ideal_gas(), ExternalPotential::quadratic(1.0), {}, {}}, FluxKind::llf, 0.0, true},
      {"ideal gas, kinetic flux", {PressureLaw::ideal_gas(), ExternalPotential::quadratic(1.0), {}, {}}, FluxKind::kinetic, 1.0, false},
      {"power law, vacuum", {PressureLaw::power_law(2.0), ExternalPotential::quadratic(1.0), {}, {}}, FluxKind::kinetic, 1.0, false},
      {"power law 3, double well", {PressureLaw::power_law(3.0), ExternalPotential::double_well(0.25, 1.0), {}, {}}, FluxKind::kinetic, 1.0, false},
      {"ideal gas, morse kernel", {PressureLaw::ideal_gas(), ExternalPotential::quadratic(1.0), InteractionKernel::morse(), {}}, FluxKind::llf, 1.0, false},
      {"power law, quadratic kernel", {PressureLaw::power_law(2.0), {}, InteractionKernel::quadratic(), {}}, FluxKind::kinetic, 1.0, false},
  };
}

SchemeConfig make_cfg(int order, FluxKind flux, InterfaceRule rule, double gamma, bool align) {
  SchemeConfig c;
  c.order = order;
  c.flux = flux;
  c.rule = rule;
  c.gamma = gamma;
  if (align) c.psi = cucker_smale_psi;
  return c;
}

double max_abs(const Rhs& r) {
  double m = 0.0;
  for (double v : r.rho) m = std::max(m, std::abs(v));
  for (double v : r.mom) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("flat state at rest has zero right-hand side") {
  const Grid g = Grid::uniform(0, 1, 20);
  const FreeEnergyModel m{PressureLaw::ideal_gas(), {}, {}, {}};
  State s(20);
  for (double& r : s.rho) r = 0.7;
  for (int order : {1, 2}) {
    const Rhs r = semidiscrete_rhs(g, s, m, make_cfg(order, FluxKind::llf, InterfaceRule::max, 1.0, false));
    // walls: the boundary flux is zero and the wall pressure source cancels it
    CHECK(max_abs(r) <= 1e-15);
  }
}

TEST_CASE("discrete steady states are fixed points of the semidiscrete scheme") {
  const Grid g = Grid::uniform(-5, 5, 50);
  for (const auto& st : steady_setups()) {
    const std::string name = st.name;
    CAPTURE(name);
    const State s = solve_discrete_steady_state(g, st.model, 1.0);
    for (int order : {1, 2})
      for (auto rule : {InterfaceRule::max, InterfaceRule::average}) {
        // the averaged face potential lets a wet cell leak into a dry
        // neighbour, so compact supports are only balanced with the max rule
        if (rule == InterfaceRule::average && st.model.pressure.admits_vacuum()) continue;
        CAPTURE(order);
        const SchemeConfig c = make_cfg(order, st.flux, rule, st.gamma, st.align);
        CHECK(max_abs(semidiscrete_rhs(g, s, st.model, c)) <= 1e-13);
      }
  }
}

TEST_CASE("averaged face potential leaks at a wet/dry front") {
  const Grid g = Grid::uniform(-5, 5, 50);
  const FreeEnergyModel m{PressureLaw::power_law(2.0), ExternalPotential::quadratic(1.0), {}, {}};
  const State s = solve_discrete_steady_state(g, m, 1.0);
  const Rhs r = semidiscrete_rhs(g, s, m, make_cfg(1, FluxKind::kinetic, InterfaceRule::average, 1.0, false));
  CHECK(max_abs(r) > 1e-6);
}

TEST_CASE("both fluxes keep the ideal-gas steady state") {
  const Grid g = Grid::uniform(-5, 5, 50);
  const FreeEnergyModel m{PressureLaw::ideal_gas(), ExternalPotential::quadratic(1.0), {}, {}};
  const State s = solve_discrete_steady_state(g, m, 1.0);
  for (auto f : {FluxKind::llf, FluxKind::kinetic}) {
    const State out = ssp_rk3_step(g, s, m, make_cfg(2, f, InterfaceRule::max, 1.0, false), 0.05);
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(std::abs(out.rho[i] - s.rho[i]) <= 1e-14);
      CHECK(std::abs(out.mom[i]) <= 1e-14);
    }
  }
}

TEST_CASE("mass is conserved by the right-hand side") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> d(0.05, 1.0), v(-1.0, 1.0);
  const Grid g = Grid::uniform(-3, 3, 40);
  const FreeEnergyModel m{PressureLaw::ideal_gas(), ExternalPotential::quadratic(1.0), InteractionKernel::morse(), {}};
  for (int trial = 0; trial < 10; ++trial) {
    State s(40);
    for (std::size_t i = 0; i < 40; ++i) {
      s.rho[i] = d(rng);
      s.mom[i] = s.rho[i] * v(rng);
    }
    for (int order : {1, 2}) {
      const Rhs r = semidiscrete_rhs(g, s, m, make_cfg(order, FluxKind::llf, InterfaceRule::max, 1.0, true));
      double sum = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < 40; ++i) {
        sum += g.width(i) * r.rho[i];
        scale += g.width(i) * std::abs(r.rho[i]);
      }
      CHECK(std::abs(sum) <= 1e-15 * std::max(1.0, scale) * 40);
    }
  }
}

TEST_CASE("time step examples") {
  const FreeEnergyModel m{PressureLaw::ideal_gas(), {}, {}, {}};
  const Grid g = Grid::uniform(0, 1, 10);
  State s(10);
  for (double& r : s.rho) r = 1.0;
  const SchemeConfig c = make_cfg(1, FluxKind::llf, InterfaceRule::max, 1.0, false);
  CHECK(cfl_dt(g, s, m, c, 100.0) == Approx(0.07).epsilon(1e-14));

  const Grid h = Grid::uniform(0, 2, 10);  // dx = 0.2
  State fast(10);
  for (std::size_t i = 0; i < 10; ++i) {
    fast.rho[i] = 1.0;
    fast.mom[i] = 1.0;  // u = 1, speed 2
  }
  CHECK(cfl_dt(h, fast, m, c, 100.0) == Approx(0.07).epsilon(1e-14));

  fast.time = 99.99;
  CHECK(cfl_dt(h, fast, m, c, 100.0) == Approx(0.01).epsilon(1e-10));

  // a fully dry power-law state has no signal speed
  const FreeEnergyModel pm{PressureLaw::power_law(2.0), {}, {}, {}};
  State dry(10);
  dry.time = 1.5;
  CHECK(cfl_dt(h, dry, pm, make_cfg(1, FluxKind::kinetic, InterfaceRule::max, 1.0, false), 2.0) == Approx(0.5));
}

TEST_CASE("SSP-RK3 on linear decay") {
  const State s({1.0, 2.0}, {0.5, -1.0});
  const RhsFunction L = [](const State& u) {
    Rhs r;
    r.rho = u.rho;
    r.mom = u.mom;
    for (double& v : r.rho) v = -v;
    for (double& v : r.mom) v = -v;
    return r;
  };
  const State out = ssp_rk3(s, 0.1, L);
  const double amp = 1.0 - 0.1 + 0.005 - 0.001 / 6.0;
  CHECK(amp == Approx(0.9048333).epsilon(1e-7));
  CHECK(out.rho[0] == Approx(amp).epsilon(1e-15));
  CHECK(out.rho[1] == Approx(2.0 * amp).epsilon(1e-15));
  CHECK(out.mom[1] == Approx(-amp).epsilon(1e-15));
  CHECK(std::abs(out.rho[0] - std::exp(-0.1)) < 1e-5);
  CHECK(out.time == Approx(0.1));

  const State same = ssp_rk3(s, 0.0, L);
  CHECK(same.rho == s.rho);
  CHECK(same.mom == s.mom);
}

TEST_CASE("SSP-RK3 clamps tiny negatives and rejects real ones") {
  const State s({1e-13, 1.0}, {0.0, 0.0});
  const RhsFunction drain = [](const State& u) {
    Rhs r;
    r.rho = {u.rho[0] > 0.0 ? -6e-12 : 0.0, 0.0};
    r.mom = {0.0, 0.0};
    return r;
  };
  double lowest = 0.0;
  const State out = ssp_rk3(s, 0.1, drain, &lowest);
  CHECK(out.rho[0] == 0.0);
  CHECK(lowest < 0.0);
  const RhsFunction crash = [](const State&) { return Rhs{{-1.0, 0.0}, {0.0, 0.0}}; };
  CHECK_THROWS_AS(ssp_rk3(s, 0.1, crash), PositivityError);
  CHECK_THROWS_AS(ssp_rk3(s, -0.1, crash), Error);
}

TEST_CASE("pairing rule") {
  const Grid g = Grid::uniform(0, 1, 10);
  const FreeEnergyModel m{PressureLaw::power_law(2.0), {}, {}, {}};
  CHECK_THROWS_AS(Scheme(g, m, make_cfg(1, FluxKind::llf, InterfaceRule::max, 1.0, false)), Error);
  CHECK_NOTHROW(Scheme(g, m, make_cfg(1, FluxKind::llf, InterfaceRule::max, 1.0, false), true));
  SchemeConfig bad;
  bad.cfl = 1.5;
  CHECK_THROWS_AS(bad.validate(FreeEnergyModel{}), Error);
}

TEST_CASE("run with zero end time returns the initial state") {
  const Grid g = Grid::uniform(-5, 5, 50);
  const FreeEnergyModel m{PressureLaw::ideal_gas(), ExternalPotential::quadratic(1.0), {}, {}};
  State s(50);
  for (std::size_t i = 0; i < 50; ++i) s.rho[i] = 0.1 + std::exp(-g.center(i) * g.center(i));
  const Trajectory t = run(g, s, m, make_cfg(1, FluxKind::llf, InterfaceRule::max, 1.0, false), 0.0);
  REQUIRE(t.snapshots.size() == 1);
  CHECK(t.final_state().rho == s.rho);
  CHECK(t.steps == 0);
}

TEST_CASE("steady state survives five time units") {
  const Grid g = Grid::uniform(-5, 5, 50);
  const FreeEnergyModel m{PressureLaw::ideal_gas(), ExternalPotential::quadratic(1.0), {}, {}};
  const State s = solve_discrete_steady_state(g, m, 1.0);
  for (int order : {1, 2}) {
    const Trajectory t = run(g, s, m, make_cfg(order, FluxKind::llf, InterfaceRule::max, 1.0, false), 5.0);
    CHECK(linf_error(t.final_state().rho, s.rho) <= 1e-13);
    CHECK(t.final_state().time == Approx(5.0).epsilon(1e-14));
  }
}

TEST_CASE("symmetric data keeps a centred mass") {
  const Grid g = Grid::uniform(-5, 5, 50);
  const FreeEnergyModel m{PressureLaw::ideal_gas(), ExternalPotential::quadratic(1.0), {}, {}};
  const double k = std::numbers::pi / 10.0;
  State s(50);
  for (std::size_t i = 0; i < 50; ++i) {
    const double x = g.center(i);
    s.rho[i] = 0.2 + 5.0 * std::cos(k * x);
    s.mom[i] = -0.05 * s.rho[i] * std::sin(k * x);
  }
  for (int order : {1, 2}) {
    const Scheme scheme(g, m, make_cfg(order, FluxKind::llf, InterfaceRule::max, 1.0, false));
    RunOptions opt;
    opt.t_end = 5.0;
    double worst = 0.0, asym = 0.0;
    opt.on_step = [&](const State& u) {
      worst = std::max(worst, std::abs(center_of_mass(g, u)));
      for (std::size_t i = 0; i < 25; ++i) asym = std::max(asym, std::abs(u.rho[i] - u.rho[49 - i]));
    };
    const Trajectory t = run(scheme, s, opt);
    CHECK(worst <= 1e-12);
    CHECK(asym <= 1e-12);
    CHECK(t.monitors.mass_ok());
    CHECK(t.monitors.energy_ok());
    CHECK(t.monitors.dissipation_ok());
  }
}

TEST_CASE("vacuum run keeps positivity and mass") {
  const Grid g = Grid::uniform(-3, 3, 60);
  const FreeEnergyModel m{PressureLaw::power_law(2.0), ExternalPotential::quadratic(1.0), {}, {}};
  State s(60);
  for (std::size_t i = 0; i < 60; ++i) {
    const double x = g.center(i);
    s.rho[i] = std::abs(x - 0.5) < 1.0 ? 0.5 : 0.0;
    s.mom[i] = 0.3 * s.rho[i];
  }
  for (int order : {1, 2}) {
    const Trajectory t = run(g, s, m, make_cfg(order, FluxKind::kinetic, InterfaceRule::max, 1.0, false), 2.0);
    CHECK(t.monitors.positivity_ok());
    CHECK(t.monitors.mass_ok());
    for (double r : t.final_state().rho) CHECK(r >= 0.0);
  }
}
