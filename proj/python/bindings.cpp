#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wbfv/config.hpp"
#include "wbfv/diagnostics.hpp"
#include "wbfv/flux.hpp"
#include "wbfv/free_energy.hpp"
#include "wbfv/grid.hpp"
#include "wbfv/integrator.hpp"
#include "wbfv/scenario.hpp"

namespace py = pybind11;
using namespace wbfv;

namespace {

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

PYBIND11_MODULE(_wbfv, m) {
  m.doc() = "well-balanced finite-volume solver core";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<Grid>(m, "Grid")
      .def(py::init<std::vector<double>>(), py::arg("faces"))
      .def_static("uniform", &Grid::uniform, py::arg("a"), py::arg("b"), py::arg("n"))
      .def("__len__", &Grid::size)
      .def_property_readonly("faces", [](const Grid& g) { return vec(g.faces()); })
      .def_property_readonly("centers", [](const Grid& g) { return vec(g.centers()); })
      .def_property_readonly("widths", [](const Grid& g) { return vec(g.widths()); })
      .def_property_readonly("lower", &Grid::lower)
      .def_property_readonly("upper", &Grid::upper);

  py::class_<State>(m, "State")
      .def(py::init<std::vector<double>, std::vector<double>, double>(), py::arg("rho"), py::arg("mom"),
           py::arg("time") = 0.0)
      .def_readwrite("rho", &State::rho)
      .def_readwrite("mom", &State::mom)
      .def_readwrite("time", &State::time);

  m.def("total_mass", py::overload_cast<const Grid&, const State&>(&total_mass));
  m.def("total_momentum", &total_momentum);
  m.def("center_of_mass", &center_of_mass);

  py::class_<PressureLaw>(m, "PressureLaw")
      .def_static("ideal_gas", &PressureLaw::ideal_gas)
      .def_static("power_law", &PressureLaw::power_law, py::arg("m"))
      .def_static("scaled_ideal", &PressureLaw::scaled_ideal, py::arg("sigma"))
      .def("pi", &PressureLaw::pi)
      .def("pi_prime", &PressureLaw::pi_prime)
      .def("xi", &PressureLaw::xi)
      .def("pressure", &PressureLaw::pressure)
      .def("admits_vacuum", &PressureLaw::admits_vacuum)
      .def("__repr__", &PressureLaw::describe);

  py::class_<ExternalPotential>(m, "ExternalPotential")
      .def_static("none", &ExternalPotential::none)
      .def_static("quadratic", &ExternalPotential::quadratic, py::arg("a") = 1.0)
      .def_static("double_well", &ExternalPotential::double_well, py::arg("a"), py::arg("b"))
      .def_static("custom", &ExternalPotential::custom, py::arg("values"))
      .def("__call__", &ExternalPotential::operator());

  py::class_<InteractionKernel>(m, "InteractionKernel")
      .def_static("none", &InteractionKernel::none)
      .def_static("quadratic", &InteractionKernel::quadratic)
      .def_static("homogeneous", &InteractionKernel::homogeneous, py::arg("alpha"))
      .def_static("morse", &InteractionKernel::morse)
      .def_static("hard_rods", &InteractionKernel::hard_rods, py::arg("length"))
      .def("__call__", &InteractionKernel::operator());

  py::class_<FreeEnergyModel>(m, "FreeEnergyModel")
      .def(py::init([](const PressureLaw& p, const ExternalPotential& v, const InteractionKernel& w) {
             FreeEnergyModel fm;
             fm.pressure = p;
             fm.potential = v;
             fm.kernel = w;
             if (fm.hard_rods()) fm.nonlinearity = Nonlinearity::log_complement;
             fm.validate();
             return fm;
           }),
           py::arg("pressure"), py::arg("potential") = ExternalPotential::none(),
           py::arg("kernel") = InteractionKernel::none())
      .def_readwrite("pressure", &FreeEnergyModel::pressure)
      .def_readwrite("potential", &FreeEnergyModel::potential)
      .def_readwrite("kernel", &FreeEnergyModel::kernel);

  py::enum_<FluxKind>(m, "FluxKind").value("llf", FluxKind::llf).value("kinetic", FluxKind::kinetic);
  py::enum_<InterfaceRule>(m, "InterfaceRule").value("max", InterfaceRule::max).value("average", InterfaceRule::average);

  py::class_<SchemeConfig>(m, "SchemeConfig")
      .def(py::init<>())
      .def_readwrite("order", &SchemeConfig::order)
      .def_readwrite("flux", &SchemeConfig::flux)
      .def_readwrite("rule", &SchemeConfig::rule)
      .def_readwrite("cfl", &SchemeConfig::cfl)
      .def_readwrite("gamma", &SchemeConfig::gamma)
      .def_readwrite("psi", &SchemeConfig::psi)
      .def_readwrite("eps_vac", &SchemeConfig::eps_vac);

  m.def("cucker_smale_psi", &cucker_smale_psi);

  py::class_<DiagnosticsRecord>(m, "DiagnosticsRecord")
      .def_readonly("time", &DiagnosticsRecord::time)
      .def_readonly("mass", &DiagnosticsRecord::mass)
      .def_readonly("momentum", &DiagnosticsRecord::momentum)
      .def_readonly("kinetic", &DiagnosticsRecord::kinetic)
      .def_readonly("free_energy", &DiagnosticsRecord::free_energy)
      .def_readonly("total_energy", &DiagnosticsRecord::total_energy)
      .def_readonly("center_of_mass", &DiagnosticsRecord::center_of_mass)
      .def_readonly("dissipation", &DiagnosticsRecord::dissipation)
      .def_readonly("variation", &DiagnosticsRecord::variation)
      .def_readonly("entropy", &DiagnosticsRecord::entropy);

  py::class_<Scheme>(m, "Scheme")
      .def(py::init<const Grid&, const FreeEnergyModel&, const SchemeConfig&, bool>(), py::arg("grid"),
           py::arg("model"), py::arg("config"), py::arg("force") = false)
      .def("rhs", [](const Scheme& s, const State& u) {
        const Rhs r = s.rhs(u);
        return py::make_tuple(r.rho, r.mom);
      })
      .def("cfl_dt", &Scheme::cfl_dt, py::arg("state"), py::arg("t_end"))
      .def("step", [](const Scheme& s, const State& u, double dt) { return s.step(u, dt); })
      .def("diagnose", &Scheme::diagnose, py::arg("state"), py::arg("per_cell") = false);

  m.def(
      "run",
      [](const Scheme& scheme, const State& s0, double t_end, double snapshot_interval, bool stop_at_steady) {
        RunOptions opt;
        opt.t_end = t_end;
        opt.snapshot_interval = snapshot_interval;
        opt.stop_at_steady = stop_at_steady;
        Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = run(scheme, s0, opt);
        }
        py::dict d;
        d["snapshots"] = tr.snapshots;
        d["history"] = tr.history;
        d["steps"] = tr.steps;
        d["reached_steady"] = tr.reached_steady;
        d["max_mass_drift"] = tr.monitors.max_mass_drift;
        d["min_density"] = tr.monitors.min_density;
        d["max_energy_increase"] = tr.monitors.max_energy_increase;
        return d;
      },
      py::arg("scheme"), py::arg("state"), py::arg("t_end"), py::arg("snapshot_interval") = 0.0,
      py::arg("stop_at_steady") = false);

  m.def(
      "physical_flux", [](double rho, double mom, const PressureLaw& law) {
        const FaceFlux f = physical_flux({rho, mom}, law);
        return py::make_tuple(f.mass, f.momentum);
      });
  m.def("llf_flux", [](double rl, double ml, double rr, double mr, const PressureLaw& law) {
    const FaceFlux f = llf_flux({rl, ml}, {rr, mr}, law);
    return py::make_tuple(f.mass, f.momentum);
  });
  m.def("kinetic_flux", [](double rl, double ml, double rr, double mr, const PressureLaw& law) {
    const FaceFlux f = kinetic_flux({rl, ml}, {rr, mr}, law);
    return py::make_tuple(f.mass, f.momentum);
  });

  m.def(
      "solve_steady_state",
      [](const Grid& g, const FreeEnergyModel& model, double mass) {
        const auto r = solve_steady_state(g, model, mass);
        return py::make_tuple(r.state, r.constant, r.residual);
      },
      py::arg("grid"), py::arg("model"), py::arg("mass"));
  m.def("potential_field", &potential_field);
  m.def("free_energy_variation",
        py::overload_cast<const Grid&, const State&, const FreeEnergyModel&, double>(&free_energy_variation),
        py::arg("grid"), py::arg("state"), py::arg("model"), py::arg("eps_vac") = kVacuumDensity);
  m.def("total_energy", &total_energy, py::arg("grid"), py::arg("state"), py::arg("model"),
        py::arg("eps_vac") = kVacuumDensity);
  m.def("packing_fraction", py::overload_cast<const Grid&, const State&, double>(&packing_fraction));

  // scenario layer: configs travel as text
  m.def("parse_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        "validate a config and return its canonical form");
  m.def("serialize_config", [](const std::string& path) { return serialize_config(load_config(path)); });

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("id", &RunReport::id)
      .def_readonly("completed", &RunReport::completed)
      .def_readonly("error", &RunReport::error)
      .def_readonly("final", &RunReport::final)
      .def_readonly("final_state", &RunReport::final_state)
      .def_readonly("steps", &RunReport::steps)
      .def_readonly("snapshot_paths", &RunReport::snapshot_paths)
      .def_readonly("timeseries_path", &RunReport::timeseries_path)
      .def_readonly("report_path", &RunReport::report_path)
      .def_property_readonly("preservation",
                             [](const RunReport& r) {
                               py::list out;
                               for (const auto& p : r.preservation)
                                 out.append(py::make_tuple(p.order, p.cells, p.l1, p.linf));
                               return out;
                             })
      .def_property_readonly("convergence",
                             [](const RunReport& r) {
                               py::list out;
                               for (const auto& c : r.convergence)
                                 out.append(py::make_tuple(c.order, c.cells, c.error, c.rate));
                               return out;
                             })
      .def_property_readonly("branch",
                             [](const RunReport& r) {
                               py::list out;
                               for (const auto& b : r.branch) out.append(py::make_tuple(b.sigma, b.center_of_mass));
                               return out;
                             })
      .def("ok", &RunReport::ok);

  auto load = [](const std::string& path, const std::vector<std::string>& overrides) {
    ScenarioConfig cfg = load_config(path);
    apply_overrides(cfg, overrides);
    return cfg;
  };
  m.def(
      "run_scenario",
      [load](const std::string& path, const std::vector<std::string>& overrides, const std::string& out) {
        const auto cfg = load(path, overrides);
        py::gil_scoped_release release;
        return run_scenario(cfg, OutputOptions{out});
      },
      py::arg("path"), py::arg("overrides") = std::vector<std::string>{}, py::arg("output_dir") = "");
  m.def(
      "preservation_test",
      [load](const std::string& path, double t_end, const std::vector<std::string>& overrides) {
        const auto cfg = load(path, overrides);
        py::gil_scoped_release release;
        return preservation_test(cfg, t_end);
      },
      py::arg("path"), py::arg("t_end") = 5.0, py::arg("overrides") = std::vector<std::string>{});
  m.def(
      "convergence_study",
      [load](const std::string& path, const std::vector<std::string>& overrides, std::vector<int> orders) {
        const auto cfg = load(path, overrides);
        py::gil_scoped_release release;
        return convergence_study(cfg, {}, orders);
      },
      py::arg("path"), py::arg("overrides") = std::vector<std::string>{}, py::arg("orders") = std::vector<int>{1, 2});
  m.def(
      "continuation_study",
      [load](const std::string& path, const std::vector<std::string>& overrides) {
        const auto cfg = load(path, overrides);
        py::gil_scoped_release release;
        return continuation_study(cfg);
      },
      py::arg("path"), py::arg("overrides") = std::vector<std::string>{});
}
