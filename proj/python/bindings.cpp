#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "squeeze_forge/dynamics.hpp"
#include "squeeze_forge/errors.hpp"
#include "squeeze_forge/io.hpp"
#include "squeeze_forge/optimize.hpp"
#include "squeeze_forge/protocols.hpp"
#include "squeeze_forge/squeezing.hpp"
#include "squeeze_forge/thermo.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace sqf;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Frequency-modulated quantum oscillator: squeezing, nonadiabaticity, work and bang-bang optimization";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<FrequencyProtocol>(m, "FrequencyProtocol")
      .def_property_readonly("duration", &FrequencyProtocol::duration)
      .def_property_readonly("omega0", &FrequencyProtocol::omega0)
      .def_property_readonly("omega1", &FrequencyProtocol::omega1)
      .def_property_readonly("num_segments", &FrequencyProtocol::size)
      .def("omega_at", &FrequencyProtocol::omega_at, py::arg("t"))
      .def("jump_times", &FrequencyProtocol::jump_times)
      .def("to_json", [](const FrequencyProtocol& p) { return protocol_to_json(p).dump(); })
      .def_static(
          "from_json", [](const std::string& text) { return protocol_from_json(json::parse(text)); },
          py::arg("text"))
      .def("validate", [](const FrequencyProtocol& p) {
        const auto report = validate(p);
        return py::make_tuple(report.ok(), report.summary());
      });

  m.def("build_constant", &build_constant, py::arg("omega"), py::arg("duration"));
  m.def("build_janszky_adam", &build_janszky_adam, py::arg("omega0"), py::arg("omega1"), py::arg("n"));
  m.def("build_sinusoidal", &build_sinusoidal, py::arg("omega0"), py::arg("omega1"), py::arg("periods"));
  m.def("build_linear_ramp", &build_linear_ramp, py::arg("omega0"), py::arg("omega1"), py::arg("duration"));

  py::class_<FundamentalState>(m, "FundamentalState")
      .def_readonly("t", &FundamentalState::t)
      .def_readonly("x", &FundamentalState::x)
      .def_readonly("dx", &FundamentalState::dx)
      .def_readonly("y", &FundamentalState::y)
      .def_readonly("dy", &FundamentalState::dy);

  py::class_<CovarianceTriple>(m, "CovarianceTriple")
      .def(py::init<double, double, double>(), py::arg("q2"), py::arg("p2"), py::arg("qp"))
      .def_readonly("q2", &CovarianceTriple::q2)
      .def_readonly("p2", &CovarianceTriple::p2)
      .def_readonly("qp", &CovarianceTriple::qp);

  m.def("segment_transfer", &segment_transfer, py::arg("omega"), py::arg("dt"));
  m.def(
      "propagate",
      [](const FrequencyProtocol& p, const std::vector<double>& grid) { return propagate(p, grid); },
      py::arg("protocol"), py::arg("grid"));
  m.def("uniform_grid", &uniform_grid, py::arg("tau"), py::arg("points"));
  m.def("covariance", &covariance, py::arg("state"), py::arg("omega0"));
  m.def("wronskian", &wronskian, py::arg("state"));

  py::class_<ThermoRecord>(m, "ThermoRecord")
      .def_readonly("t", &ThermoRecord::t)
      .def_readonly("omega", &ThermoRecord::omega)
      .def_readonly("qstar", &ThermoRecord::qstar)
      .def_readonly("energy", &ThermoRecord::energy)
      .def_readonly("total_work", &ThermoRecord::total_work)
      .def_readonly("delta_F", &ThermoRecord::delta_F)
      .def_readonly("irr_work", &ThermoRecord::irr_work);

  m.def("qstar_from_cov", &qstar_from_cov, py::arg("cov"), py::arg("omega"));
  m.def("qstar_husimi", &qstar_husimi, py::arg("state"), py::arg("omega0"), py::arg("omega"));
  m.def(
      "work_quantities",
      [](double q, double w0, double w1) {
        const auto w = work_quantities(q, w0, w1);
        return py::make_tuple(w.total_work, w.delta_F, w.irr_work);
      },
      py::arg("qstar_final"), py::arg("omega0"), py::arg("omega1"));
  m.def(
      "thermo_trajectory",
      [](const FrequencyProtocol& p, const std::vector<FundamentalState>& s) { return thermo_trajectory(p, s); },
      py::arg("protocol"), py::arg("states"));

  py::class_<SqueezingDecomposition>(m, "SqueezingDecomposition")
      .def(py::init<double, double>(), py::arg("r"), py::arg("theta"))
      .def_readonly("r", &SqueezingDecomposition::r)
      .def_readonly("theta", &SqueezingDecomposition::theta);

  py::class_<FockDistribution>(m, "FockDistribution")
      .def_readonly("omega", &FockDistribution::omega)
      .def_readonly("populations", &FockDistribution::populations)
      .def_property_readonly("nmax", &FockDistribution::nmax);

  py::class_<SqueezingEstimate>(m, "SqueezingEstimate")
      .def_readonly("energy", &SqueezingEstimate::energy)
      .def_readonly("qstar", &SqueezingEstimate::qstar)
      .def_readonly("r", &SqueezingEstimate::r)
      .def_readonly("beta", &SqueezingEstimate::beta)
      .def_readonly("clamped", &SqueezingEstimate::clamped);

  m.def("decompose", &decompose, py::arg("cov"), py::arg("omega"));
  m.def("reconstruct", &reconstruct, py::arg("dec"), py::arg("omega"));
  m.def("qstar_from_r", &qstar_from_r, py::arg("r"));
  m.def("r_from_qstar", &r_from_qstar, py::arg("qstar"));
  m.def("wirr_from_r", &wirr_from_r, py::arg("r"), py::arg("omega_final"));
  m.def(
      "fock_populations",
      [](double r, std::optional<std::size_t> nmax, double omega) { return fock_populations(r, nmax, omega); },
      py::arg("r"), py::arg("nmax") = py::none(), py::arg("omega") = 1.0);
  m.def("energy_from_populations", &energy_from_populations, py::arg("dist"));
  m.def("estimate_r", &estimate_r, py::arg("dist"));
  m.def(
      "sample_populations",
      [](const FockDistribution& d, std::size_t shots, std::uint64_t seed) {
        return sample_populations(d, shots, seed);
      },
      py::arg("dist"), py::arg("shots"), py::arg("seed"));

  py::class_<ControlProblem>(m, "ControlProblem")
      .def(py::init([](double lo, double hi, double horizon) {
             ControlProblem p{lo, hi, horizon, HorizonMode::Fixed};
             p.check();
             return p;
           }),
           py::arg("omega_low"), py::arg("omega_high"), py::arg("horizon"))
      .def_static("preset", &ControlProblem::preset, py::arg("name"), py::arg("jumps") = 3)
      .def_readonly("omega_low", &ControlProblem::omega_low)
      .def_readonly("omega_high", &ControlProblem::omega_high)
      .def_readonly("horizon", &ControlProblem::horizon);

  py::class_<OptimizationResult>(m, "OptimizationResult")
      .def_readonly("protocol", &OptimizationResult::protocol)
      .def_readonly("switch_times", &OptimizationResult::switch_times)
      .def_readonly("achieved_qstar", &OptimizationResult::achieved_qstar)
      .def_readonly("achieved_r", &OptimizationResult::achieved_r)
      .def_readonly("iterations", &OptimizationResult::iterations)
      .def_readonly("converged", &OptimizationResult::converged)
      .def_readonly("first_order_residual", &OptimizationResult::first_order_residual);

  m.def("objective", [](const FrequencyProtocol& p) { return objective(p); }, py::arg("protocol"));
  m.def(
      "switching_time_gradient",
      [](const FrequencyProtocol& p) {
        const auto g = switching_time_gradient(p);
        return py::make_tuple(g.objective, g.switch_times, g.gradient);
      },
      py::arg("protocol"));
  m.def(
      "solve_bangbang",
      [](const ControlProblem& problem, std::size_t n, const std::string& init, std::uint64_t seed,
         std::optional<std::vector<double>> initial) {
        SolverOptions opts;
        opts.seed = seed;
        if (init == "uniform") opts.init = InitStrategy::Uniform;
        else if (init == "random") opts.init = InitStrategy::Random;
        else if (init == "ja") opts.init = InitStrategy::JanszkyAdam;
        else if (init != "all") throw ConfigError("init must be all, uniform, random or ja");
        opts.initial_switch_times = std::move(initial);
        return solve_bangbang(problem, n, opts);
      },
      py::arg("problem"), py::arg("n_switches"), py::arg("init") = "all", py::arg("seed") = 0,
      py::arg("initial_switch_times") = py::none());
  m.def(
      "verify_stationarity",
      [](const FrequencyProtocol& p, const ControlProblem& problem) {
        const auto r = verify_stationarity(p, problem);
        py::dict d;
        d["stationary"] = r.stationary;
        d["sign_consistent"] = r.sign_consistent;
        d["relative_residual"] = r.relative_residual;
        d["max_crossing_distance"] = r.max_crossing_distance;
        d["singular_arc"] = r.singular_arc;
        return d;
      },
      py::arg("protocol"), py::arg("problem"));

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
