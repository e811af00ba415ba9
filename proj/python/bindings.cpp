#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "qbounce/airy.hpp"
#include "qbounce/basis.hpp"
#include "qbounce/commands.hpp"
#include "qbounce/config.hpp"
#include "qbounce/errors.hpp"
#include "qbounce/evolution.hpp"
#include "qbounce/operators.hpp"
#include "qbounce/perturbation.hpp"
#include "qbounce/thermal.hpp"

namespace py = pybind11;
using namespace qbounce;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum bouncer with internal degrees of freedom";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<UnsupportedRange>(m, "UnsupportedRange", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  m.def("airy_ai", py::vectorize(&airy_ai), py::arg("x"));
  m.def("airy_ai_prime", py::vectorize(&airy_ai_prime), py::arg("x"));
  py::class_<AiryZeroTable>(m, "AiryZeroTable")
      .def_readonly("zeros", &AiryZeroTable::zeros)
      .def_readonly("achieved_tolerance", &AiryZeroTable::achieved_tolerance);
  m.def("airy_zeros", &airy_zeros, py::arg("count"), py::arg("tol") = 1e-13);

  py::class_<BouncerParams>(m, "BouncerParams")
      .def(py::init([](double mass, double gravity, double hbar, double c) {
             BouncerParams p{mass, gravity, hbar, c};
             p.validate();
             return p;
           }),
           py::arg("mass"), py::arg("gravity"), py::arg("hbar"), py::arg("c"))
      .def_readonly("mass", &BouncerParams::mass)
      .def_readonly("gravity", &BouncerParams::gravity)
      .def_readonly("hbar", &BouncerParams::hbar)
      .def_readonly("c", &BouncerParams::c)
      .def("rest_energy", &BouncerParams::rest_energy);
  m.def("bouncer_unit_params", &bouncer_unit_params, py::arg("c"));

  py::class_<DerivedScales>(m, "DerivedScales")
      .def_readonly("k", &DerivedScales::k)
      .def_readonly("length_unit", &DerivedScales::length_unit)
      .def_readonly("energy_unit", &DerivedScales::energy_unit)
      .def_readonly("time_unit", &DerivedScales::time_unit);

  py::class_<EigenBasis>(m, "EigenBasis")
      .def_property_readonly("size", &EigenBasis::size)
      .def_property_readonly("params", &EigenBasis::params)
      .def_property_readonly("scales", &EigenBasis::scales)
      .def_property_readonly("alphas", &EigenBasis::alphas)
      .def_property_readonly("zero_table", &EigenBasis::zero_table)
      .def("alpha", &EigenBasis::alpha, py::arg("n"))
      .def("energy", &EigenBasis::energy, py::arg("n"))
      .def("norm", &EigenBasis::norm, py::arg("n"))
      .def("eigenfunction", [](const EigenBasis& b, int n, double z) { return eval_eigenfunction(b, n, z); },
           py::arg("n"), py::arg("z"));
  m.def("build_basis", &build_basis, py::arg("params"), py::arg("size"), py::arg("zero_tol") = 1e-13);

  py::class_<OperatorMatrix>(m, "OperatorMatrix")
      .def_readonly("reduced", &OperatorMatrix::reduced)
      .def_readonly("unit", &OperatorMatrix::unit)
      .def_readonly("max_error_estimate", &OperatorMatrix::max_error_estimate)
      .def_property_readonly("dim", &OperatorMatrix::dim)
      .def("matrix", &OperatorMatrix::si)
      .def("at", &OperatorMatrix::at, py::arg("m"), py::arg("n"))
      .def("asymmetry", &OperatorMatrix::asymmetry);
  m.def("position_matrix", &position_matrix, py::arg("basis"), py::arg("tol") = 1e-12);
  m.def("gram_matrix", &gram_matrix, py::arg("basis"), py::arg("tol") = 1e-12);
  m.def("kinetic_matrix", py::overload_cast<const EigenBasis&, double>(&kinetic_matrix), py::arg("basis"),
        py::arg("tol") = 1e-12);
  m.def("perturbation_cm_matrix", py::overload_cast<const EigenBasis&, double>(&perturbation_cm_matrix),
        py::arg("basis"), py::arg("tol") = 1e-12);

  py::class_<StateCoefficient>(m, "StateCoefficient")
      .def_readonly("m", &StateCoefficient::m)
      .def_readonly("coefficient", &StateCoefficient::coefficient);
  py::class_<PerturbedLevel>(m, "PerturbedLevel")
      .def_readonly("n", &PerturbedLevel::n)
      .def_readonly("internal_energy", &PerturbedLevel::internal_energy)
      .def_readonly("energy_correction", &PerturbedLevel::energy_correction)
      .def_readonly("state_correction", &PerturbedLevel::state_correction)
      .def_readonly("truncation_tail", &PerturbedLevel::truncation_tail);
  m.def("first_order_energy", &first_order_energy, py::arg("basis"), py::arg("v"), py::arg("n"),
        py::arg("internal_energy"));
  m.def("first_order_state", &first_order_state, py::arg("basis"), py::arg("v"), py::arg("n"),
        py::arg("internal_energy"));
  m.def("truncated_exact_energies", &truncated_exact_energies, py::arg("basis"), py::arg("v"),
        py::arg("internal_energy"));

  py::class_<InternalSpectrum>(m, "InternalSpectrum")
      .def_readonly("levels", &InternalSpectrum::levels)
      .def_readonly("degeneracies", &InternalSpectrum::degeneracies);
  m.def("two_level_spectrum", &two_level_spectrum, py::arg("gap"));
  m.def("ladder_spectrum", &ladder_spectrum, py::arg("spacing"), py::arg("count"));
  m.def("listed_spectrum", &listed_spectrum, py::arg("levels"), py::arg("degeneracies") = std::vector<int>{});
  py::class_<ThermalState>(m, "ThermalState")
      .def_readonly("spectrum", &ThermalState::spectrum)
      .def_readonly("temperature", &ThermalState::temperature)
      .def_readonly("beta", &ThermalState::beta)
      .def_readonly("weights", &ThermalState::weights)
      .def_readonly("partition_function", &ThermalState::partition_function)
      .def_readonly("mean_energy", &ThermalState::mean_energy)
      .def_readonly("variance", &ThermalState::variance);
  m.def("thermal_state", &thermal_state, py::arg("spectrum"), py::arg("temperature"),
        py::arg("boltzmann") = kBoltzmannSI);

  py::enum_<Backend>(m, "Backend")
      .value("exact_phase", Backend::exact_phase)
      .value("exact_reproject", Backend::exact_reproject)
      .value("first_order", Backend::first_order)
      .value("cumulant", Backend::cumulant);
  py::enum_<DampingConvention>(m, "DampingConvention")
      .value("second_cumulant", DampingConvention::second_cumulant)
      .value("printed", DampingConvention::printed);

  py::class_<CmState>(m, "CmState")
      .def_readonly("coefficients", &CmState::coefficients)
      .def_readonly("captured_norm", &CmState::captured_norm);
  m.def("state_from_coefficients", &state_from_coefficients, py::arg("coefficients"));
  m.def("gaussian_packet", &gaussian_packet, py::arg("basis"), py::arg("center"), py::arg("sigma"),
        py::arg("tol") = 1e-12);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init([](const Eigen::MatrixXcd& e) { return DensityMatrix{e}; }), py::arg("entries"))
      .def_static("from_state", &DensityMatrix::from_state, py::arg("state"))
      .def_readonly("entries", &DensityMatrix::entries)
      .def("trace_error", &DensityMatrix::trace_error)
      .def("hermiticity_error", &DensityMatrix::hermiticity_error)
      .def("purity", &DensityMatrix::purity)
      .def("min_eigenvalue", &DensityMatrix::min_eigenvalue)
      .def("validate", &DensityMatrix::validate);
  m.def("position_expectation", &position_expectation, py::arg("rho"), py::arg("z"));

  py::class_<PairSeries>(m, "PairSeries")
      .def_readonly("m", &PairSeries::m)
      .def_readonly("n", &PairSeries::n)
      .def_readonly("values", &PairSeries::values)
      .def_readonly("visibility", &PairSeries::visibility);
  py::class_<EvolutionResult>(m, "EvolutionResult")
      .def_readonly("backend", &EvolutionResult::backend)
      .def_readonly("times", &EvolutionResult::times)
      .def_readonly("z_expect", &EvolutionResult::z_expect)
      .def_readonly("purity", &EvolutionResult::purity)
      .def_readonly("pairs", &EvolutionResult::pairs)
      .def_readonly("warnings", &EvolutionResult::warnings)
      .def_readonly("diagnostics", &EvolutionResult::diagnostics);
  py::class_<CumulantStats>(m, "CumulantStats")
      .def_readonly("mean_energy", &CumulantStats::mean_energy)
      .def_readonly("variance", &CumulantStats::variance)
      .def_readonly("delta_rate", &CumulantStats::delta_rate)
      .def("delta", &CumulantStats::delta, py::arg("m"), py::arg("n"), py::arg("t"))
      .def("applied_exponent", &CumulantStats::applied_exponent, py::arg("m"), py::arg("n"), py::arg("t"));

  py::class_<EvolutionContext>(m, "EvolutionContext")
      .def(py::init([](const EigenBasis& basis, const ThermalState& thermal, std::vector<std::pair<int, int>> pairs,
                       DampingConvention damping, double tol) {
             return EvolutionContext{basis, position_matrix(basis, tol), thermal, std::move(pairs), damping, tol};
           }),
           py::arg("basis"), py::arg("thermal"), py::arg("tracked_pairs") = std::vector<std::pair<int, int>>{},
           py::arg("damping") = DampingConvention::second_cumulant, py::arg("quadrature_tol") = 1e-12)
      .def_readonly("basis", &EvolutionContext::basis)
      .def_readonly("position", &EvolutionContext::position)
      .def_readonly("thermal", &EvolutionContext::thermal);
  m.def("uniform_times", &uniform_times, py::arg("t_max"), py::arg("steps"));
  m.def("evolve", &evolve, py::arg("backend"), py::arg("rho0"), py::arg("ctx"), py::arg("times"));
  m.def("evolve_bare", &evolve_bare, py::arg("rho0"), py::arg("ctx"), py::arg("times"), py::arg("rate_scale") = 1.0);
  m.def("density_at", &density_at, py::arg("backend"), py::arg("rho0"), py::arg("ctx"), py::arg("t"));
  m.def("cumulant_stats", &cumulant_stats, py::arg("ctx"));

  py::class_<Revival>(m, "Revival").def_readonly("time", &Revival::time).def_readonly("contrast", &Revival::contrast);
  py::class_<RevivalReport>(m, "RevivalReport")
      .def_readonly("revivals", &RevivalReport::revivals)
      .def_readonly("initial_contrast", &RevivalReport::initial_contrast)
      .def_readonly("collapse_time", &RevivalReport::collapse_time)
      .def_readonly("diagnostic", &RevivalReport::diagnostic);
  m.def("detect_revival", &detect_revival, py::arg("series"), py::arg("window"));
  m.def("early_period", &early_period, py::arg("series"), py::arg("cycles") = 2);

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("passed", &CheckResult::passed)
      .def_readonly("measured", &CheckResult::measured)
      .def_readonly("threshold", &CheckResult::threshold)
      .def_readonly("detail", &CheckResult::detail);
  m.def(
      "validate_config",
      [](const std::string& json_text) {
        const RunConfig config = config_from_json(nlohmann::json::parse(json_text));
        return run_validation(config).checks;
      },
      py::arg("config_json"));
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"qbounce"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
