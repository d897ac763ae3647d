#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "homogeig/harness.hpp"
#include "homogeig/operators.hpp"
#include "homogeig/oscillation.hpp"
#include "homogeig/problems.hpp"
#include "homogeig/ptrig.hpp"

namespace py = pybind11;
using namespace homogeig;
using nlohmann::ordered_json;

namespace {

py::object to_python(const ordered_json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

ordered_json from_python(const py::object& o) {
  return ordered_json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

SweepTable table_from(const py::object& o) { return sweep_from_json(from_python(o)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Eigenvalues of periodically oscillating p-Laplacian type problems and their homogenized limits.";

  // Kept alive for the interpreter's lifetime; carries `code` and `index`.
  static py::handle error = py::exception<Error>(m, "HomogeigError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(py::str(e.what()));
      exc.attr("code") = to_string(e.code());
      exc.attr("index") = e.index();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<Domain>(m, "Domain")
      .def_static("interval", &Domain::interval, py::arg("length") = 1.0)
      .def_static("rectangle", &Domain::rectangle, py::arg("width") = 1.0, py::arg("height") = 1.0)
      .def_property_readonly("dimension", &Domain::dimension)
      .def_property_readonly("lx", &Domain::lx)
      .def_property_readonly("ly", &Domain::ly);

  py::class_<TrigTerm>(m, "TrigTerm")
      .def(py::init([](double amplitude, int kx, int ky, bool sine) { return TrigTerm{amplitude, kx, ky, sine}; }),
           py::arg("amplitude"), py::arg("kx"), py::arg("ky") = 0, py::arg("sine") = false)
      .def_readwrite("amplitude", &TrigTerm::amplitude)
      .def_readwrite("kx", &TrigTerm::kx)
      .def_readwrite("ky", &TrigTerm::ky)
      .def_readwrite("sine", &TrigTerm::sine);

  py::class_<CoefficientField>(m, "CoefficientField")
      .def_static("constant", &CoefficientField::constant, py::arg("value"))
      .def_static(
          "piecewise",
          [](std::vector<double> values, std::optional<int> nx, int ny) {
            return nx ? CoefficientField::piecewise(std::move(values), *nx, ny)
                      : CoefficientField::piecewise(std::move(values));
          },
          py::arg("values"), py::arg("nx") = py::none(), py::arg("ny") = 1)
      .def_static("trigonometric", &CoefficientField::trigonometric, py::arg("mean"), py::arg("terms"))
      .def("with_bounds", &CoefficientField::with_bounds, py::arg("lo"), py::arg("hi"))
      .def("__call__", [](const CoefficientField& f, double x, double y) { return f(Point{x, y}); }, py::arg("x"),
           py::arg("y") = 0.0)
      .def("average", &CoefficientField::average)
      .def_property_readonly("lo", &CoefficientField::lo)
      .def_property_readonly("hi", &CoefficientField::hi);

  py::class_<OperatorSpec>(m, "OperatorSpec")
      .def_static("p_laplacian", &OperatorSpec::p_laplacian, py::arg("p"))
      .def_static(
          "scalar", [](double p, const CoefficientField& a, double alpha, double beta) {
            return OperatorSpec::scalar(p, SpatialField(a), alpha, beta);
          },
          py::arg("p"), py::arg("a"), py::arg("alpha") = 1.0, py::arg("beta") = 1.0)
      .def_property_readonly("p", &OperatorSpec::p)
      .def_property_readonly("alpha", &OperatorSpec::alpha)
      .def_property_readonly("beta", &OperatorSpec::beta);

  py::class_<BoundaryCondition>(m, "BoundaryCondition")
      .def_static("dirichlet", &BoundaryCondition::dirichlet)
      .def_static("neumann", &BoundaryCondition::neumann)
      .def_static("robin", &BoundaryCondition::robin, py::arg("beta"))
      .def_static("nonflux", &BoundaryCondition::nonflux)
      .def_static("dependent", &BoundaryCondition::dependent)
      .def_static("steklov", &BoundaryCondition::steklov)
      .def_static("parse", &parse_bc, py::arg("tag"), py::arg("beta") = 0.0)
      .def_readonly("beta", &BoundaryCondition::beta)
      .def_property_readonly("label", &BoundaryCondition::label)
      .def("__eq__", [](const BoundaryCondition& a, const BoundaryCondition& b) { return a == b; })
      .def("__repr__", [](const BoundaryCondition& b) { return "BoundaryCondition(" + b.label() + ")"; });

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def(py::init<Domain, OperatorSpec, CoefficientField, CoefficientField, BoundaryCondition, Scale>(),
           py::arg("domain"), py::arg("op"), py::arg("rho"), py::arg("V"), py::arg("bc"),
           py::arg("eps") = py::none())
      .def("at_scale", &ProblemInstance::at_scale, py::arg("eps"))
      .def("with_bc", &ProblemInstance::with_bc, py::arg("bc"))
      .def_property_readonly("dimension", &ProblemInstance::dimension)
      .def_property_readonly("bc", &ProblemInstance::bc)
      .def_property_readonly("eps", &ProblemInstance::epsilon);

  py::class_<SolverSettings>(m, "SolverSettings")
      .def(py::init<>())
      .def_readwrite("tol", &SolverSettings::tol)
      .def_readwrite("lambda_cap", &SolverSettings::lambda_cap)
      .def_readwrite("min_cells", &SolverSettings::min_cells)
      .def_readwrite("dense_limit", &SolverSettings::dense_limit)
      .def_readwrite("richardson", &SolverSettings::richardson)
      .def_readwrite("richardson_levels", &SolverSettings::richardson_levels);

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("values", &Spectrum::values)
      .def_readonly("errors", &Spectrum::errors)
      .def_readonly("residuals", &Spectrum::residuals)
      .def_readonly("flags", &Spectrum::flags)
      .def_readonly("solver", &Spectrum::solver)
      .def_readonly("tol", &Spectrum::tol)
      .def("__len__", &Spectrum::size);

  m.def("solve", &solve_spectrum, py::arg("problem"), py::arg("k_max"), py::arg("settings") = SolverSettings{},
        py::call_guard<py::gil_scoped_release>(),
        "Lowest k_max eigenvalues: Pruefer shooting in 1D, P1 finite elements in 2D.");
  m.def("pi_p", &pi_p, py::arg("p"));

  py::class_<HypothesisReport>(m, "HypothesisReport")
      .def_readonly("samples", &HypothesisReport::samples)
      .def_readonly("h1_monotonicity", &HypothesisReport::h1_monotonicity)
      .def_readonly("h2_coercivity", &HypothesisReport::h2_coercivity)
      .def_readonly("h3_continuity", &HypothesisReport::h3_continuity)
      .def_readonly("h4_homogeneity", &HypothesisReport::h4_homogeneity)
      .def_readonly("h5_oddness", &HypothesisReport::h5_oddness)
      .def_readonly("h7_cyclic", &HypothesisReport::h7_cyclic)
      .def_readonly("h8_strict", &HypothesisReport::h8_strict)
      .def_readonly("h6_ratio_max", &HypothesisReport::h6_ratio_max)
      .def("failing", &HypothesisReport::failing, py::arg("threshold") = 1e-6);
  m.def(
      "check_operator",
      [](const OperatorSpec& op, const Domain& domain, int samples, std::uint64_t seed) {
        return sample_hypotheses(diffusion_law(op, domain.dimension()), domain, samples, seed);
      },
      py::arg("op"), py::arg("domain"), py::arg("samples") = 1000, py::arg("seed") = 1);

  py::class_<cli::RunConfig>(m, "RunConfig")
      .def_readonly("experiment", &cli::RunConfig::experiment)
      .def_readonly("seed", &cli::RunConfig::seed)
      .def_readonly("base", &cli::RunConfig::base)
      .def_readonly("bcs", &cli::RunConfig::bcs)
      .def_readonly("solver", &cli::RunConfig::solver)
      .def_readonly("k_max", &cli::RunConfig::k_max)
      .def_readonly("ks", &cli::RunConfig::ks)
      .def_readonly("eps", &cli::RunConfig::eps)
      .def_readonly("hash", &cli::RunConfig::hash);
  m.def(
      "load_config", [](const std::string& path) { return cli::load_config(path); }, py::arg("path"));
  m.def(
      "parse_config",
      [](const py::dict& doc) { return cli::parse_config(nlohmann::json::parse(from_python(doc).dump())); },
      py::arg("doc"));

  m.def(
      "sweep",
      [](const cli::RunConfig& cfg, int jobs) {
        SweepSpec spec{cfg.experiment, cfg.base, cfg.bcs, cfg.ks, cfg.eps, cfg.solver, false};
        SweepTable t;
        {
          py::gil_scoped_release release;
          t = sweep(spec, jobs);
        }
        t.config_hash = cfg.hash;
        return to_python(to_json(t));
      },
      py::arg("config"), py::arg("jobs") = 1, "Sweep table of a configuration as a dict.");
  m.def(
      "fit_rate", [](const py::object& table) { return to_python(to_json(fit_rate(table_from(table)))); },
      py::arg("sweep_table"));
  m.def(
      "audit_ordering", [](const py::object& table) { return to_python(to_json(audit_ordering(table_from(table)))); },
      py::arg("sweep_table"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"homogeig"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one command-line invocation; returns (exit_code, stdout, stderr).");
}
