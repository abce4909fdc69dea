#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bentwire/config.hpp"
#include "bentwire/convergence.hpp"
#include "bentwire/geometry.hpp"
#include "bentwire/regularization.hpp"
#include "bentwire/spectral.hpp"
#include "bentwire/validate.hpp"

namespace py = pybind11;
using namespace bentwire;

namespace {

RunConfig config_from_kwargs(const py::kwargs& kwargs) {
  nlohmann::json problem = nlohmann::json::object(), numerics = nlohmann::json::object();
  static const std::vector<std::string> problem_keys{"alpha", "theta_rad", "a_nm", "b_nm", "mass_ratio"};
  for (const auto& [key, value] : kwargs) {
    const std::string k = py::str(key);
    nlohmann::json v = nlohmann::json::parse(py::str(py::module_::import("json").attr("dumps")(value)).cast<std::string>());
    if (std::find(problem_keys.begin(), problem_keys.end(), k) != problem_keys.end())
      problem[k] = v;
    else
      numerics[k] = v;
  }
  RunConfig c = config_from_json({{"problem", problem}, {"numerics", numerics}});
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectra of a particle on a plane curve with singular curvature";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SingularPointError>(m, "SingularPointError", PyExc_ValueError);
  py::register_exception<BoundaryConditionError>(m, "BoundaryConditionError", PyExc_ValueError);

  m.attr("HBAR2_OVER_2ME") = hbar2_over_2me;

  py::class_<PhysicalParams>(m, "PhysicalParams")
      .def(py::init<double, double, double>(), py::arg("a") = -5.0, py::arg("b") = 5.0, py::arg("mass_ratio") = 1.0)
      .def_readwrite("a", &PhysicalParams::a)
      .def_readwrite("b", &PhysicalParams::b)
      .def_readwrite("mass_ratio", &PhysicalParams::mass_ratio);

  py::class_<CurvatureSpec>(m, "CurvatureSpec")
      .def_static("zero", &CurvatureSpec::zero)
      .def_static("constant", &CurvatureSpec::constant, py::arg("value"))
      .def_static("power_law", &CurvatureSpec::power_law, py::arg("amplitude"), py::arg("alpha"))
      .def_static("power_law_regularized", &CurvatureSpec::power_law_regularized, py::arg("amplitude"),
                  py::arg("alpha"), py::arg("epsilon"))
      .def("__call__", &CurvatureSpec::operator(), py::arg("s"))
      .def_property_readonly("amplitude", &CurvatureSpec::amplitude)
      .def_property_readonly("alpha", &CurvatureSpec::alpha)
      .def_property_readonly("epsilon", &CurvatureSpec::epsilon);

  m.def("power_law_amplitude", &power_law_amplitude, py::arg("alpha"), py::arg("theta"), py::arg("a") = -5.0,
        py::arg("b") = 5.0);
  m.def("regularize", &regularize, py::arg("base"), py::arg("epsilon"));
  m.def("total_turn", &total_turn, py::arg("spec"), py::arg("params") = PhysicalParams{});

  m.def(
      "reconstruct_trace",
      [](const CurvatureSpec& spec, const PhysicalParams& params, int n_points, bool symmetric) {
        const Pose pose = symmetric ? symmetric_pose(spec, params) : Pose{};
        const CurveTrace t = reconstruct_trace(spec, params, n_points, pose);
        std::vector<double> x, y;
        for (const auto& p : t.positions) {
          x.push_back(p.x);
          y.push_back(p.y);
        }
        py::dict out;
        out["s"] = t.s_grid;
        out["x"] = x;
        out["y"] = y;
        out["gamma"] = t.angles;
        return out;
      },
      py::arg("spec"), py::arg("params") = PhysicalParams{}, py::arg("n_points") = 2000, py::arg("symmetric") = true,
      "Curve positions and tangent angles reconstructed from the curvature.");

  m.def(
      "spectrum",
      [](double epsilon, const std::string& formulation, const py::kwargs& kwargs) {
        const RunConfig c = config_from_kwargs(kwargs);
        const SweepProblem problem = c.problem();
        Spectrum s;
        {
          py::gil_scoped_release release;
          if (formulation == "quasi")
            s = solve_quasi(problem, problem.n_cells);
          else if (formulation == "regular")
            s = solve_regularized(problem, regularize(problem.base, epsilon), epsilon);
          else
            throw ConfigError("formulation must be regular or quasi");
        }
        py::dict out;
        out["eigenvalues"] = s.eigenvalues;
        out["eigenfunctions"] = s.eigenfunctions;
        out["nodes"] = s.nodes;
        out["h"] = s.mesh.h;
        out["converged"] = s.all_converged();
        return out;
      },
      py::arg("epsilon") = 0.01, py::arg("formulation") = "regular",
      "Lowest eigenpairs (meV) of one regularized member or of the quasi-derivative direct solve. Keyword "
      "arguments follow the configuration file keys (alpha, theta_rad, n_cells, k_states, bc, ...).");

  m.def(
      "sweep",
      [](const py::kwargs& kwargs) {
        const RunConfig c = config_from_kwargs(kwargs);
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = sweep(c.problem(), c.sweep_epsilons());
        }
        py::list tracks;
        for (const auto& t : r.tracks) {
          py::dict d;
          d["n"] = t.n;
          d["values"] = t.values;
          d["limit"] = t.extrapolation.limit;
          d["uncertainty"] = t.extrapolation.uncertainty;
          d["rate"] = t.extrapolation.rate;
          d["flagged"] = t.extrapolation.flagged;
          d["ambiguous"] = t.ambiguous;
          tracks.append(d);
        }
        py::dict out;
        out["epsilons"] = r.epsilons;
        out["tracks"] = tracks;
        return out;
      },
      "Epsilon sweep with paired and extrapolated eigenvalue tracks.");

  m.def(
      "admissibility",
      [](const py::kwargs& kwargs) {
        const RunConfig c = config_from_kwargs(kwargs);
        const SweepProblem problem = c.problem();
        const AdmissibilityReport rep = assess_admissibility(problem.family(c.admissibility_eps()), problem.params);
        py::dict out;
        out["epsilons"] = rep.epsilons;
        out["l1_errors"] = rep.l1_curvature_errors;
        out["l2_errors"] = rep.l2_primitive_errors;
        out["l2_branchwise_errors"] = rep.l2_branchwise_errors;
        out["verdict"] = to_string(rep.verdict);
        return out;
      },
      "Admissibility verdict of the regularization family.");

  m.def(
      "validate",
      [](int n_cells) {
        py::list out;
        for (const auto& c : run_oracle_suite(n_cells)) {
          py::dict d;
          d["name"] = c.name;
          d["value"] = c.value;
          d["expected"] = c.expected;
          d["tolerance"] = c.tolerance;
          d["passed"] = c.passed;
          out.append(d);
        }
        return out;
      },
      py::arg("n_cells") = 16000, "Analytic oracle checks.");
}
