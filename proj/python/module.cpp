#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bulksurf/conditions.hpp"
#include "bulksurf/energy.hpp"
#include "bulksurf/format.hpp"
#include "bulksurf/model_file.hpp"
#include "bulksurf/models.hpp"
#include "bulksurf/polynomial.hpp"
#include "bulksurf/solver.hpp"
#include "bulksurf/verification.hpp"

namespace py = pybind11;
using namespace bulksurf;

namespace {

py::dict report_dict(const ConditionReport& r, const TheoremVerdict& v) {
  py::dict d;
  d["quasi_positivity"] = to_string(r.quasi_positivity);
  d["flux_nonnegative"] = to_string(r.flux_nonnegative);
  d["mass_control"] = to_string(r.mass_control);
  d["polynomial_growth"] = to_string(r.polynomial_growth);
  d["intermediate_sum"] = to_string(r.intermediate_sum);
  d["conservation"] = r.conservation;
  d["exact_identity"] = r.exact_identity;
  d["L"] = r.L;
  d["K"] = r.K;
  d["K1"] = r.K1;
  d["r"] = r.r;
  d["L2"] = r.L2;
  d["p_omega"] = r.p_omega;
  d["p_M"] = r.p_M;
  d["mu_M"] = r.mu_M;
  d["theorem"] = v.summary();
  return d;
}

py::dict check(const ModelSpec& spec, double box, int samples, std::uint64_t seed) {
  ReactionSystem sys = spec.build();
  SamplingPlan plan;
  plan.box_radius = box;
  plan.random_samples = samples;
  plan.rng_seed = seed;
  ConditionReport report = check_all(sys, plan);
  return report_dict(report, classify_theorem(sys, report, spec.theorem));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "bulk-surface reaction-diffusion lab";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ModelFileError>(m, "ModelFileError", PyExc_ValueError);

  py::class_<Polynomial>(m, "Polynomial")
      .def("evaluate", [](const Polynomial& p, const std::vector<double>& x) { return p.evaluate(x); })
      .def("total_degree", &Polynomial::total_degree)
      .def("leading_homogeneous_part", &Polynomial::leading_homogeneous_part)
      .def("is_zero", &Polynomial::is_zero)
      .def("num_vars", &Polynomial::num_vars)
      .def("to_string", py::overload_cast<const std::vector<std::string>&>(&Polynomial::to_string, py::const_))
      .def("__str__", py::overload_cast<>(&Polynomial::to_string, py::const_))
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self == py::self);

  m.def("parse_expression", &parse_expression, py::arg("text"), py::arg("variables"),
        py::arg("parameters") = std::map<std::string, double>{});

  m.def("multinomial", [](int p, const std::vector<int>& beta) { return multinomial(p, MultiIndex(beta)); });
  m.def("enumerate_multi_indices", [](int m, int p) {
    std::vector<std::vector<int>> out;
    for (const auto& b : enumerate_multi_indices(m, p)) out.push_back(b.exponents());
    return out;
  });
  m.def("eval_Hp", [](const std::vector<double>& u, int p, const std::vector<double>& theta) {
    return eval_Hp(u, EnergyConfig{p, theta});
  });
  m.def("dHp_dt", [](const std::vector<double>& u, const std::vector<double>& dudt, int p,
                     const std::vector<double>& theta) { return dHp_dt(u, dudt, EnergyConfig{p, theta}); });

  m.def("preset_names", &preset_names);
  m.def("export_preset", [](const std::string& name) { return serialize_model(make_preset(name).spec); });
  m.def(
      "check_model",
      [](const std::string& text, double box, int samples, std::uint64_t seed) {
        return check(parse_model_text(text), box, samples, seed);
      },
      py::arg("text"), py::arg("box") = 10.0, py::arg("samples") = 10000, py::arg("seed") = 42);
  m.def(
      "simulate_model",
      [](const std::string& text) {
        ModelSpec spec = parse_model_text(text);
        if (!spec.sim) throw std::invalid_argument("model has no [sim] section");
        ReactionSystem sys = spec.build();
        SimConfig config = spec.sim->config();
        SimMeshes meshes = spec.sim->meshes(sys.n);
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = run_simulation(sys, initial_state(sys, meshes, spec.initial_data()), config, meshes);
        }
        std::ostringstream csv;
        write_diagnostics_csv(csv, sys, config.lp_orders, traj.records);
        py::dict d;
        d["csv"] = csv.str();
        d["blowup"] = traj.blowup;
        d["t_blowup"] = traj.t_blowup;
        return d;
      },
      py::arg("text"));
  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t seed, int cases) {
        py::list out;
        for (const auto& r : run_suites(suite, seed, cases)) {
          py::dict d;
          d["suite"] = r.suite;
          d["cases"] = r.cases;
          d["max_residual"] = r.max_residual;
          d["tolerance"] = r.tolerance;
          d["passed"] = r.passed;
          out.append(d);
        }
        return out;
      },
      py::arg("suite") = "all", py::arg("seed") = 42, py::arg("cases") = 0);
}
