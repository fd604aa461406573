#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qlcontrol/config.hpp"
#include "qlcontrol/experiment.hpp"
#include "qlcontrol/instances.hpp"

namespace py = pybind11;
using namespace qlc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ScalarField to_field(const Mesh &m, const Array &a) {
  if (a.ndim() != 1 || static_cast<std::size_t>(a.shape(0)) != m.node_count())
    throw py::value_error("expected a 1-D array with one value per node (" +
                          std::to_string(m.node_count()) + ")");
  ScalarField f = ScalarField::zeros(m);
  std::copy(a.data(), a.data() + a.shape(0), f.values.begin());
  return f;
}

Array to_array(const std::vector<double> &v) {
  Array a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

Instance make_instance(const std::string &name, const std::map<std::string, std::string> &overrides) {
  std::vector<std::string> kv;
  for (const auto &[k, v] : overrides) kv.push_back(k + "=" + v);
  const ExperimentConfig c = parse_config("[experiment]\ninstance = " + name + "\n", kv);
  return build_instance(c.spec);
}

py::dict certificate_dict(const Certificate &c) {
  py::dict d;
  d["name"] = c.name;
  d["value"] = c.value;
  d["bound"] = c.bound;
  d["pass"] = c.pass;
  d["note"] = c.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(qlcontrol, m) {
  m.doc() = "Discrete quasilinear elliptic control and its measure-valued relaxation";

  py::register_exception<HypothesisError>(m, "HypothesisError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);

  m.def("builtin_names", &builtin_names);
  m.def("catalog", [](const std::string &filter) { return format_catalog(list_builtin(filter)); },
        py::arg("filter") = "");
  m.def("uniqueness_threshold", &uniqueness_threshold, py::arg("lipschitz"));
  m.def(
      "helmholtz_solve",
      [](double b, const Array &rhs, int dimension, int cells) {
        const Mesh mesh = build_mesh(dimension, cells);
        return to_array(helmholtz_solve(b, to_field(mesh, rhs)).values);
      },
      py::arg("b"), py::arg("rhs"), py::arg("dimension"), py::arg("cells"),
      "Solve (-Delta_h + b) y = rhs with zero Dirichlet data on the uniform mesh.");
  m.def(
      "run_experiment",
      [](const std::string &config_text, const std::vector<std::string> &overrides) {
        const ExperimentOutcome o = run_experiment(parse_config(config_text, overrides));
        py::dict d;
        d["exit_code"] = o.exit_code;
        d["report"] = o.report_json;
        d["summary"] = o.summary;
        d["error"] = o.error;
        return d;
      },
      py::arg("config_text"), py::arg("overrides") = std::vector<std::string>{},
      "Run an experiment from config text; returns exit_code, report (JSON), summary, error.");
  m.def("strip_wall_time", &strip_wall_time);

  py::class_<Instance>(m, "Instance")
      .def(py::init(&make_instance), py::arg("name"),
           py::arg("overrides") = std::map<std::string, std::string>{},
           "Built-in instance with optional section.key overrides.")
      .def_property_readonly("name", [](const Instance &i) { return i.spec.name; })
      .def_property_readonly("regime", [](const Instance &i) { return std::string(to_string(i.problem.regime())); })
      .def_property_readonly("dimension", [](const Instance &i) { return i.spec.dimension; })
      .def_property_readonly("cells", [](const Instance &i) { return i.spec.cells; })
      .def_property_readonly("node_count", [](const Instance &i) { return i.problem.mesh.node_count(); })
      .def_property_readonly("designed_gap", [](const Instance &i) { return i.designed_gap; })
      .def_property_readonly("warnings", [](const Instance &i) { return i.warnings; })
      .def("node_coords",
           [](const Instance &i) {
             const Mesh &mesh = i.problem.mesh;
             py::array_t<double> a({static_cast<py::ssize_t>(mesh.node_count()), py::ssize_t{2}});
             auto r = a.mutable_unchecked<2>();
             for (std::size_t k = 0; k < mesh.node_count(); ++k) {
               const Vec2 p = mesh.node_coords(k);
               r(k, 0) = p.x;
               r(k, 1) = p.y;
             }
             return a;
           })
      .def("solve_state",
           [](const Instance &i, const Array &u) {
             return to_array(solve_state_for(i.problem, to_field(i.problem.mesh, u)).values);
           })
      .def("evaluate_cost",
           [](const Instance &i, const Array &u) { return evaluate_cost(i.problem, to_field(i.problem.mesh, u)); })
      .def(
          "cost_gradient",
          [](const Instance &i, const Array &u, bool central) {
            return to_array(cost_gradient(i.problem, to_field(i.problem.mesh, u),
                                          central ? Difference::Central : Difference::Forward));
          },
          py::arg("u"), py::arg("central") = false)
      .def(
          "optimize_control",
          [](const Instance &i, const Array &u0, std::size_t max_iterations) {
            ControlOptions o;
            o.max_iterations = max_iterations;
            const auto [u, rep] = [&] {
              py::gil_scoped_release release;
              return optimize_control(i.problem, to_field(i.problem.mesh, u0), o);
            }();
            py::dict d;
            d["u"] = to_array(u.values);
            d["cost"] = rep.cost;
            d["iterations"] = rep.iterations;
            d["converged"] = rep.converged;
            d["stationarity"] = rep.residual;
            d["trace"] = rep.trace;
            return d;
          },
          py::arg("u0"), py::arg("max_iterations") = 500)
      .def(
          "certify_gap",
          [](const Instance &i, std::uint64_t seed, std::size_t samples, bool sequence) {
            if (!i.relaxable()) throw py::value_error("relaxation needs a quasilinear instance");
            GapOptions g;
            g.seed = seed;
            g.samples = samples;
            g.sequence = sequence;
            const RelaxedProblem rp = i.relaxed();
            const auto [pt, rep] = [&] {
              py::gil_scoped_release release;
              return certify_gap(rp, g);
            }();
            py::dict d;
            d["classical_best"] = rep.classical_best;
            d["relaxed"] = rep.relaxed;
            d["gap"] = rep.gap;
            d["designed_gap"] = rep.designed_gap;
            d["passed"] = rep.passed();
            py::list certs;
            for (const auto &c : rep.certificates) certs.append(certificate_dict(c));
            d["certificates"] = certs;
            py::list seq;
            for (const auto &s : rep.sequence) seq.append(py::make_tuple(s.j, s.cost));
            d["sequence"] = seq;
            d["state"] = to_array(pt.y.values);
            return d;
          },
          py::arg("seed") = 1, py::arg("samples") = 8, py::arg("sequence") = true);
}
