// Python bindings. Matrices are numpy arrays, words are strings, multicurves
// are lists of (word, weight) pairs; structured results come back as JSON
// text and are decoded in the package __init__.

#include "stretchlab/io.h"
#include "stretchlab/version.h"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace stretchlab;

namespace {

using PyMulticurve = std::vector<std::pair<std::string, double>>;

WeightedMulticurve to_multicurve(const PyMulticurve& mc) {
  WeightedMulticurve out;
  for (const auto& [w, b] : mc) out.curves.push_back({Word::parse(w), b});
  return out;
}

std::string dump(const nlohmann::json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "stretchlab core: so(2,1) algebra, genus-2 representations, earthquakes, p-harmonic solver";
  m.attr("__version__") = kVersion;

  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  // lorentz
  m.def("exp_so21", [](const Mat3& a) { return exp_so21(LieAlg(a)).m; }, py::arg("a"));
  m.def("log_so21", [](const Mat3& g) { return log_so21(GroupElem(g)).m; }, py::arg("g"));
  m.def("killing", [](const Mat3& a, const Mat3& b) { return killing(LieAlg(a), LieAlg(b)); });
  m.def("classify", [](const Mat3& g) { return to_string(classify(GroupElem(g))); }, py::arg("g"));
  m.def("hyperbolic_distance", &hyperbolic_distance, py::arg("x"), py::arg("y"));

  // fuchsian
  py::class_<SurfaceGroupRep>(m, "Representation")
      .def_property_readonly("generators",
                             [](const SurfaceGroupRep& r) {
                               std::vector<Mat3> g;
                               for (const auto& e : r.gens) g.push_back(e.m);
                               return g;
                             })
      .def_readwrite("label", &SurfaceGroupRep::label)
      .def("relator_residual", &SurfaceGroupRep::relator_residual)
      .def("plain_relator_residual", &SurfaceGroupRep::plain_relator_residual)
      .def("to_json", [](const SurfaceGroupRep& r) { return dump(io::rep_to_json(r)); })
      .def_static("from_json",
                  [](const std::string& s) { return io::rep_from_json(nlohmann::json::parse(s)); })
      .def("__repr__", [](const SurfaceGroupRep& r) { return "<Representation " + r.label + ">"; });

  m.def("octagon", &octagon_representation);
  m.def("octagon_length", &octagon_length);
  m.def("reduce_word", [](const std::string& w) { return Word::parse(w).str(); }, py::arg("word"));
  m.def("evaluate", [](const std::string& w, const SurfaceGroupRep& rep) { return evaluate(Word::parse(w), rep).m; },
        py::arg("word"), py::arg("rep"));
  m.def("translation_length",
        [](const std::string& w, const SurfaceGroupRep& rep) {
          return translation_length(evaluate(Word::parse(w), rep));
        },
        py::arg("word"), py::arg("rep"));
  m.def("enumerate_words",
        [](int n) {
          std::vector<std::string> out;
          for (const auto& w : enumerate_words(n)) out.push_back(w.str());
          return out;
        },
        py::arg("max_length"));
  m.def("_k_lower_bound",
        [](const SurfaceGroupRep& sigma, const SurfaceGroupRep& rho, int max_length) {
          const KBound k = k_lower_bound(max_length, sigma, rho);
          return dump({{"value", k.value},
                       {"word", k.best.str()},
                       {"evaluated", k.evaluated},
                       {"skipped", k.skipped},
                       {"classes", k.classes}});
        },
        py::arg("sigma"), py::arg("rho"), py::arg("max_length") = 6);

  // lamination / earthquake
  m.def("twist",
        [](const SurfaceGroupRep& sigma, const std::string& curve, double t) {
          return twist(sigma, {parse_curve(curve), t});
        },
        py::arg("sigma"), py::arg("curve"), py::arg("t"));
  m.def("length", [](const PyMulticurve& mc, const SurfaceGroupRep& rep) { return length(to_multicurve(mc), rep); },
        py::arg("multicurve"), py::arg("rep"));
  m.def("mass",
        [](const PyMulticurve& mc, const SurfaceGroupRep& rep) {
          return mass(standard_measure(to_multicurve(mc), rep));
        },
        py::arg("multicurve"), py::arg("rep"));
  m.def("_duality_check",
        [](const SurfaceGroupRep& sigma, const PyMulticurve& mc, const std::string& curve, double weight,
           double step) {
          const DualityReport d = duality_check(sigma, to_multicurve(mc), parse_curve(curve), weight, step);
          return dump({{"lhs", d.lhs}, {"rhs", d.rhs}, {"rel_err", d.rel_err}});
        },
        py::arg("sigma"), py::arg("multicurve"), py::arg("curve"), py::arg("weight") = 1.0,
        py::arg("step") = 1e-4);
  m.def("_wolpert",
        [](const SurfaceGroupRep& sigma, const std::string& c1, const std::string& c2, double step) {
          const WolpertReport w = wolpert_reciprocity(sigma, parse_curve(c1), parse_curve(c2), step);
          return dump({{"d12", w.d12}, {"d21", w.d21}, {"diff", w.diff}});
        },
        py::arg("sigma"), py::arg("curve1"), py::arg("curve2"), py::arg("step") = 1e-4);

  // pharmonic
  m.def("_solve",
        [](int level, const SurfaceGroupRep& rho, const std::vector<int>& schedule, double tol, int max_iter) {
          py::gil_scoped_release release;
          const FundamentalMesh mesh = build_octagon_mesh(octagon_representation(), level);
          SolveOptions opts;
          opts.tol = tol;
          opts.max_iter = max_iter;
          nlohmann::json out = nlohmann::json::array();
          for (const SolveResult& r : p_continuation(mesh, rho, schedule, opts)) {
            nlohmann::json s = io::stage_summary(r);
            const RelationReport rel = relation_checks(mesh, r);
            s["relations"] = {{"a_literal", rel.a_literal},
                              {"a_trace_corrected", rel.a_trace},
                              {"b_gap", rel.b_gap},
                              {"c_concentration", rel.c_fraction}};
            out.push_back(std::move(s));
          }
          return dump(out);
        },
        py::arg("level"), py::arg("rho"), py::arg("schedule"), py::arg("tol") = 1e-7, py::arg("max_iter") = 3000);
  m.def("_cylinder",
        [](double a, double b, int n, const std::vector<int>& schedule) {
          py::gil_scoped_release release;
          CylinderRig rig;
          rig.a = a;
          rig.b = b;
          rig.n = n;
          nlohmann::json out = nlohmann::json::array();
          for (const auto& c : cylinder_continuation(rig, schedule)) {
            out.push_back({{"p", c.p},
                           {"normalized", c.normalized},
                           {"stretch", c.stretch},
                           {"converged", c.converged},
                           {"at_floor", c.at_floor}});
          }
          return dump(out);
        },
        py::arg("a"), py::arg("b"), py::arg("n"), py::arg("schedule"));
}
