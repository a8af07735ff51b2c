#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "laakso_lab/cli.hpp"
#include "laakso_lab/error.hpp"
#include "laakso_lab/james_model.hpp"
#include "laakso_lab/laakso_graph.hpp"
#include "laakso_lab/moduli.hpp"
#include "laakso_lab/tree_to_laakso.hpp"

namespace py = pybind11;
using namespace laakso_lab;

namespace {

std::optional<PhiFault> fault_at(const std::optional<std::vector<int>>& node) {
  if (!node) return std::nullopt;
  return PhiFault{TreeNode(*node)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of laakso_lab; the package wraps JSON results into dicts.";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const CapacityError& e) {
      PyErr_SetString(PyExc_MemoryError, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<LaaksoGraph>(m, "LaaksoGraph")
      .def_property_readonly("n", &LaaksoGraph::scale)
      .def_property_readonly("b", &LaaksoGraph::branching)
      .def_property_readonly("diameter", &LaaksoGraph::diameter)
      .def("__len__", &LaaksoGraph::size)
      .def("edge_count", &LaaksoGraph::edge_count)
      .def("vertices",
           [](const LaaksoGraph& g) {
             std::vector<std::string> out;
             for (const auto& v : g.vertices()) out.push_back(v.label());
             return out;
           })
      .def("is_branching", [](const LaaksoGraph& g, const std::string& v) { return g.is_branching(VertexId::parse(v)); })
      .def("distance",
           [](const LaaksoGraph& g, const std::string& u, const std::string& v) {
             return g.distance(VertexId::parse(u), VertexId::parse(v));
           })
      .def("distance_oracle",
           [](const LaaksoGraph& g, const std::string& u, const std::string& v) {
             return g.distance_oracle(VertexId::parse(u), VertexId::parse(v));
           })
      .def("to_json", &LaaksoGraph::to_json)
      .def("to_dot", &LaaksoGraph::to_dot);

  m.def("build_laakso", [](int n, int b) { return build_laakso(n, b); }, py::arg("n"), py::arg("b"));
  m.def("laakso_vertex_count", &laakso_vertex_count, py::arg("n"), py::arg("b"));
  m.def(
      "tree_distance", [](std::vector<int> a, std::vector<int> b) { return tree_distance(TreeNode(a), TreeNode(b)); },
      py::arg("a"), py::arg("b"));

  m.def(
      "phi",
      [](int n, int b, std::vector<int> node) { return PhiMap(build_laakso(n, b)).phi(TreeNode(node)).label(); },
      py::arg("n"), py::arg("b"), py::arg("node"));
  m.def(
      "verify_phi",
      [](int n, int b, std::uint64_t seed, std::optional<std::size_t> samples,
         std::optional<std::vector<int>> fault) {
        PhiVerifyOptions o;
        o.seed = seed;
        if (samples) {
          o.coverage = PhiVerifyOptions::Coverage::kSampled;
          o.samples = *samples;
        }
        return lemma_2_4_report_to_json(verify_lemma_2_4(PhiMap(build_laakso(n, b), fault_at(fault)), o));
      },
      py::arg("n") = 2, py::arg("b") = 2, py::arg("seed") = 0, py::arg("samples") = std::nullopt,
      py::arg("fault") = std::nullopt);

  m.def(
      "verify_james",
      [](const std::string& theta, int indices, int max_size) {
        return james_report_to_json(verify_lemma_3_1(parse_rational(theta), indices, max_size));
      },
      py::arg("theta") = "3/4", py::arg("indices") = 12, py::arg("max_size") = 6);

  m.def(
      "verify_all",
      [](std::uint64_t seed, std::optional<std::vector<int>> fault) {
        cli::VerifyAllOptions o;
        o.seed = seed;
        if (fault) o.fault = TreeNode(*fault);
        const auto r = cli::verify_all(o);
        return py::make_tuple(r.passed, r.json);
      },
      py::arg("seed") = 0, py::arg("fault") = std::nullopt);

  m.def(
      "modulus",
      [](const std::string& kind, double p, double t) { return modulus_value(parse_modulus_kind(kind), LpModel(p), t); },
      py::arg("kind"), py::arg("p"), py::arg("t"));
  m.def(
      "check_lemma42",
      [](double p, std::size_t points) {
        return lemma42_report_to_json(check_beta_leq_auc(LpModel(p), lemma42_grid(points)));
      },
      py::arg("p"), py::arg("points") = 50);
  m.def("composed_power_type", &composed_power_type, py::arg("p"), py::arg("eps"));

  m.def(
      "run",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "laakso-lab");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
