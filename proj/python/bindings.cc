#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sale/analysis.h"
#include "sale/metrics.h"
#include "sale/protocol.h"
#include "sale/scenario.h"
#include "sale/simnet.h"
#include "sale/topology.h"
#include "sale/trace.h"

namespace py = pybind11;
using namespace sale;

namespace {

InterferenceGraph GraphFromPairs(int n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [u, v] : pairs) edges.push_back({u, v});
  return BuildGraph(n, edges);
}

std::vector<std::pair<int, int>> EdgePairs(const InterferenceGraph& g) {
  std::vector<std::pair<int, int>> out;
  for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v);
  return out;
}

const char* OutcomeName(RunOutcome o) {
  switch (o) {
    case RunOutcome::kConverged:
      return "converged";
    case RunOutcome::kMaxIterations:
      return "max_iterations";
    case RunOutcome::kOscillating:
      return "oscillating";
  }
  return "?";
}

const char* SolveName(analysis::SolveOutcome o) {
  switch (o) {
    case analysis::SolveOutcome::kConverged:
      return "converged";
    case analysis::SolveOutcome::kDivergedToOne:
      return "diverged";
    case analysis::SolveOutcome::kMaxIterations:
      return "max_iterations";
  }
  return "?";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spatial Aloha with local leader election";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);

  py::class_<InterferenceGraph>(m, "Graph")
      .def_property_readonly("size", &InterferenceGraph::size)
      .def("__len__", &InterferenceGraph::size)
      .def("degree", &InterferenceGraph::degree, py::arg("i"))
      .def("neighbors",
           [](const InterferenceGraph& g, int i) {
             auto s = g.neighbors(i);
             return std::vector<int>(s.begin(), s.end());
           },
           py::arg("i"))
      .def("adjacent", &InterferenceGraph::adjacent, py::arg("i"), py::arg("j"))
      .def("edges", &EdgePairs, "Sorted (u, v) pairs, 1-based, u < v.")
      .def("positions",
           [](const InterferenceGraph& g) {
             std::vector<std::pair<double, double>> out;
             for (const Point& p : g.positions()) out.emplace_back(p.x, p.y);
             return out;
           })
      .def("to_text", &SerializeTopology)
      .def("__repr__", [](const InterferenceGraph& g) {
        return "<Graph users=" + std::to_string(g.size()) + " edges=" +
               std::to_string(g.edge_count()) + ">";
      });

  m.def("build_graph", &GraphFromPairs, py::arg("n"), py::arg("edges"),
        "Graph on n users from 1-based (u, v) pairs.");
  m.def("builtin_topology", [](const std::string& name) { return BuiltinTopology(name); },
        py::arg("name"));
  m.def("builtin_names", &BuiltinTopologyNames);
  m.def("complete_graph", &CompleteGraph, py::arg("n"));
  m.def("ring_graph", &RingGraph, py::arg("n"));
  m.def("random_geometric", &RandomGeometric, py::arg("n"), py::arg("area"),
        py::arg("range") = 5.0, py::arg("seed") = 1);
  m.def("is_connected", &IsConnected);
  m.def("parse_topology", [](const std::string& text) { return ParseTopology(text); },
        py::arg("text"));

  // analysis
  m.def("throughput",
        [](const InterferenceGraph& g, const std::vector<double>& q) {
          return analysis::Throughput(g, q);
        },
        py::arg("g"), py::arg("q"));
  m.def("rims",
        [](const InterferenceGraph& g, const std::vector<double>& q) {
          return analysis::Rims(g, q);
        },
        py::arg("g"), py::arg("q"));
  m.def("jacobian_det",
        [](const InterferenceGraph& g, const std::vector<double>& q) {
          return analysis::JacobianDet(g, q);
        },
        py::arg("g"), py::arg("q"));
  m.def("stability_matrix",
        [](const InterferenceGraph& g, const std::vector<double>& q) {
          return analysis::StabilityMatrix(g, q);
        },
        py::arg("g"), py::arg("q"));
  m.def("is_positive_definite", &analysis::IsPositiveDefinite, py::arg("c"),
        py::arg("pivot_tol") = 1e-12);
  m.def("solve_nash",
        [](const InterferenceGraph& g, const std::vector<double>& y, double tol, int max_iter) {
          auto r = analysis::SolveNash(g, y, tol, max_iter);
          return py::make_tuple(SolveName(r.outcome), r.q, r.iterations);
        },
        py::arg("g"), py::arg("y"), py::arg("tol") = 1e-10, py::arg("max_iter") = 100000,
        "Returns (outcome, q, iterations).");
  m.def("steady_state",
        [](const InterferenceGraph& g, const std::vector<int>& parent) {
          return analysis::SolveSteadyState(g, TreePartition{parent});
        },
        py::arg("g"), py::arg("parent"));
  m.def("leader_gain", &analysis::LeaderGain, py::arg("n_l"));
  m.def("sensitivity_at_rim", &analysis::SensitivityAtRim, py::arg("n_l"), py::arg("eps"));
  m.def("pi_stability_check", &analysis::PiStabilityCheck, py::arg("n_l"), py::arg("kp"),
        py::arg("ki"));
  m.def("pi_gains",
        [](int n) {
          auto g = PiGainsFor(n);
          return py::make_tuple(g.kp, g.ki);
        },
        py::arg("n_l"));

  // protocol
  m.def("elect_leaders", [](const InterferenceGraph& g) { return ElectLeaders(g).parent; },
        py::arg("g"), "Parent per user (0-based), -1 for leaders.");

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("q_init", &RunConfig::q_init)
      .def_readwrite("tol", &RunConfig::tol)
      .def_readwrite("window", &RunConfig::window)
      .def_readwrite("max_iter", &RunConfig::max_iter)
      .def_readwrite("gain_multiplier", &RunConfig::gain_multiplier)
      .def_readwrite("q_min", &RunConfig::q_min)
      .def_readwrite("q_max", &RunConfig::q_max)
      .def_readwrite("declare_margin", &RunConfig::declare_margin)
      .def_readwrite("iteration_seconds", &RunConfig::iteration_seconds);

  py::class_<FrameConfig>(m, "FrameConfig")
      .def(py::init<>())
      .def_readwrite("l_f", &FrameConfig::l_f)
      .def_readwrite("l_nd", &FrameConfig::l_nd)
      .def_readwrite("l_s", &FrameConfig::l_s)
      .def_readwrite("header_overhead_bits", &FrameConfig::header_overhead_bits)
      .def_readwrite("r_b", &FrameConfig::r_b)
      .def_readwrite("seed", &FrameConfig::seed)
      .def_property_readonly("frame_seconds", &FrameConfig::frame_seconds);

  py::class_<PacketRunConfig>(m, "PacketRunConfig")
      .def(py::init<>())
      .def_readwrite("run", &PacketRunConfig::run)
      .def_readwrite("measure_frames", &PacketRunConfig::measure_frames)
      .def_readwrite("perfect_reception", &PacketRunConfig::perfect_reception)
      .def_readwrite("quantize_map", &PacketRunConfig::quantize_map);

  py::class_<RunTrace>(m, "RunTrace")
      .def_readonly("n_users", &RunTrace::n_users)
      .def_property_readonly("outcome", [](const RunTrace& t) { return OutcomeName(t.outcome); })
      .def_property_readonly("converged", &RunTrace::converged)
      .def_readonly("converged_at", &RunTrace::converged_at)
      .def_readonly("final_q", &RunTrace::final_q)
      .def_property_readonly("final_parent",
                             [](const RunTrace& t) { return t.final_partition.parent; })
      .def_property_readonly("leaders", [](const RunTrace& t) { return t.final_partition.leaders(); })
      .def_readonly("measured_theta", &RunTrace::measured_theta)
      .def_property_readonly("iterations", [](const RunTrace& t) { return t.rows.size(); })
      .def("q_series",
           [](const RunTrace& t, int user) {
             std::vector<double> out;
             for (const auto& r : t.rows) out.push_back(r.q.at(user));
             return out;
           },
           py::arg("user"))
      .def("rim_series", &RunTrace::RimSeries, py::arg("user"))
      .def("events",
           [](const RunTrace& t) {
             std::vector<std::pair<int, std::string>> out;
             for (const auto& e : t.events) out.emplace_back(e.iteration, FormatEvent(e));
             return out;
           })
      .def("has_handover", &RunTrace::HasHandover, py::arg("from"), py::arg("to"));

  m.def("run_ideal", py::overload_cast<const InterferenceGraph&, const RunConfig&>(&RunIdeal),
        py::arg("g"), py::arg("cfg") = RunConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def("run_packet", &RunFrames, py::arg("g"), py::arg("frame") = FrameConfig{},
        py::arg("cfg") = PacketRunConfig{}, py::call_guard<py::gil_scoped_release>());

  // metrics
  m.def("jain_weighted",
        [](const InterferenceGraph& g, const std::vector<double>& theta) {
          return JainWeighted(g, theta);
        },
        py::arg("g"), py::arg("theta"));
  m.def("distance_to_pareto",
        [](const InterferenceGraph& g, const std::vector<double>& theta) {
          return DistanceToPareto(g, theta);
        },
        py::arg("g"), py::arg("theta"));
  m.def("metrics_json",
        [](const InterferenceGraph& g, const RunTrace& t, const FrameConfig& f, bool pareto) {
          MetricsOptions o;
          o.with_pareto = pareto;
          return MetricsJson(ComputeMetrics(g, t, f, o));
        },
        py::arg("g"), py::arg("trace"), py::arg("frame") = FrameConfig{}, py::arg("pareto") = true);

  // scenarios
  m.def("run_scenario_file",
        [](const std::string& path, bool write_files) {
          auto r = RunScenario(LoadScenario(path), write_files);
          return py::make_tuple(r.exit_code, MetricsJson(r.metrics), r.written);
        },
        py::arg("path"), py::arg("write_files") = false,
        "Returns (exit_code, metrics_json, written_paths).");
}
