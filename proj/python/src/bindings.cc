#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "lmr/assignment.h"
#include "lmr/lane_distance.h"
#include "lmr/metrics.h"
#include "lmr/runner.h"
#include "lmr/scenario_io.h"
#include "lmr/testkit.h"

namespace py = pybind11;

namespace {

using XY = std::pair<double, double>;

std::vector<lmr::Point2> ToPoints(const std::vector<XY>& xy) {
  std::vector<lmr::Point2> out;
  out.reserve(xy.size());
  for (const auto& [x, y] : xy) out.push_back({x, y});
  return out;
}

std::vector<XY> FromPoints(const std::vector<lmr::Point2>& pts) {
  std::vector<XY> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(p.x, p.y);
  return out;
}

lmr::RawLaneSegment MakeLane(std::string id, const std::vector<XY>& centerline,
                             std::vector<std::string> successors,
                             std::vector<std::string> predecessors,
                             std::optional<std::vector<XY>> left_boundary,
                             std::optional<std::vector<XY>> right_boundary) {
  lmr::RawLaneSegment r;
  r.id = std::move(id);
  r.centerline = ToPoints(centerline);
  r.successors = std::move(successors);
  r.predecessors = std::move(predecessors);
  if (left_boundary) r.left_boundary = ToPoints(*left_boundary);
  if (right_boundary) r.right_boundary = ToPoints(*right_boundary);
  return r;
}

lmr::PredictionSet MakePredictions(const std::vector<std::vector<XY>>& modes,
                                   double dt,
                                   std::optional<std::vector<double>> probs) {
  lmr::PredictionSet set;
  for (const auto& m : modes) set.modes.push_back({ToPoints(m), dt});
  set.probabilities = std::move(probs);
  return lmr::SortedByProbability(std::move(set));
}

py::dict ReportToDict(const lmr::MetricReport& r) {
  py::dict d;
  d["lmr_at_1"] = r.lmr_at_1;
  d["lmr_at_k"] = r.lmr_at_k;
  d["mr_at_1"] = r.mr_at_1;
  d["mr_at_k"] = r.mr_at_k;
  d["min_ade_at_1"] = r.min_ade_at_1;
  d["min_fde_at_1"] = r.min_fde_at_1;
  d["min_ade_at_k"] = r.min_ade_at_k;
  d["min_fde_at_k"] = r.min_fde_at_k;
  d["sequence_count"] = r.sequence_count;
  d["fallback_count"] = r.fallback_count;
  d["excluded_count"] = r.excluded_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lane Miss Rate evaluation for trajectory predictions";

  py::register_exception<lmr::FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<lmr::UnknownSegmentError>(m, "UnknownSegmentError",
                                                   PyExc_KeyError);
  py::register_exception<lmr::ValidationError>(m, "ValidationError",
                                               PyExc_ValueError);

  py::class_<lmr::RawLaneSegment>(m, "LaneSegment")
      .def(py::init(&MakeLane), py::arg("id"), py::arg("centerline"),
           py::arg("successors") = std::vector<std::string>{},
           py::arg("predecessors") = std::vector<std::string>{},
           py::arg("left_boundary") = std::nullopt,
           py::arg("right_boundary") = std::nullopt)
      .def_readonly("id", &lmr::RawLaneSegment::id)
      .def_property_readonly(
          "centerline",
          [](const lmr::RawLaneSegment& r) { return FromPoints(r.centerline); })
      .def_readonly("successors", &lmr::RawLaneSegment::successors)
      .def_readonly("predecessors", &lmr::RawLaneSegment::predecessors);

  py::class_<lmr::LaneGraph>(m, "LaneGraph")
      .def(py::init([](const std::vector<lmr::RawLaneSegment>& raw) {
             return lmr::BuildLaneGraph(raw);
           }),
           py::arg("segments"))
      .def("__len__", &lmr::LaneGraph::size)
      .def_property_readonly("repaired_link_count",
                             &lmr::LaneGraph::repaired_link_count)
      .def("length", [](const lmr::LaneGraph& g, const std::string& id) {
        return g.segment(g.IndexOf(id)).length();
      });

  m.def("hit_threshold",
        [](double velocity, double c_scale, double c_const) {
          lmr::MetricConfig cfg;
          cfg.c_scale = c_scale;
          cfg.c_const = c_const;
          return lmr::HitThreshold(velocity, cfg);
        },
        py::arg("velocity"), py::arg("c_scale") = 0.2, py::arg("c_const") = 0.7);

  m.def("average_velocity",
        [](const std::vector<XY>& points, double dt) {
          return lmr::AverageVelocity({ToPoints(points), dt});
        },
        py::arg("points"), py::arg("dt") = 0.1);

  m.def("lane_distance",
        [](const lmr::LaneGraph& g, const std::string& from_id, double from_s,
           const std::string& to_id, double to_s,
           double threshold) -> std::optional<double> {
          const std::vector<lmr::LanePoint> to{{to_id, to_s}};
          return lmr::WithinLaneDistance(g, {from_id, from_s}, to, threshold)
              .distance;
        },
        py::arg("graph"), py::arg("from_id"), py::arg("from_s"),
        py::arg("to_id"), py::arg("to_s"), py::arg("threshold"),
        "Along-lane distance if it is below `threshold`, else None.");

  m.def("lane_assignments",
        [](const lmr::LaneGraph& g, const std::vector<XY>& trajectory) {
          const lmr::CenterlineIndex index(g);
          py::list out;
          for (const auto& a : lmr::GetLaneAssignments(
                   ToPoints(trajectory), g, index, lmr::AssignmentConfig{})) {
            py::dict d;
            d["segment_id"] = a.segment_id;
            d["s"] = a.s;
            d["p"] = a.p;
            d["d"] = a.d;
            d["delta_alpha"] = a.delta_alpha;
            out.append(d);
          }
          return out;
        },
        py::arg("graph"), py::arg("trajectory"));

  m.def("miss_labels",
        [](const lmr::LaneGraph& g, const std::vector<XY>& ground_truth,
           const std::vector<std::vector<XY>>& modes,
           std::optional<std::vector<double>> probabilities, double dt) {
          const lmr::CenterlineIndex index(g);
          const lmr::SequenceMisses m = lmr::GetIsMiss(
              {ToPoints(ground_truth), dt},
              MakePredictions(modes, dt, std::move(probabilities)), g, index,
              lmr::MetricConfig{});
          return py::make_tuple(m.labels, m.fallback, m.hit_threshold);
        },
        py::arg("graph"), py::arg("ground_truth"), py::arg("modes"),
        py::arg("probabilities") = std::nullopt, py::arg("dt") = 0.1,
        "Per-mode lane miss labels, the fallback flag and the hit threshold.");

  m.def("evaluate_directories",
        [](const std::filesystem::path& dataset,
           const std::filesystem::path& predictions, int k, int workers,
           std::optional<std::vector<std::string>> classes, bool linear_scan) {
          lmr::RunConfig c;
          c.dataset_dir = dataset;
          c.predictions_dir = predictions;
          c.k = k;
          c.workers = workers;
          c.output_format = lmr::ReportFormat::kJson;
          c.progress = false;
          if (classes) {
            c.metrics.agent_class_filter = {classes->begin(), classes->end()};
          }
          if (linear_scan) c.metrics.index_backend = lmr::IndexBackend::kLinearScan;
          std::ostringstream out;
          std::ostringstream err;
          int status = 0;
          {
            py::gil_scoped_release release;
            status = lmr::Run(c, out, err);
          }
          if (status != 0) throw lmr::ValidationError(err.str());
          return ReportToDict(lmr::ParseReportJson(out.str()));
        },
        py::arg("dataset"), py::arg("predictions"), py::arg("k") = 6,
        py::arg("workers") = 1, py::arg("classes") = std::nullopt,
        py::arg("linear_scan") = false);

  m.def("generate_random",
        [](std::size_t count, std::uint64_t seed,
           const std::filesystem::path& dataset,
           const std::filesystem::path& predictions, int modes) {
          for (const auto& g : lmr::GenerateRandomDataset(count, seed, modes)) {
            lmr::WriteScenarioFiles(g, dataset, predictions);
          }
        },
        py::arg("count"), py::arg("seed"), py::arg("dataset"),
        py::arg("predictions"), py::arg("modes") = 6);
}
