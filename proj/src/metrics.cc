#include "lmr/metrics.h"

#include <algorithm>
#include <numeric>

#include "lmr/lane_distance.h"
#include "lmr/parallel.h"

namespace lmr {

PredictionSet SortedByProbability(PredictionSet preds) {
  if (!preds.probabilities) return preds;
  const auto& probs = *preds.probabilities;
  if (probs.size() != preds.modes.size()) {
    throw ValidationError("probability count does not match mode count");
  }
  std::vector<std::size_t> order(preds.modes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return probs[a] > probs[b];
  });
  PredictionSet sorted;
  sorted.modes.reserve(order.size());
  sorted.probabilities.emplace();
  for (std::size_t i : order) {
    sorted.modes.push_back(std::move(preds.modes[i]));
    sorted.probabilities->push_back(probs[i]);
  }
  return sorted;
}

std::set<std::string> DefaultAgentClasses() {
  return {"vehicle", "motorcyclist", "bus"};
}

void MetricConfig::Validate() const {
  if (!(c_scale >= 0.0)) throw ValidationError("c_scale must be >= 0");
  if (!(c_const > 0.0)) throw ValidationError("c_const must be > 0");
  if (!(euclidean_mr_threshold > 0.0)) {
    throw ValidationError("euclidean_mr_threshold must be > 0");
  }
  assignment.Validate();
}

double AverageVelocity(const Trajectory& trajectory) {
  const auto& pts = trajectory.points;
  if (pts.size() < 2) {
    throw ValidationError("ground truth needs >= 2 points");
  }
  if (!(trajectory.dt > 0.0)) throw ValidationError("dt must be > 0");
  double path = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) path += Distance(pts[i - 1], pts[i]);
  return path / (static_cast<double>(pts.size() - 1) * trajectory.dt);
}

double HitThreshold(double velocity, const MetricConfig& config) {
  return config.c_scale * velocity + config.c_const;
}

SequenceMisses GetIsMiss(const Trajectory& ground_truth,
                         const PredictionSet& predictions,
                         const LaneGraph& graph, const CenterlineIndex& index,
                         const MetricConfig& config) {
  if (predictions.modes.empty()) throw ValidationError("no prediction modes");

  SequenceMisses out;
  out.hit_threshold = HitThreshold(AverageVelocity(ground_truth), config);
  const Point2 gt_end = ground_truth.points.back();

  const auto gt_candidates =
      GetLaneAssignments(ground_truth.points, graph, index, config.assignment);
  const std::optional<LaneAssignment> gt_lane =
      SelectGroundTruthAssignment(gt_candidates);
  out.fallback = !gt_lane.has_value();

  out.labels.reserve(predictions.modes.size());
  std::vector<IndexedLanePoint> targets;
  for (const Trajectory& mode : predictions.modes) {
    if (mode.points.empty()) throw ValidationError("empty prediction mode");
    if (!gt_lane) {
      const bool hit = Distance(mode.points.back(), gt_end) < out.hit_threshold;
      out.labels.push_back(hit ? 0 : 1);
      continue;
    }
    const auto selected = SelectPredictionAssignments(
        GetLaneAssignments(mode.points, graph, index, config.assignment),
        config.assignment);
    if (selected.empty()) {
      out.labels.push_back(1);
      continue;
    }
    targets.clear();
    for (const auto& a : selected) targets.push_back({a.segment, a.s});
    const ReachResult reach = WithinLaneDistance(
        graph, IndexedLanePoint{gt_lane->segment, gt_lane->s}, targets,
        out.hit_threshold);
    out.labels.push_back(reach.reached ? 0 : 1);
  }
  return out;
}

LmrRates AccumulateLmr(const MissMatrix& matrix) {
  if (matrix.rows.empty()) throw ValidationError("empty miss matrix");
  const std::size_t k = matrix.rows.front().size();
  int top_misses = 0;
  int all_misses = 0;
  for (const auto& row : matrix.rows) {
    if (row.empty() || row.size() != k) {
      throw ValidationError("miss matrix rows must all have k >= 1 entries");
    }
    top_misses += row.front();
    if (std::all_of(row.begin(), row.end(), [](int x) { return x == 1; })) {
      ++all_misses;
    }
  }
  const auto d = static_cast<double>(matrix.rows.size());
  return {.at_1 = top_misses / d, .at_k = all_misses / d};
}

namespace {

struct Displacement {
  double ade = 0.0;
  double fde = 0.0;
};

Displacement Displace(const Trajectory& gt, const Trajectory& mode) {
  if (mode.points.size() != gt.points.size()) {
    throw ValidationError("prediction mode has " +
                          std::to_string(mode.points.size()) +
                          " points, ground truth has " +
                          std::to_string(gt.points.size()));
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < gt.points.size(); ++t) {
    sum += Distance(gt.points[t], mode.points[t]);
  }
  return {.ade = sum / static_cast<double>(gt.points.size()),
          .fde = Distance(gt.points.back(), mode.points.back())};
}

}  // namespace

EuclideanMetrics ComputeEuclideanMetrics(const Trajectory& ground_truth,
                                         const PredictionSet& predictions,
                                         double threshold) {
  if (predictions.modes.empty()) throw ValidationError("no prediction modes");
  if (ground_truth.points.empty()) throw ValidationError("empty ground truth");

  EuclideanMetrics m;
  bool all_miss = true;
  for (std::size_t i = 0; i < predictions.modes.size(); ++i) {
    const Displacement disp = Displace(ground_truth, predictions.modes[i]);
    if (i == 0) {
      m.min_ade_at_1 = m.min_ade_at_k = disp.ade;
      m.min_fde_at_1 = m.min_fde_at_k = disp.fde;
      m.mr_at_1 = disp.fde > threshold ? 1 : 0;
    } else if (disp.fde < m.min_fde_at_k) {
      m.min_fde_at_k = disp.fde;
      m.min_ade_at_k = disp.ade;
    }
    if (disp.fde <= threshold) all_miss = false;
  }
  m.mr_at_k = all_miss ? 1 : 0;
  return m;
}

DatasetEvaluation EvaluateDataset(std::span<const Sequence> dataset,
                                  const MetricConfig& config, int workers) {
  config.Validate();

  std::vector<const Sequence*> selected;
  int excluded = 0;
  for (const Sequence& seq : dataset) {
    if (config.agent_class_filter.empty() ||
        config.agent_class_filter.contains(seq.focal_agent_class)) {
      selected.push_back(&seq);
    } else {
      ++excluded;
    }
  }
  if (selected.empty()) {
    throw ValidationError("no sequences left after agent-class filtering");
  }

  DatasetEvaluation eval;
  eval.sequences.resize(selected.size());
  ParallelFor(selected.size(), workers, [&](std::size_t i) {
    const Sequence& seq = *selected[i];
    if (!seq.graph) {
      throw ValidationError("sequence '" + seq.sequence_id + "' has no map");
    }
    const PredictionSet preds = SortedByProbability(seq.predictions);
    const CenterlineIndex index(*seq.graph, config.index_backend);
    SequenceResult& r = eval.sequences[i];
    r.sequence_id = seq.sequence_id;
    r.misses = GetIsMiss(seq.ground_truth, preds, *seq.graph, index, config);
    r.euclidean = ComputeEuclideanMetrics(seq.ground_truth, preds,
                                          config.euclidean_mr_threshold);
  });

  // Sequential reduction in input order keeps floating-point sums
  // independent of the worker count.
  MissMatrix matrix;
  matrix.rows.reserve(eval.sequences.size());
  MetricReport& rep = eval.report;
  int mr1 = 0;
  int mrk = 0;
  for (const SequenceResult& r : eval.sequences) {
    matrix.rows.push_back(r.misses.labels);
    if (r.misses.fallback) ++matrix.fallback_count;
    mr1 += r.euclidean.mr_at_1;
    mrk += r.euclidean.mr_at_k;
    rep.min_ade_at_1 += r.euclidean.min_ade_at_1;
    rep.min_fde_at_1 += r.euclidean.min_fde_at_1;
    rep.min_ade_at_k += r.euclidean.min_ade_at_k;
    rep.min_fde_at_k += r.euclidean.min_fde_at_k;
  }
  const LmrRates lmr = AccumulateLmr(matrix);
  const auto d = static_cast<double>(eval.sequences.size());
  rep.lmr_at_1 = lmr.at_1;
  rep.lmr_at_k = lmr.at_k;
  rep.mr_at_1 = mr1 / d;
  rep.mr_at_k = mrk / d;
  rep.min_ade_at_1 /= d;
  rep.min_fde_at_1 /= d;
  rep.min_ade_at_k /= d;
  rep.min_fde_at_k /= d;
  rep.sequence_count = static_cast<int>(eval.sequences.size());
  rep.fallback_count = matrix.fallback_count;
  rep.excluded_count = excluded;
  return eval;
}

}  // namespace lmr
