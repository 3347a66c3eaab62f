// Lane Miss Rate per sequence and over a dataset, plus the Euclidean
// comparison metrics (minADE, minFDE, MR).

#ifndef LMR_METRICS_H_
#define LMR_METRICS_H_

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lmr/assignment.h"
#include "lmr/geometry.h"
#include "lmr/lane_graph.h"
#include "lmr/spatial_index.h"

namespace lmr {

struct Trajectory {
  std::vector<Point2> points;
  double dt = 0.1;  // seconds per step

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct PredictionSet {
  std::vector<Trajectory> modes;
  // One value per mode when present.
  std::optional<std::vector<double>> probabilities;

  std::size_t size() const { return modes.size(); }
  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

// Stable sort of the modes by descending probability. Without probabilities
// the input order is kept.
PredictionSet SortedByProbability(PredictionSet preds);

std::set<std::string> DefaultAgentClasses();

struct MetricConfig {
  double c_scale = 0.2;  // seconds
  double c_const = 0.7;  // meters
  double euclidean_mr_threshold = 2.0;  // meters
  AssignmentConfig assignment;
  // Empty set disables class filtering.
  std::set<std::string> agent_class_filter = DefaultAgentClasses();
  IndexBackend index_backend = IndexBackend::kRTree;

  void Validate() const;
};

// Path length over elapsed time. Throws ValidationError for < 2 points or
// dt <= 0.
double AverageVelocity(const Trajectory& trajectory);

// c_scale * v + c_const
double HitThreshold(double velocity, const MetricConfig& config);

struct SequenceMisses {
  std::vector<int> labels;  // per mode: 0 hit, 1 miss
  bool fallback = false;    // ground truth had no lane assignment
  double hit_threshold = 0.0;
};

// Lane-based hit/miss label for every mode. Modes must already be ordered by
// confidence. When the ground truth cannot be assigned to a lane, a mode hits
// iff its endpoint is within hit_threshold (Euclidean). A mode without any
// lane assignment misses.
SequenceMisses GetIsMiss(const Trajectory& ground_truth,
                         const PredictionSet& predictions,
                         const LaneGraph& graph, const CenterlineIndex& index,
                         const MetricConfig& config);

struct MissMatrix {
  std::vector<std::vector<int>> rows;
  int fallback_count = 0;
};

struct LmrRates {
  double at_1 = 0.0;
  double at_k = 0.0;
};

LmrRates AccumulateLmr(const MissMatrix& matrix);

struct EuclideanMetrics {
  double min_ade_at_1 = 0.0;
  double min_fde_at_1 = 0.0;
  int mr_at_1 = 0;
  double min_ade_at_k = 0.0;
  double min_fde_at_k = 0.0;
  int mr_at_k = 0;
};

// @1 uses the first mode; @k picks the mode with the smallest endpoint error
// and reports its ADE.
EuclideanMetrics ComputeEuclideanMetrics(const Trajectory& ground_truth,
                                         const PredictionSet& predictions,
                                         double threshold);

struct Sequence {
  std::string sequence_id;
  std::string focal_agent_class;
  Trajectory ground_truth;
  PredictionSet predictions;
  std::shared_ptr<const LaneGraph> graph;
};

struct SequenceResult {
  std::string sequence_id;
  SequenceMisses misses;
  EuclideanMetrics euclidean;
};

struct MetricReport {
  double lmr_at_1 = 0.0;
  double lmr_at_k = 0.0;
  double mr_at_1 = 0.0;
  double mr_at_k = 0.0;
  double min_ade_at_1 = 0.0;
  double min_fde_at_1 = 0.0;
  double min_ade_at_k = 0.0;
  double min_fde_at_k = 0.0;
  int sequence_count = 0;
  int fallback_count = 0;
  int excluded_count = 0;  // dropped by the agent-class filter

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

struct DatasetEvaluation {
  MetricReport report;
  std::vector<SequenceResult> sequences;  // in input order, filtered
};

// Evaluates every sequence that passes the class filter on `workers` threads.
// The result does not depend on the worker count.
DatasetEvaluation EvaluateDataset(std::span<const Sequence> dataset,
                                  const MetricConfig& config, int workers = 1);

}  // namespace lmr

#endif  // LMR_METRICS_H_
