#include "lmr/metrics.h"

#include <random>

#include <gtest/gtest.h>

#include "lmr/testkit.h"
#include "support/oracles.h"

namespace lmr {
namespace {

RawLaneSegment Lane(std::string id, std::vector<Point2> centerline) {
  RawLaneSegment r;
  r.id = std::move(id);
  r.centerline = std::move(centerline);
  return r;
}

// Straight trajectory of n points from `a` to `b`.
Trajectory Line(Point2 a, Point2 b, int n = 61, double dt = 0.1) {
  Trajectory t{.points = {}, .dt = dt};
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / (n - 1);
    t.points.push_back(a + f * (b - a));
  }
  return t;
}

Trajectory Shifted(const Trajectory& t, Point2 by) {
  Trajectory out = t;
  for (auto& p : out.points) p = p + by;
  return out;
}

std::shared_ptr<const LaneGraph> StraightRoad() {
  return std::make_shared<const LaneGraph>(BuildLaneGraph(
      std::vector<RawLaneSegment>{Lane("A", {{0, 0}, {100, 0}}),
                                  Lane("B", {{100, 3.5}, {0, 3.5}})}));
}

TEST(AverageVelocityTest, Examples) {
  EXPECT_DOUBLE_EQ(AverageVelocity(Line({0, 0}, {12, 0})), 2.0);
  EXPECT_EQ(AverageVelocity(Line({3, 3}, {3, 3})), 0.0);
  EXPECT_DOUBLE_EQ(
      AverageVelocity(Trajectory{.points = {{0, 0}, {1, 0}, {0, 0}}, .dt = 1}),
      1.0);
  EXPECT_THROW(AverageVelocity(Trajectory{.points = {{0, 0}}, .dt = 0.1}),
               ValidationError);
}

TEST(HitThresholdTest, Examples) {
  const MetricConfig cfg;
  EXPECT_NEAR(HitThreshold(6.67, cfg), 2.034, 1e-9);
  EXPECT_DOUBLE_EQ(HitThreshold(0, cfg), 0.7);
  EXPECT_DOUBLE_EQ(HitThreshold(10, cfg), 2.7);
}

TEST(AccumulateLmrTest, Examples) {
  const LmrRates r = AccumulateLmr({.rows = {{1, 0}, {0, 1}, {1, 1}}});
  EXPECT_DOUBLE_EQ(r.at_1, 2.0 / 3);
  EXPECT_DOUBLE_EQ(r.at_k, 1.0 / 3);
  const LmrRates zeros = AccumulateLmr({.rows = {{0, 0}, {0, 0}}});
  EXPECT_EQ(zeros.at_1, 0.0);
  EXPECT_EQ(zeros.at_k, 0.0);
  const LmrRates ones = AccumulateLmr({.rows = {{1, 1, 1}}});
  EXPECT_EQ(ones.at_1, 1.0);
  EXPECT_EQ(ones.at_k, 1.0);
  EXPECT_THROW(AccumulateLmr({}), ValidationError);
  EXPECT_THROW(AccumulateLmr({.rows = {{1, 0}, {1}}}), ValidationError);
}

TEST(EuclideanMetricsTest, Examples) {
  const Trajectory gt = Line({0, 0}, {10, 0});
  const EuclideanMetrics perfect =
      ComputeEuclideanMetrics(gt, {.modes = {gt}}, 2.0);
  EXPECT_EQ(perfect.min_ade_at_1, 0.0);
  EXPECT_EQ(perfect.min_fde_at_k, 0.0);
  EXPECT_EQ(perfect.mr_at_1, 0);
  EXPECT_EQ(perfect.mr_at_k, 0);

  const EuclideanMetrics lateral =
      ComputeEuclideanMetrics(gt, {.modes = {Shifted(gt, {0, 1})}}, 2.0);
  EXPECT_DOUBLE_EQ(lateral.min_ade_at_1, 1.0);
  EXPECT_DOUBLE_EQ(lateral.min_fde_at_1, 1.0);

  // Endpoint errors 3 m (top mode) and 1 m.
  Trajectory three = gt;
  three.points.back() = three.points.back() + Point2{0, 3};
  Trajectory one = gt;
  one.points.back() = one.points.back() + Point2{0, 1};
  const EuclideanMetrics two = ComputeEuclideanMetrics(gt, {.modes = {three, one}}, 2.0);
  EXPECT_DOUBLE_EQ(two.min_fde_at_k, 1.0);
  EXPECT_DOUBLE_EQ(two.min_ade_at_k, 1.0 / 61);
  EXPECT_EQ(two.mr_at_k, 0);
  EXPECT_EQ(two.mr_at_1, 1);
  const EuclideanMetrics swapped =
      ComputeEuclideanMetrics(gt, {.modes = {one, three}}, 2.0);
  EXPECT_EQ(swapped.mr_at_1, 0);

  EXPECT_THROW(ComputeEuclideanMetrics(gt, {}, 2.0), ValidationError);
  EXPECT_THROW(ComputeEuclideanMetrics(gt, {.modes = {Line({0, 0}, {1, 0}, 5)}}, 2.0),
               ValidationError);
}

TEST(GetIsMissTest, IdenticalEndpointHits) {
  const auto g = StraightRoad();
  const CenterlineIndex index(*g);
  const Trajectory gt = Line({10, 0.5}, {16, 0.5});
  const SequenceMisses m = GetIsMiss(gt, {.modes = {gt}}, *g, index, {});
  EXPECT_EQ(m.labels, std::vector<int>{0});
  EXPECT_FALSE(m.fallback);
  EXPECT_NEAR(m.hit_threshold, 0.2 * 1.0 + 0.7, 1e-12);
}

TEST(GetIsMissTest, OffRoadGroundTruthFallsBackToRadius) {
  const auto g = StraightRoad();
  const CenterlineIndex index(*g);
  const Trajectory gt = Line({10, -10}, {13, -10});
  const Trajectory far = Shifted(gt, {10, 0});
  const Trajectory near = Shifted(gt, {0.5, 0});
  const SequenceMisses m =
      GetIsMiss(gt, {.modes = {far, near}}, *g, index, {});
  EXPECT_TRUE(m.fallback);
  EXPECT_EQ(m.labels, (std::vector<int>{1, 0}));
}

TEST(GetIsMissTest, OpposingLaneMissesDespiteEuclideanHit) {
  const auto g = StraightRoad();
  const CenterlineIndex index(*g);
  const Trajectory gt = Line({10, 1.0}, {16, 1.0});
  const Trajectory opposing = Shifted(gt, {0, 1.5});
  const SequenceMisses m = GetIsMiss(gt, {.modes = {opposing}}, *g, index, {});
  EXPECT_EQ(m.labels, std::vector<int>{1});
  EXPECT_EQ(ComputeEuclideanMetrics(gt, {.modes = {opposing}}, 2.0).mr_at_1, 0);
}

TEST(GetIsMissTest, OffRoadPredictionMisses) {
  const auto g = StraightRoad();
  const CenterlineIndex index(*g);
  const Trajectory gt = Line({10, 0}, {16, 0});
  const SequenceMisses m = GetIsMiss(
      gt, {.modes = {Shifted(gt, {0, -3})}}, *g, index, {});
  EXPECT_FALSE(m.fallback);
  EXPECT_EQ(m.labels, std::vector<int>{1});
  EXPECT_THROW(GetIsMiss(gt, {}, *g, index, {}), ValidationError);
}

TEST(GetIsMissTest, StraightIsolatedLanesMatchArcLengthRule) {
  // With one straight isolated lane, a hit means |s_pred - s_gt| < s_hit.
  const auto g = std::make_shared<const LaneGraph>(BuildLaneGraph(
      std::vector<RawLaneSegment>{Lane("A", {{0, 0}, {200, 0}})}));
  const CenterlineIndex index(*g);
  std::mt19937_64 rng(5);
  const MetricConfig cfg;
  for (int i = 0; i < 500; ++i) {
    const double start = testing::Uniform(rng, 10, 60);
    const double speed = testing::Uniform(rng, 0.5, 20);
    const Trajectory gt = Line({start, testing::Uniform(rng, -1, 1)},
                               {start + 6 * speed, testing::Uniform(rng, -1, 1)});
    const Trajectory pred = Shifted(gt, {testing::Uniform(rng, -6, 6),
                                         testing::Uniform(rng, -0.5, 0.5)});
    const SequenceMisses m = GetIsMiss(gt, {.modes = {pred}}, *g, index, cfg);
    const double ds = std::abs(pred.points.back().x - gt.points.back().x);
    EXPECT_EQ(m.labels[0], ds < m.hit_threshold ? 0 : 1);
  }
}

Sequence MakeSeq(std::string id, const std::shared_ptr<const LaneGraph>& g,
                 const Trajectory& gt, std::vector<Trajectory> modes) {
  return Sequence{.sequence_id = std::move(id),
                  .focal_agent_class = "vehicle",
                  .ground_truth = gt,
                  .predictions = {.modes = std::move(modes)},
                  .graph = g};
}

TEST(EvaluateDatasetTest, SinglePerfectSequence) {
  const auto g = StraightRoad();
  const Trajectory gt = Line({10, 0}, {16, 0});
  const std::vector<Sequence> data{MakeSeq("s", g, gt, {gt})};
  const MetricReport r = EvaluateDataset(data, {}).report;
  EXPECT_EQ(r.lmr_at_1, 0.0);
  EXPECT_EQ(r.lmr_at_k, 0.0);
  EXPECT_EQ(r.mr_at_1, 0.0);
  EXPECT_EQ(r.min_ade_at_k, 0.0);
  EXPECT_EQ(r.min_fde_at_k, 0.0);
  EXPECT_EQ(r.sequence_count, 1);
}

TEST(EvaluateDatasetTest, ComposesMissMatrix) {
  const auto g = StraightRoad();
  // v_gt = 1 m/s gives s_hit = 0.9 m; a 5 m longitudinal error misses.
  const Trajectory gt = Line({10, 0}, {16, 0});
  const Trajectory hit = gt;
  const Trajectory miss = Shifted(gt, {5, 0});
  const std::vector<Sequence> data{MakeSeq("a", g, gt, {miss, hit}),
                                   MakeSeq("b", g, gt, {hit, miss}),
                                   MakeSeq("c", g, gt, {miss, miss})};
  const DatasetEvaluation e = EvaluateDataset(data, {});
  EXPECT_EQ(e.sequences[0].misses.labels, (std::vector<int>{1, 0}));
  EXPECT_EQ(e.sequences[1].misses.labels, (std::vector<int>{0, 1}));
  EXPECT_EQ(e.sequences[2].misses.labels, (std::vector<int>{1, 1}));
  EXPECT_DOUBLE_EQ(e.report.lmr_at_1, 2.0 / 3);
  EXPECT_DOUBLE_EQ(e.report.lmr_at_k, 1.0 / 3);
}

TEST(EvaluateDatasetTest, ClassFilter) {
  const auto g = StraightRoad();
  const Trajectory gt = Line({10, 0}, {16, 0});
  std::vector<Sequence> data{MakeSeq("a", g, gt, {gt}), MakeSeq("b", g, gt, {gt})};
  data[1].focal_agent_class = "pedestrian";
  const MetricReport r = EvaluateDataset(data, {}).report;
  EXPECT_EQ(r.sequence_count, 1);
  EXPECT_EQ(r.excluded_count, 1);
  data[0].focal_agent_class = "cyclist";
  EXPECT_THROW(EvaluateDataset(data, {}), ValidationError);
  MetricConfig all;
  all.agent_class_filter.clear();
  EXPECT_EQ(EvaluateDataset(data, all).report.sequence_count, 2);
}

std::vector<Sequence> RandomSequences(std::size_t count, std::uint64_t seed) {
  std::vector<Sequence> out;
  for (const auto& g : GenerateRandomDataset(count, seed)) {
    out.push_back(MakeSequence(g.scenario, g.predictions));
  }
  return out;
}

TEST(EvaluateDatasetTest, IndependentOfWorkersAndBackend) {
  const auto data = RandomSequences(200, 3);
  MetricConfig cfg;
  cfg.agent_class_filter.clear();
  const MetricReport base = EvaluateDataset(data, cfg, 1).report;
  EXPECT_EQ(EvaluateDataset(data, cfg, 4).report, base);
  EXPECT_EQ(EvaluateDataset(data, cfg, 16).report, base);
  cfg.index_backend = IndexBackend::kLinearScan;
  EXPECT_EQ(EvaluateDataset(data, cfg, 3).report, base);
}

TEST(EvaluateDatasetTest, OrderingAndAddedModeProperties) {
  auto data = RandomSequences(300, 9);
  MetricConfig cfg;
  cfg.agent_class_filter.clear();
  const MetricReport base = EvaluateDataset(data, cfg).report;
  EXPECT_LE(base.lmr_at_k, base.lmr_at_1);
  EXPECT_LE(base.mr_at_k, base.mr_at_1);
  for (Sequence& s : data) {
    // Lowest-probability extra mode: the ground truth shifted diagonally.
    Trajectory extra = s.ground_truth;
    for (auto& p : extra.points) p = p + Point2{1.0, 1.0};
    s.predictions.modes.push_back(extra);
    if (s.predictions.probabilities) s.predictions.probabilities->push_back(0.0);
  }
  const MetricReport more = EvaluateDataset(data, cfg).report;
  EXPECT_LE(more.lmr_at_k, base.lmr_at_k);
  EXPECT_LE(more.mr_at_k, base.mr_at_k);
  EXPECT_EQ(more.lmr_at_1, base.lmr_at_1);
  EXPECT_EQ(more.mr_at_1, base.mr_at_1);
}

}  // namespace
}  // namespace lmr
