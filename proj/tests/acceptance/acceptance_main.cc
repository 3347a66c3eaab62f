// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Tolerances and sizes are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "json.hpp"
#include "lmr/assignment.h"
#include "lmr/lane_distance.h"
#include "lmr/metrics.h"
#include "lmr/runner.h"
#include "lmr/scenario_io.h"
#include "lmr/testkit.h"
#include "support/oracles.h"

namespace lmr {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned acceptance parameters.
constexpr double kThresholdTolerance = 1e-9;
constexpr int kOracleGraphs = 1000;
constexpr double kOracleDistanceTolerance = 1e-9;
constexpr double kOracleTimeLimit = 10.0;
constexpr std::size_t kOrderingSequences = 1000;
constexpr double kOrderingTimeLimit = 30.0;
constexpr std::size_t kTransformSequences = 100;
constexpr double kTransformDistanceTolerance = 1e-6;
constexpr double kTransformTimeLimit = 10.0;
constexpr std::size_t kDeterminismSequences = 25000;
constexpr double kDeterminismTimeTarget = 60.0;
constexpr double kFormulaTolerance = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// ---------------------------------------------------------------------------
// Golden scenarios and their hand-derived expected labels.

struct GoldenExpectation {
  std::vector<int> lmr_labels;
  bool fallback = false;
  int mr_at_1 = 0;
  int mr_at_k = 0;
};

struct GoldenResult {
  SequenceResult result;
  MetricReport report;
};

GoldenExpectation Expected(const std::string& id) {
  std::ifstream in(fs::path(LMR_GOLDEN_DIR) / "expected.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  for (const auto& c : j.at("cases")) {
    if (c.at("sequence_id") != id) continue;
    return {c.at("lmr_labels").get<std::vector<int>>(),
            c.at("fallback").get<bool>(), c.at("mr_at_1").get<int>(),
            c.at("mr_at_k").get<int>()};
  }
  throw std::runtime_error("no expectation for golden case " + id);
}

GoldenResult EvaluateGolden(const std::string& id) {
  const fs::path root(LMR_GOLDEN_DIR);
  const ScenarioFile sc = LoadScenario(root / "dataset" /
                                       (id + std::string(kScenarioSuffix)));
  const PredictionFile pf = LoadPredictions(
      root / "predictions" / (id + std::string(kPredictionSuffix)));
  const std::vector<Sequence> data{MakeSequence(sc, pf)};
  MetricConfig cfg;
  const DatasetEvaluation e = EvaluateDataset(data, cfg);
  return {e.sequences.at(0), e.report};
}

std::string Labels(const std::vector<int>& v) {
  return fmt::format("[{}]", fmt::join(v, ", "));
}

bool MatchesExpectation(const std::string& id, const GoldenResult& r,
                        std::string* detail) {
  const GoldenExpectation x = Expected(id);
  const bool ok = r.result.misses.labels == x.lmr_labels &&
                  r.result.misses.fallback == x.fallback &&
                  r.result.euclidean.mr_at_1 == x.mr_at_1 &&
                  r.result.euclidean.mr_at_k == x.mr_at_k;
  *detail += fmt::format("{}: lmr {} fallback {} mr@1 {} mr@k {}{}; ", id,
                         Labels(r.result.misses.labels), r.result.misses.fallback,
                         r.result.euclidean.mr_at_1, r.result.euclidean.mr_at_k,
                         ok ? "" : " (expected " + Labels(x.lmr_labels) + ")");
  return ok;
}

// ---------------------------------------------------------------------------

Outcome ThresholdCalibration() {
  const double s = HitThreshold(6.67, MetricConfig{});
  return {std::abs(s - 2.034) <= kThresholdTolerance,
          fmt::format("hit_threshold(6.67) = {:.12f}", s)};
}

Outcome OracleEquivalence() {
  std::mt19937_64 rng(20240601);
  const auto start = Clock::now();
  int decisions_agree = 0;
  int reached = 0;
  double worst = 0.0;
  for (int trial = 0; trial < kOracleGraphs; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 20)(rng);
    const LaneGraph g = BuildLaneGraph(testing::RandomRawGraph(rng, n, 5, 30));
    auto pick = [&]() {
      const LaneSegment& seg = g.segment(static_cast<SegmentIndex>(
          std::uniform_int_distribution<std::size_t>(0, g.size() - 1)(rng)));
      return LanePoint{seg.id, testing::Uniform(rng, 0, seg.length())};
    };
    const LanePoint from = pick();
    const LanePoint to = pick();
    const double threshold = testing::Uniform(rng, 0.5, 60);
    const auto oracle = testing::OracleLaneDistance(g, from, to, 2 * threshold);
    const bool expect = oracle.has_value() && *oracle < threshold;
    const std::vector<LanePoint> targets{to};
    const ReachResult r = WithinLaneDistance(g, from, targets, threshold);
    if (r.reached == expect) ++decisions_agree;
    if (r.reached && expect) {
      ++reached;
      worst = std::max(worst, std::abs(*r.distance - *oracle));
    }
  }
  const double elapsed = Seconds(start);
  return {decisions_agree == kOracleGraphs &&
              worst <= kOracleDistanceTolerance && elapsed < kOracleTimeLimit,
          fmt::format("{}/{} decisions agree, {} reached, max |d - oracle| = "
                      "{:.3g} m, {:.2f} s",
                      decisions_agree, kOracleGraphs, reached, worst, elapsed)};
}

Outcome OpposingLaneSemantics() {
  std::string detail;
  const GoldenResult opposing = EvaluateGolden("opposing_lane_lateral");
  const GoldenResult far = EvaluateGolden("correct_lane_far_ahead");
  bool ok = MatchesExpectation("opposing_lane_lateral", opposing, &detail);
  ok = MatchesExpectation("correct_lane_far_ahead", far, &detail) && ok;
  ok = ok && opposing.result.euclidean.mr_at_1 == 0 &&
       opposing.result.misses.labels.at(0) == 1 &&
       far.result.euclidean.mr_at_1 == 1 && far.result.misses.labels.at(0) == 0;
  return {ok, detail};
}

std::vector<Sequence> ToSequences(const std::vector<GeneratedScenario>& g) {
  std::vector<Sequence> out;
  out.reserve(g.size());
  for (const auto& x : g) out.push_back(MakeSequence(x.scenario, x.predictions));
  return out;
}

Outcome OrderingInvariants() {
  const auto start = Clock::now();
  std::vector<Sequence> data =
      ToSequences(GenerateRandomDataset(kOrderingSequences, 11));
  MetricConfig cfg;
  cfg.agent_class_filter.clear();
  const MetricReport base = EvaluateDataset(data, cfg).report;

  // Append one extra mode per sequence ranked below every existing mode.
  std::mt19937_64 rng(12);
  for (Sequence& s : data) {
    Trajectory extra = s.ground_truth;
    const Point2 drift{testing::Uniform(rng, -6, 6), testing::Uniform(rng, -6, 6)};
    const double n = static_cast<double>(extra.points.size() - 1);
    for (std::size_t t = 0; t < extra.points.size(); ++t) {
      extra.points[t] = extra.points[t] + (static_cast<double>(t) / n) * drift;
    }
    s.predictions.modes.push_back(extra);
    if (s.predictions.probabilities) s.predictions.probabilities->push_back(0.0);
  }
  const MetricReport more = EvaluateDataset(data, cfg).report;
  const double elapsed = Seconds(start);

  const bool ordering =
      base.lmr_at_k <= base.lmr_at_1 && base.mr_at_k <= base.mr_at_1 &&
      more.lmr_at_k <= more.lmr_at_1 && more.mr_at_k <= more.mr_at_1;
  const bool added = more.lmr_at_k <= base.lmr_at_k &&
                     more.mr_at_k <= base.mr_at_k &&
                     more.lmr_at_1 == base.lmr_at_1 && more.mr_at_1 == base.mr_at_1;
  return {ordering && added && elapsed < kOrderingTimeLimit,
          fmt::format("LMR@1 {:.4f} LMR@k {:.4f} MR@1 {:.4f} MR@k {:.4f}; with "
                      "extra mode LMR@k {:.4f} MR@k {:.4f}; {:.2f} s",
                      base.lmr_at_1, base.lmr_at_k, base.mr_at_1, base.mr_at_k,
                      more.lmr_at_k, more.mr_at_k, elapsed)};
}

Outcome RigidTransformInvariance() {
  const auto start = Clock::now();
  const auto generated = GenerateRandomDataset(kTransformSequences, 21);
  const double theta = 0.7318;
  const Point2 shift{1234.5, -987.25};
  auto move = [&](Point2 p) {
    return Point2{std::cos(theta) * p.x - std::sin(theta) * p.y,
                  std::sin(theta) * p.x + std::cos(theta) * p.y} +
           shift;
  };
  auto move_all = [&](std::vector<Point2>& pts) {
    for (auto& p : pts) p = move(p);
  };
  std::vector<GeneratedScenario> moved = generated;
  for (auto& g : moved) {
    move_all(g.scenario.ground_truth_future);
    if (g.scenario.observed_history) move_all(*g.scenario.observed_history);
    for (auto& lane : g.scenario.lane_graph) {
      move_all(lane.centerline);
      if (lane.left_boundary) move_all(*lane.left_boundary);
      if (lane.right_boundary) move_all(*lane.right_boundary);
    }
    for (auto& mode : g.predictions.modes) move_all(mode);
  }
  MetricConfig cfg;
  cfg.agent_class_filter.clear();
  const MetricReport a = EvaluateDataset(ToSequences(generated), cfg).report;
  const MetricReport b = EvaluateDataset(ToSequences(moved), cfg).report;
  const double elapsed = Seconds(start);

  const bool rates = a.lmr_at_1 == b.lmr_at_1 && a.lmr_at_k == b.lmr_at_k &&
                     a.mr_at_1 == b.mr_at_1 && a.mr_at_k == b.mr_at_k;
  const double worst = std::max(
      {std::abs(a.min_ade_at_1 - b.min_ade_at_1),
       std::abs(a.min_fde_at_1 - b.min_fde_at_1),
       std::abs(a.min_ade_at_k - b.min_ade_at_k),
       std::abs(a.min_fde_at_k - b.min_fde_at_k)});
  return {rates && worst <= kTransformDistanceTolerance &&
              elapsed < kTransformTimeLimit,
          fmt::format("rates {} (LMR@1 {:.4f} LMR@k {:.4f}), max ADE/FDE "
                      "difference {:.3g} m, {:.2f} s",
                      rates ? "bit-identical" : "differ", a.lmr_at_1,
                      a.lmr_at_k, worst, elapsed)};
}

Outcome DeterminismAndDifferential() {
  const fs::path root = fs::temp_directory_path() /
                        fmt::format("lmr_acceptance_{}", ::getpid());
  fs::remove_all(root);
  const fs::path dataset = root / "dataset";
  const fs::path predictions = root / "predictions";
  fs::create_directories(dataset);
  fs::create_directories(predictions);

  const auto gen_start = Clock::now();
  constexpr std::size_t kChunk = 1000;
  for (std::size_t offset = 0; offset < kDeterminismSequences; offset += kChunk) {
    // Chunked so that the whole dataset never sits in memory at once.
    for (const auto& g : GenerateRandomDataset(kChunk, 1000 + offset / kChunk)) {
      WriteScenarioFiles(g, dataset, predictions);
    }
  }
  const double gen_seconds = Seconds(gen_start);

  struct Variant {
    int workers;
    IndexBackend backend;
    ReportFormat format;
  };
  const std::vector<Variant> variants{
      {1, IndexBackend::kRTree, ReportFormat::kJson},
      {4, IndexBackend::kRTree, ReportFormat::kJson},
      {16, IndexBackend::kRTree, ReportFormat::kJson},
      {16, IndexBackend::kLinearScan, ReportFormat::kJson},
      {1, IndexBackend::kRTree, ReportFormat::kCsv},
      {4, IndexBackend::kRTree, ReportFormat::kCsv},
      {16, IndexBackend::kRTree, ReportFormat::kCsv},
      {16, IndexBackend::kLinearScan, ReportFormat::kCsv},
  };
  std::string json_ref;
  std::string csv_ref;
  bool identical = true;
  bool all_ok = true;
  double full_parallel_seconds = 0.0;
  int sequence_count = 0;
  for (const Variant& v : variants) {
    RunConfig c;
    c.dataset_dir = dataset;
    c.predictions_dir = predictions;
    c.metrics.index_backend = v.backend;
    c.workers = v.workers;
    c.output_format = v.format;
    c.progress = false;
    std::ostringstream out;
    std::ostringstream err;
    const auto start = Clock::now();
    const int status = Run(c, out, err);
    const double elapsed = Seconds(start);
    if (status != 0) {
      all_ok = false;
      std::cerr << err.str();
      continue;
    }
    std::string& ref = v.format == ReportFormat::kJson ? json_ref : csv_ref;
    if (ref.empty()) {
      ref = out.str();
    } else if (ref != out.str()) {
      identical = false;
    }
    if (v.workers == 16 && v.backend == IndexBackend::kRTree &&
        v.format == ReportFormat::kJson) {
      full_parallel_seconds = elapsed;
      sequence_count = ParseReportJson(out.str()).sequence_count +
                       ParseReportJson(out.str()).excluded_count;
    }
  }
  fs::remove_all(root);

  const bool fast = full_parallel_seconds < kDeterminismTimeTarget;
  return {all_ok && identical && fast &&
              sequence_count == static_cast<int>(kDeterminismSequences),
          fmt::format("{} sequences, JSON and CSV byte-identical across workers "
                      "{{1, 4, 16}} and linear scan: {}; run with 16 workers "
                      "took {:.1f} s on {} hardware thread(s) (target < {:.0f} "
                      "s); generation {:.1f} s",
                      sequence_count, identical && all_ok ? "yes" : "no",
                      full_parallel_seconds,
                      std::thread::hardware_concurrency(),
                      kDeterminismTimeTarget, gen_seconds)};
}

Outcome SpecialCases() {
  std::string detail;
  const GoldenResult gt_off = EvaluateGolden("ground_truth_off_road");
  const GoldenResult pred_off = EvaluateGolden("prediction_off_road");
  bool ok = MatchesExpectation("ground_truth_off_road", gt_off, &detail);
  ok = MatchesExpectation("prediction_off_road", pred_off, &detail) && ok;
  ok = ok && gt_off.report.fallback_count == 1 &&
       pred_off.report.fallback_count == 0 &&
       pred_off.result.misses.labels.at(0) == 1;
  detail += fmt::format("fallback_count {} and {}", gt_off.report.fallback_count,
                        pred_off.report.fallback_count);
  return {ok, detail};
}

Outcome FormulaSweep() {
  // Expected values written out by hand for c_dist = 5, c_orient = pi.
  const std::vector<std::pair<double, double>> distance{
      {0.0, 1.0}, {1.25, 0.75}, {2.5, 0.5}, {5.0, 0.0}, {6.0, 0.0}};
  const std::vector<std::pair<double, double>> angle{
      {0.0, 1.0}, {kPi / 4, 0.75}, {kPi / 2, 0.5}, {kPi, 0.0}};
  double worst = 0.0;
  int checked = 0;
  for (const auto& [d, pd] : distance) {
    for (const auto& [a, pa] : angle) {
      const double got_pd = DistanceConfidence(d, 5.0);
      const double got_pa = OrientationConfidence(a, kPi);
      const double got_p = CombinedConfidence(got_pd, got_pa, 0.5);
      worst = std::max({worst, std::abs(got_pd - pd), std::abs(got_pa - pa),
                        std::abs(got_p - 0.5 * (pd + pa))});
      ++checked;
    }
  }

  // End to end through GetLaneAssignments on a straight eastbound lane, for
  // offsets that stay inside the 2 m lane buffer.
  RawLaneSegment lane;
  lane.id = "east";
  lane.centerline = {{0, 0}, {40, 0}};
  const LaneGraph g = BuildLaneGraph(std::vector<RawLaneSegment>{lane});
  const CenterlineIndex index(g);
  const AssignmentConfig cfg;
  for (const auto& [d, pd] : distance) {
    if (d >= 2.0) continue;
    for (const auto& [a, pa] : angle) {
      const Point2 end{20, d};
      const std::vector<Point2> traj{
          end - Point2{2 * std::cos(a), 2 * std::sin(a)},
          end - Point2{std::cos(a), std::sin(a)}, end};
      const auto got = GetLaneAssignments(traj, g, index, cfg);
      if (got.size() != 1) {
        worst = 1.0;
        continue;
      }
      worst = std::max(worst, std::abs(got[0].p - 0.5 * (pd + pa)));
      ++checked;
    }
  }
  return {worst <= kFormulaTolerance,
          fmt::format("{} grid points, max error {:.3g}", checked, worst)};
}

}  // namespace
}  // namespace lmr

int main() {
  using lmr::Outcome;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "threshold calibration", lmr::ThresholdCalibration},
      {2, "lane distance matches exhaustive oracle", lmr::OracleEquivalence},
      {3, "opposing lane and far-ahead golden labels", lmr::OpposingLaneSemantics},
      {4, "miss-rate ordering and added-mode invariants", lmr::OrderingInvariants},
      {5, "rigid-transform invariance", lmr::RigidTransformInvariance},
      {6, "determinism across workers and index backends",
       lmr::DeterminismAndDifferential},
      {7, "off-road special cases", lmr::SpecialCases},
      {8, "confidence formula sweep", lmr::FormulaSweep},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " ("
              << c.name << "): " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
