// Synthetic scenario generation for regression and property tests.
//
// Each template builds a small lane map, drives the ground truth along a
// route through it at constant speed, and derives prediction modes from the
// ground truth by longitudinal and lateral offsets that ramp in linearly over
// the horizon (zero at the first step, full at the endpoint).

#ifndef LMR_TESTKIT_H_
#define LMR_TESTKIT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmr/scenario_io.h"

namespace lmr {

enum class TopologyKind {
  kStraight,
  kParallelOpposing,
  kFork,
  kMerge,
  kChain,
  kDiamond,
  kRoundabout,
};

std::string_view TopologyKindName(TopologyKind kind);
// Throws ValidationError for unknown names.
TopologyKind ParseTopologyKind(std::string_view name);

struct ModePlacement {
  double longitudinal_offset = 0.0;  // meters along the route, ahead > 0
  double lateral_offset = 0.0;       // meters, left of travel direction > 0
  std::optional<double> probability;
};

struct TopologyTemplate {
  TopologyKind kind = TopologyKind::kStraight;
  double segment_length = 30.0;
  double lane_spacing = 3.5;  // lane width and distance between parallel lanes
  int segment_count = 3;
  bool explicit_boundaries = true;

  double speed = 10.0;  // ground-truth speed, m/s
  int horizon = 61;     // ground-truth points
  double dt = 0.1;
  double start_s = 5.0;  // route arc-length of the first ground-truth point
  // Lateral drift of the ground truth reached at its endpoint. Large values
  // put it off-road on purpose.
  double gt_lateral_offset = 0.0;
  // Branch choice for fork, merge and diamond; -1 draws it from the seed.
  int route_choice = -1;

  // Explicit modes; when empty, `random_modes` modes are drawn from the seed.
  std::vector<ModePlacement> modes;
  int random_modes = 6;

  std::string focal_agent_class = "vehicle";
  std::string sequence_id;  // empty: "<kind>_<seed>"
};

struct GeneratedScenario {
  ScenarioFile scenario;
  PredictionFile predictions;
};

// Deterministic in (tmpl, seed).
GeneratedScenario GenerateScenario(const TopologyTemplate& tmpl,
                                   std::uint64_t seed);

// A template with randomized topology, speed and mode placements. A small
// share of the draws places the ground truth off-road or stationary.
TopologyTemplate RandomTemplate(std::uint64_t seed);

// `count` scenarios from RandomTemplate(seed * count + i), ids
// "seq_<seed>_<i>".
std::vector<GeneratedScenario> GenerateRandomDataset(std::size_t count,
                                                     std::uint64_t seed,
                                                     int modes = 6);

// Named templates behind the committed golden files.
struct GoldenCase {
  std::string name;
  TopologyTemplate tmpl;
  std::uint64_t seed = 0;
};

std::vector<GoldenCase> GoldenCases();

// Writes "<dir>/<id>.scenario.json" and "<dir2>/<id>.predictions.json".
void WriteScenarioFiles(const GeneratedScenario& generated,
                        const std::filesystem::path& dataset_dir,
                        const std::filesystem::path& predictions_dir);

}  // namespace lmr

#endif  // LMR_TESTKIT_H_
