// Scenario and prediction file formats (see docs/file_formats.md) and report
// serialization.

#ifndef LMR_SCENARIO_IO_H_
#define LMR_SCENARIO_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmr/lane_graph.h"
#include "lmr/metrics.h"

namespace lmr {

inline constexpr std::string_view kFormatVersion = "1";
inline constexpr std::string_view kScenarioSuffix = ".scenario.json";
inline constexpr std::string_view kPredictionSuffix = ".predictions.json";

struct ScenarioFile {
  std::string sequence_id;
  std::string focal_agent_class;
  double dt = 0.1;
  std::vector<Point2> ground_truth_future;
  std::optional<std::vector<Point2>> observed_history;
  std::vector<RawLaneSegment> lane_graph;

  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

struct PredictionFile {
  std::string sequence_id;
  // Mode trajectories carry no dt of their own; it comes from the scenario.
  std::vector<std::vector<Point2>> modes;
  std::optional<std::vector<double>> probabilities;

  friend bool operator==(const PredictionFile&, const PredictionFile&) = default;
};

// Parsers throw FormatError carrying the JSON pointer of the offending field
// and its line. `source` names the input in messages.
ScenarioFile ParseScenario(std::string_view text, const std::string& source = "");
ScenarioFile LoadScenario(const std::filesystem::path& path);
std::string WriteScenario(const ScenarioFile& scenario);

// Modes come back sorted by descending probability when probabilities are
// present.
PredictionFile ParsePredictions(std::string_view text,
                                const std::string& source = "");
PredictionFile LoadPredictions(const std::filesystem::path& path);
std::string WritePredictions(const PredictionFile& predictions);

// Builds the lane graph and pairs the files into one evaluable sequence.
// Throws ValidationError when the ids differ or mode lengths mismatch.
Sequence MakeSequence(const ScenarioFile& scenario,
                      const PredictionFile& predictions);

enum class ReportFormat { kJson, kCsv, kTable };

ReportFormat ParseReportFormat(std::string_view name);
std::string WriteReport(const MetricReport& report, ReportFormat format);
MetricReport ParseReportJson(std::string_view text);

}  // namespace lmr

#endif  // LMR_SCENARIO_IO_H_
