// Dataset-directory evaluation behind the command-line tool.

#ifndef LMR_RUNNER_H_
#define LMR_RUNNER_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "lmr/metrics.h"
#include "lmr/scenario_io.h"

namespace lmr {

struct RunConfig {
  std::filesystem::path dataset_dir;
  std::filesystem::path predictions_dir;
  int k = 6;
  MetricConfig metrics;
  int workers = 1;
  std::optional<std::filesystem::path> output_path;  // stdout when empty
  ReportFormat output_format = ReportFormat::kTable;
  bool skip_invalid = false;
  std::optional<std::filesystem::path> per_sequence_dump;
  bool progress = true;
};

// Keeps the k most probable modes in probability order. Throws
// ValidationError naming `sequence_id` when fewer than k modes exist.
PredictionSet TruncateModes(const PredictionSet& predictions, int k,
                            const std::string& sequence_id = "");

// Matches "<id>.scenario.json" in dataset_dir with "<id>.predictions.json"
// in predictions_dir, evaluates every pair, and writes the report to
// output_path (or `out`). Diagnostics go to `err`. Returns 0 iff a report
// was written.
int Run(const RunConfig& config, std::ostream& out, std::ostream& err);

// CSV with one row per evaluated sequence.
std::string WritePerSequence(const DatasetEvaluation& evaluation);

}  // namespace lmr

#endif  // LMR_RUNNER_H_
