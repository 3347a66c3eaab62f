#include "lmr/runner.h"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "lmr/parallel.h"

namespace lmr {
namespace fs = std::filesystem;

PredictionSet TruncateModes(const PredictionSet& predictions, int k,
                            const std::string& sequence_id) {
  if (k < 1) throw ValidationError("k must be >= 1");
  PredictionSet sorted = SortedByProbability(predictions);
  if (sorted.modes.size() < static_cast<std::size_t>(k)) {
    throw ValidationError(fmt::format("sequence '{}' has {} modes, k = {}",
                                      sequence_id, sorted.modes.size(), k));
  }
  sorted.modes.resize(static_cast<std::size_t>(k));
  if (sorted.probabilities) sorted.probabilities->resize(static_cast<std::size_t>(k));
  return sorted;
}

namespace {

// id -> file, for every "<id><suffix>" directly inside dir.
std::map<std::string, fs::path> ListById(const fs::path& dir,
                                         std::string_view suffix) {
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() <= suffix.size() || !name.ends_with(suffix)) continue;
    out.emplace(name.substr(0, name.size() - suffix.size()), entry.path());
  }
  return out;
}

struct Pair {
  std::string id;
  fs::path scenario;
  fs::path predictions;
};

}  // namespace

std::string WritePerSequence(const DatasetEvaluation& evaluation) {
  std::string out =
      "sequence_id,fallback,hit_threshold,lmr_labels,mr_at_1,mr_at_k,"
      "min_ade_at_1,min_fde_at_1,min_ade_at_k,min_fde_at_k\n";
  for (const SequenceResult& r : evaluation.sequences) {
    std::string labels;
    for (int x : r.misses.labels) {
      if (!labels.empty()) labels += ' ';
      labels += std::to_string(x);
    }
    const EuclideanMetrics& e = r.euclidean;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.sequence_id,
                       r.misses.fallback ? 1 : 0, r.misses.hit_threshold,
                       labels, e.mr_at_1, e.mr_at_k, e.min_ade_at_1,
                       e.min_fde_at_1, e.min_ade_at_k, e.min_fde_at_k);
  }
  return out;
}

int Run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  auto fail = [&](const std::string& message) {
    err << "error: " << message << "\n";
    return 1;
  };
  if (config.k < 1) return fail("k must be >= 1");
  if (config.workers < 1) return fail("workers must be >= 1");
  try {
    config.metrics.Validate();
  } catch (const Error& e) {
    return fail(e.what());
  }
  for (const fs::path& dir : {config.dataset_dir, config.predictions_dir}) {
    if (!fs::is_directory(dir)) return fail("not a directory: " + dir.string());
  }

  const auto scenarios = ListById(config.dataset_dir, kScenarioSuffix);
  const auto predictions = ListById(config.predictions_dir, kPredictionSuffix);
  std::vector<Pair> pairs;
  int unmatched_scenarios = 0;
  for (const auto& [id, path] : scenarios) {
    const auto it = predictions.find(id);
    if (it == predictions.end()) {
      ++unmatched_scenarios;
      continue;
    }
    pairs.push_back({id, path, it->second});
  }
  const int unmatched_predictions =
      static_cast<int>(predictions.size() - pairs.size());
  if (unmatched_scenarios > 0) {
    err << "warning: " << unmatched_scenarios
        << " scenario file(s) without predictions\n";
  }
  if (unmatched_predictions > 0) {
    err << "warning: " << unmatched_predictions
        << " prediction file(s) without a scenario\n";
  }
  if (pairs.empty()) return fail("no evaluable sequences");

  std::vector<std::optional<Sequence>> loaded(pairs.size());
  std::vector<std::string> problems(pairs.size());
  ParallelFor(pairs.size(), config.workers, [&](std::size_t i) {
    const Pair& p = pairs[i];
    try {
      const ScenarioFile sc = LoadScenario(p.scenario);
      const PredictionFile pf = LoadPredictions(p.predictions);
      if (sc.sequence_id != p.id) {
        throw ValidationError("file " + p.scenario.string() +
                              " declares sequence_id '" + sc.sequence_id + "'");
      }
      Sequence seq = MakeSequence(sc, pf);
      seq.predictions = TruncateModes(seq.predictions, config.k, p.id);
      loaded[i] = std::move(seq);
    } catch (const Error& e) {
      problems[i] = e.what();
    }
  });

  std::vector<Sequence> dataset;
  dataset.reserve(pairs.size());
  int invalid = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (loaded[i]) {
      dataset.push_back(std::move(*loaded[i]));
      continue;
    }
    if (!config.skip_invalid) return fail(problems[i]);
    err << "warning: skipping invalid sequence: " << problems[i] << "\n";
    ++invalid;
  }
  if (invalid > 0) err << "warning: " << invalid << " invalid sequence(s) skipped\n";
  if (dataset.empty()) return fail("no evaluable sequences");
  if (config.progress) {
    err << "evaluating " << dataset.size() << " sequence(s) on "
        << config.workers << " worker(s)\n";
  }

  DatasetEvaluation evaluation;
  try {
    evaluation = EvaluateDataset(dataset, config.metrics, config.workers);
  } catch (const Error& e) {
    return fail(e.what());
  }
  if (evaluation.report.excluded_count > 0) {
    err << "warning: " << evaluation.report.excluded_count
        << " sequence(s) excluded by the agent-class filter\n";
  }

  if (config.per_sequence_dump) {
    std::ofstream dump(*config.per_sequence_dump, std::ios::binary);
    if (!dump) return fail("cannot write " + config.per_sequence_dump->string());
    dump << WritePerSequence(evaluation);
  }

  const std::string text = WriteReport(evaluation.report, config.output_format);
  if (config.output_path) {
    std::ofstream file(*config.output_path, std::ios::binary);
    if (!file) return fail("cannot write " + config.output_path->string());
    file << text;
    if (!file.flush()) return fail("cannot write " + config.output_path->string());
  } else {
    out << text;
    out.flush();
  }
  return 0;
}

}  // namespace lmr
