// Command-line entry point.
//
//   lmr --dataset DIR --predictions DIR [--k 6] [--format table|json|csv] ...
//   lmr generate --template random --count 100 --seed 7 --out-dataset D --out-predictions P
//   lmr golden --out tests/golden

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lmr/parallel.h"
#include "lmr/runner.h"
#include "lmr/testkit.h"

namespace {

std::set<std::string> SplitClasses(const std::string& text) {
  std::set<std::string> out;
  if (text == "*") return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

lmr::ModePlacement ParseMode(const std::string& text) {
  std::stringstream ss(text);
  std::string field;
  std::vector<double> values;
  while (std::getline(ss, field, ',')) values.push_back(std::stod(field));
  if (values.size() < 2 || values.size() > 3) {
    throw lmr::ValidationError("--mode expects LONG,LAT[,PROB], got '" + text +
                               "'");
  }
  lmr::ModePlacement m{.longitudinal_offset = values[0],
                       .lateral_offset = values[1],
                       .probability = std::nullopt};
  if (values.size() == 3) m.probability = values[2];
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane Miss Rate and Euclidean metrics for trajectory predictions"};
  app.require_subcommand(0, 1);

  lmr::RunConfig run;
  run.workers = lmr::DefaultWorkerCount();
  std::string format = "table";
  std::string classes = "vehicle,motorcyclist,bus";
  std::string output;
  std::string dump;
  bool linear_scan = false;
  bool quiet = false;
  auto& m = run.metrics;
  auto& a = run.metrics.assignment;

  app.add_option("--dataset", run.dataset_dir, "Directory of *.scenario.json files");
  app.add_option("--predictions", run.predictions_dir,
                 "Directory of *.predictions.json files");
  app.add_option("--k", run.k, "Modes evaluated per sequence")->capture_default_str();
  app.add_option("--c-scale", m.c_scale, "Hit threshold slope (s)")->capture_default_str();
  app.add_option("--c-const", m.c_const, "Hit threshold offset (m)")->capture_default_str();
  app.add_option("--c-dist", a.c_dist, "Distance confidence scale (m)")->capture_default_str();
  app.add_option("--c-orient", a.c_orient, "Orientation confidence scale (rad)")
      ->capture_default_str();
  app.add_option("--w", a.w, "Distance weight in the combined confidence")
      ->capture_default_str();
  app.add_option("--margin", a.margin, "Prediction assignment margin")->capture_default_str();
  app.add_option("--mr-threshold", m.euclidean_mr_threshold, "Euclidean MR radius (m)")
      ->capture_default_str();
  app.add_option("--half-width", a.half_width,
                 "Lane half-width when boundaries are missing (m)")
      ->capture_default_str();
  app.add_option("--query-inflate", a.query_inflate,
                 "Candidate query radius (m); negative: half-width + 1");
  app.add_option("--classes", classes,
                 "Comma-separated focal agent classes, '*' for all")
      ->capture_default_str();
  app.add_option("--workers", run.workers, "Worker threads")->capture_default_str();
  app.add_option("--output", output, "Report file (default stdout)");
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  app.add_flag("--linear-scan", linear_scan, "Bypass the R-tree");
  app.add_flag("--skip-invalid", run.skip_invalid,
               "Exclude invalid sequences instead of aborting");
  app.add_option("--dump-per-sequence", dump, "Per-sequence CSV output");
  app.add_flag("--quiet", quiet, "No progress output");

  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset");
  std::string template_name = "random";
  std::size_t count = 1;
  std::uint64_t seed = 0;
  int modes = 6;
  std::string out_dataset;
  std::string out_predictions;
  std::vector<std::string> mode_specs;
  lmr::TopologyTemplate tmpl;
  bool no_boundaries = false;
  gen->add_option("--template", template_name,
                  "random, straight, parallel_opposing, fork, merge, chain, "
                  "diamond or roundabout")
      ->capture_default_str();
  gen->add_option("--count", count)->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--modes", modes, "Random modes per sequence")->capture_default_str();
  gen->add_option("--mode", mode_specs, "Explicit mode LONG,LAT[,PROB] (repeatable)");
  gen->add_option("--speed", tmpl.speed)->capture_default_str();
  gen->add_option("--segment-length", tmpl.segment_length)->capture_default_str();
  gen->add_option("--segment-count", tmpl.segment_count)->capture_default_str();
  gen->add_option("--lane-spacing", tmpl.lane_spacing)->capture_default_str();
  gen->add_option("--gt-lateral-offset", tmpl.gt_lateral_offset)->capture_default_str();
  gen->add_flag("--no-boundaries", no_boundaries);
  gen->add_option("--out-dataset", out_dataset)->required();
  gen->add_option("--out-predictions", out_predictions)->required();

  auto* golden = app.add_subcommand("golden", "Write the golden regression scenarios");
  std::string golden_dir;
  golden->add_option("--out", golden_dir, "Target directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (template_name == "random") {
        for (const auto& g : lmr::GenerateRandomDataset(count, seed, modes)) {
          lmr::WriteScenarioFiles(g, out_dataset, out_predictions);
        }
      } else {
        tmpl.kind = lmr::ParseTopologyKind(template_name);
        tmpl.explicit_boundaries = !no_boundaries;
        tmpl.random_modes = modes;
        for (const auto& spec : mode_specs) tmpl.modes.push_back(ParseMode(spec));
        for (std::size_t i = 0; i < count; ++i) {
          lmr::WriteScenarioFiles(lmr::GenerateScenario(tmpl, seed + i),
                                  out_dataset, out_predictions);
        }
      }
      return 0;
    }
    if (*golden) {
      const std::filesystem::path dir(golden_dir);
      for (const auto& c : lmr::GoldenCases()) {
        lmr::WriteScenarioFiles(lmr::GenerateScenario(c.tmpl, c.seed),
                                dir / "dataset", dir / "predictions");
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (run.dataset_dir.empty() || run.predictions_dir.empty()) {
    std::cerr << "error: --dataset and --predictions are required\n"
              << app.help();
    return 2;
  }
  run.output_format = lmr::ParseReportFormat(format);
  run.metrics.agent_class_filter = SplitClasses(classes);
  run.metrics.index_backend =
      linear_scan ? lmr::IndexBackend::kLinearScan : lmr::IndexBackend::kRTree;
  if (!output.empty()) run.output_path = output;
  if (!dump.empty()) run.per_sequence_dump = dump;
  run.progress = !quiet;
  return lmr::Run(run, std::cout, std::cerr);
}
