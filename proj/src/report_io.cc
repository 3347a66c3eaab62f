#include <fmt/format.h>

#include "json.hpp"
#include "lmr/scenario_io.h"

namespace lmr {

using nlohmann::ordered_json;

namespace {

struct RatioField {
  const char* name;
  const char* label;
  double MetricReport::*member;
  bool percent;
};

// Stable field order for every output format.
constexpr RatioField kValueFields[] = {
    {"lmr_at_1", "LMR@1 (%)", &MetricReport::lmr_at_1, true},
    {"lmr_at_k", "LMR@k (%)", &MetricReport::lmr_at_k, true},
    {"mr_at_1", "MR@1 (%)", &MetricReport::mr_at_1, true},
    {"mr_at_k", "MR@k (%)", &MetricReport::mr_at_k, true},
    {"min_ade_at_1", "minADE@1 (m)", &MetricReport::min_ade_at_1, false},
    {"min_fde_at_1", "minFDE@1 (m)", &MetricReport::min_fde_at_1, false},
    {"min_ade_at_k", "minADE@k (m)", &MetricReport::min_ade_at_k, false},
    {"min_fde_at_k", "minFDE@k (m)", &MetricReport::min_fde_at_k, false},
};

struct CountField {
  const char* name;
  const char* label;
  int MetricReport::*member;
};

constexpr CountField kCountFields[] = {
    {"sequence_count", "sequences", &MetricReport::sequence_count},
    {"fallback_count", "euclidean fallbacks", &MetricReport::fallback_count},
    {"excluded_count", "excluded by class", &MetricReport::excluded_count},
};

std::string Number(double x) { return ordered_json(x).dump(); }

}  // namespace

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "table") return ReportFormat::kTable;
  throw ValidationError("unknown report format '" + std::string(name) +
                        "' (expected json, csv or table)");
}

std::string WriteReport(const MetricReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson: {
      ordered_json j;
      for (const auto& f : kValueFields) j[f.name] = report.*f.member;
      for (const auto& f : kCountFields) j[f.name] = report.*f.member;
      return j.dump(2) + "\n";
    }
    case ReportFormat::kCsv: {
      std::string header;
      std::string row;
      for (const auto& f : kValueFields) {
        header += std::string(header.empty() ? "" : ",") + f.name;
        row += std::string(row.empty() ? "" : ",") + Number(report.*f.member);
      }
      for (const auto& f : kCountFields) {
        header += std::string(",") + f.name;
        row += "," + std::to_string(report.*f.member);
      }
      return header + "\n" + row + "\n";
    }
    case ReportFormat::kTable: {
      std::string out = fmt::format("{:<22}{:>10}\n", "metric", "value");
      for (const auto& f : kValueFields) {
        const double v = report.*f.member;
        out += fmt::format("{:<22}{:>10.2f}\n", f.label, f.percent ? 100.0 * v : v);
      }
      for (const auto& f : kCountFields) {
        out += fmt::format("{:<22}{:>10}\n", f.label, report.*f.member);
      }
      return out;
    }
  }
  return {};
}

MetricReport ParseReportJson(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw FormatError("", "", 0, e.what());
  }
  MetricReport report;
  try {
    for (const auto& f : kValueFields) report.*f.member = j.at(f.name).get<double>();
    for (const auto& f : kCountFields) report.*f.member = j.at(f.name).get<int>();
  } catch (const ordered_json::exception& e) {
    throw FormatError("", "", 0, std::string("invalid report: ") + e.what());
  }
  return report;
}

}  // namespace lmr
