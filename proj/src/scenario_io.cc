#include "lmr/scenario_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace lmr {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Line-aware parsing.
//
// nlohmann/json does not keep source positions, so the parser is fed through
// an iterator that counts newlines as characters are consumed, and a parse
// callback records the line of every value under its JSON pointer.

struct LineCounter {
  int line = 1;
  int last_token_line = 1;
};

class CountingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator() = default;
  CountingIterator(const char* p, LineCounter* counter)
      : p_(p), counter_(counter) {}

  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    const char c = *p_;
    if (c == '\n') {
      ++counter_->line;
    } else if (c != ' ' && c != '\t' && c != '\r') {
      counter_->last_token_line = counter_->line;
    }
    ++p_;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator old = *this;
    ++*this;
    return old;
  }
  friend bool operator==(const CountingIterator& a, const CountingIterator& b) {
    return a.p_ == b.p_;
  }

 private:
  const char* p_ = nullptr;
  LineCounter* counter_ = nullptr;
};

std::string EscapePointerToken(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

int LineOfByte(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(
                 std::count(text.begin(),
                            text.begin() + static_cast<std::ptrdiff_t>(byte),
                            '\n'));
}

// Second, slower pass over a document that already parsed: maps every JSON
// pointer to the line of its last token.
std::unordered_map<std::string, int> BuildLineMap(std::string_view text) {
  std::unordered_map<std::string, int> lines;
  LineCounter counter;

  struct Frame {
    bool is_array = false;
    std::size_t index = 0;
    std::string key;
    std::string pointer;
  };
  std::vector<Frame> stack;

  auto child_pointer = [&]() -> std::string {
    if (stack.empty()) return "";
    const Frame& f = stack.back();
    return f.pointer + "/" +
           (f.is_array ? std::to_string(f.index) : EscapePointerToken(f.key));
  };
  auto finish_child = [&] {
    if (!stack.empty() && stack.back().is_array) ++stack.back().index;
  };

  json::parser_callback_t callback = [&](int /*depth*/,
                                         json::parse_event_t event,
                                         json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
      case json::parse_event_t::array_start: {
        const std::string ptr = child_pointer();
        lines.emplace(ptr, counter.last_token_line);
        stack.push_back({event == json::parse_event_t::array_start, 0, "", ptr});
        break;
      }
      case json::parse_event_t::key:
        stack.back().key = parsed.get<std::string>();
        break;
      case json::parse_event_t::value:
        lines.emplace(child_pointer(), counter.last_token_line);
        finish_child();
        break;
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        stack.pop_back();
        finish_child();
        break;
    }
    return true;
  };

  const CountingIterator first(text.data(), &counter);
  const CountingIterator last(text.data() + text.size(), &counter);
  json::parse(first, last, callback, /*allow_exceptions=*/false);
  return lines;
}

struct Document {
  json root;
  std::string_view text;
  std::string source;

  [[noreturn]] void Fail(const std::string& pointer,
                         const std::string& message) const {
    const auto lines = BuildLineMap(text);
    const auto it = lines.find(pointer);
    throw FormatError(source, pointer.empty() ? "/" : pointer,
                      it == lines.end() ? 0 : it->second, message);
  }
};

Document ParseDocument(std::string_view text, const std::string& source) {
  Document doc;
  doc.text = text;
  doc.source = source;
  try {
    doc.root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(source, "",
                      LineOfByte(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  } catch (const json::exception& e) {
    // Numeric overflow such as 1e999 is reported without a position.
    throw FormatError(source, "", 0, e.what());
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Schema helpers.

std::string Join(const std::string& pointer, const std::string& key) {
  return pointer + "/" + EscapePointerToken(key);
}
std::string Join(const std::string& pointer, std::size_t index) {
  return pointer + "/" + std::to_string(index);
}

const json& At(const Document& doc, const std::string& pointer) {
  return doc.root.at(json::json_pointer(pointer));
}

const json& RequireKey(const Document& doc, const std::string& pointer,
                       const std::string& key) {
  const json& obj = At(doc, pointer);
  const auto it = obj.find(key);
  if (it == obj.end()) doc.Fail(pointer, "missing required field '" + key + "'");
  return *it;
}

void RequireObject(const Document& doc, const std::string& pointer) {
  if (!At(doc, pointer).is_object()) doc.Fail(pointer, "expected an object");
}

std::string ReadString(const Document& doc, const std::string& pointer,
                       const std::string& key) {
  const json& v = RequireKey(doc, pointer, key);
  if (!v.is_string()) doc.Fail(Join(pointer, key), "expected a string");
  return v.get<std::string>();
}

double ReadNumber(const Document& doc, const std::string& pointer) {
  const json& v = At(doc, pointer);
  if (!v.is_number()) doc.Fail(pointer, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) doc.Fail(pointer, "number is not finite");
  return x;
}

void CheckFormatVersion(const Document& doc) {
  const std::string version = ReadString(doc, "", "format_version");
  if (version != kFormatVersion) {
    doc.Fail("/format_version", "unsupported format_version '" + version +
                                    "', expected '" +
                                    std::string(kFormatVersion) + "'");
  }
}

std::vector<Point2> ReadPoints(const Document& doc, const std::string& pointer) {
  const json& arr = At(doc, pointer);
  if (!arr.is_array()) doc.Fail(pointer, "expected an array of [x, y] points");
  std::vector<Point2> points;
  points.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string ptr = Join(pointer, i);
    const json& p = arr[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number()) {
      doc.Fail(ptr, "point " + std::to_string(i) + " must be [x, y]");
    }
    const Point2 pt{p[0].get<double>(), p[1].get<double>()};
    if (!IsFinite(pt)) {
      doc.Fail(ptr, "point " + std::to_string(i) + " has a non-finite coordinate");
    }
    points.push_back(pt);
  }
  return points;
}

std::vector<std::string> ReadIdList(const Document& doc,
                                    const std::string& pointer) {
  const json& arr = At(doc, pointer);
  if (!arr.is_array()) doc.Fail(pointer, "expected an array of segment ids");
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) doc.Fail(Join(pointer, i), "expected a string id");
    ids.push_back(arr[i].get<std::string>());
  }
  return ids;
}

RawLaneSegment ReadLane(const Document& doc, const std::string& pointer) {
  RequireObject(doc, pointer);
  const json& obj = At(doc, pointer);
  RawLaneSegment lane;
  lane.id = ReadString(doc, pointer, "id");
  if (lane.id.empty()) doc.Fail(Join(pointer, "id"), "lane id must not be empty");
  RequireKey(doc, pointer, "centerline");
  lane.centerline = ReadPoints(doc, Join(pointer, "centerline"));
  if (lane.centerline.size() < 2) {
    doc.Fail(Join(pointer, "centerline"),
             "lane '" + lane.id + "' centerline needs >= 2 points");
  }
  const bool has_left = obj.contains("left_boundary");
  const bool has_right = obj.contains("right_boundary");
  if (has_left != has_right) {
    doc.Fail(pointer, "lane '" + lane.id +
                          "' needs both left_boundary and right_boundary or neither");
  }
  if (has_left) {
    lane.left_boundary = ReadPoints(doc, Join(pointer, "left_boundary"));
    lane.right_boundary = ReadPoints(doc, Join(pointer, "right_boundary"));
    if (lane.left_boundary->size() < 2 || lane.right_boundary->size() < 2) {
      doc.Fail(pointer, "lane '" + lane.id + "' boundaries need >= 2 points");
    }
  }
  if (obj.contains("successors")) {
    lane.successors = ReadIdList(doc, Join(pointer, "successors"));
  }
  if (obj.contains("predecessors")) {
    lane.predecessors = ReadIdList(doc, Join(pointer, "predecessors"));
  }
  return lane;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), "", 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Writing. Each point list is kept on one line.

std::string Num(double x) { return json(x).dump(); }
std::string Str(const std::string& s) { return json(s).dump(); }

std::string Points(const std::vector<Point2>& pts) {
  std::string out = "[";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ", ";
    out += "[" + Num(pts[i].x) + ", " + Num(pts[i].y) + "]";
  }
  return out + "]";
}

std::string Ids(const std::vector<std::string>& ids) {
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += Str(ids[i]);
  }
  return out + "]";
}

}  // namespace

ScenarioFile ParseScenario(std::string_view text, const std::string& source) {
  const Document doc = ParseDocument(text, source);
  RequireObject(doc, "");
  CheckFormatVersion(doc);

  ScenarioFile sc;
  sc.sequence_id = ReadString(doc, "", "sequence_id");
  sc.focal_agent_class = ReadString(doc, "", "focal_agent_class");
  RequireKey(doc, "", "dt");
  sc.dt = ReadNumber(doc, "/dt");
  if (!(sc.dt > 0.0)) doc.Fail("/dt", "dt must be > 0");

  RequireKey(doc, "", "ground_truth_future");
  sc.ground_truth_future = ReadPoints(doc, "/ground_truth_future");
  if (sc.ground_truth_future.size() < 2) {
    doc.Fail("/ground_truth_future", "ground truth needs >= 2 points");
  }
  if (doc.root.contains("observed_history")) {
    sc.observed_history = ReadPoints(doc, "/observed_history");
  }

  const json& lanes = RequireKey(doc, "", "lane_graph");
  if (!lanes.is_array()) doc.Fail("/lane_graph", "expected an array of lanes");
  if (lanes.empty()) doc.Fail("/lane_graph", "empty lane graph");
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const std::string ptr = Join("/lane_graph", i);
    RawLaneSegment lane = ReadLane(doc, ptr);
    if (!seen.emplace(lane.id, i).second) {
      doc.Fail(Join(ptr, "id"), "duplicate lane id '" + lane.id + "'");
    }
    sc.lane_graph.push_back(std::move(lane));
  }
  return sc;
}

ScenarioFile LoadScenario(const std::filesystem::path& path) {
  return ParseScenario(ReadFile(path), path.string());
}

std::string WriteScenario(const ScenarioFile& sc) {
  std::string out = "{\n";
  out += "  \"format_version\": " + Str(std::string(kFormatVersion)) + ",\n";
  out += "  \"sequence_id\": " + Str(sc.sequence_id) + ",\n";
  out += "  \"focal_agent_class\": " + Str(sc.focal_agent_class) + ",\n";
  out += "  \"dt\": " + Num(sc.dt) + ",\n";
  out += "  \"ground_truth_future\": " + Points(sc.ground_truth_future) + ",\n";
  if (sc.observed_history) {
    out += "  \"observed_history\": " + Points(*sc.observed_history) + ",\n";
  }
  out += "  \"lane_graph\": [";
  for (std::size_t i = 0; i < sc.lane_graph.size(); ++i) {
    const RawLaneSegment& l = sc.lane_graph[i];
    out += i ? ",\n" : "\n";
    out += "    {\n";
    out += "      \"id\": " + Str(l.id) + ",\n";
    out += "      \"centerline\": " + Points(l.centerline) + ",\n";
    if (l.left_boundary && l.right_boundary) {
      out += "      \"left_boundary\": " + Points(*l.left_boundary) + ",\n";
      out += "      \"right_boundary\": " + Points(*l.right_boundary) + ",\n";
    }
    out += "      \"successors\": " + Ids(l.successors) + ",\n";
    out += "      \"predecessors\": " + Ids(l.predecessors) + "\n";
    out += "    }";
  }
  out += "\n  ]\n}\n";
  return out;
}

PredictionFile ParsePredictions(std::string_view text,
                                const std::string& source) {
  const Document doc = ParseDocument(text, source);
  RequireObject(doc, "");
  CheckFormatVersion(doc);

  PredictionFile pf;
  pf.sequence_id = ReadString(doc, "", "sequence_id");
  const json& modes = RequireKey(doc, "", "modes");
  if (!modes.is_array()) doc.Fail("/modes", "expected an array of modes");
  if (modes.empty()) doc.Fail("/modes", "no prediction modes");

  std::size_t with_probability = 0;
  std::vector<double> probs;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string ptr = Join("/modes", i);
    RequireObject(doc, ptr);
    RequireKey(doc, ptr, "points");
    pf.modes.push_back(ReadPoints(doc, Join(ptr, "points")));
    if (pf.modes.back().empty()) doc.Fail(Join(ptr, "points"), "mode has no points");
    if (pf.modes.back().size() != pf.modes.front().size()) {
      doc.Fail(Join(ptr, "points"),
               "mode has " + std::to_string(pf.modes.back().size()) +
                   " points, mode 0 has " +
                   std::to_string(pf.modes.front().size()));
    }
    if (modes[i].contains("probability")) {
      const std::string pptr = Join(ptr, "probability");
      const double p = ReadNumber(doc, pptr);
      if (p < 0.0 || p > 1.0) doc.Fail(pptr, "probability must be in [0, 1]");
      probs.push_back(p);
      ++with_probability;
    }
  }
  if (with_probability != 0 && with_probability != modes.size()) {
    doc.Fail("/modes", "probability must be given for all modes or none");
  }
  if (with_probability != 0) {
    double total = 0.0;
    for (double p : probs) total += p;
    if (total > 1.0 + 1e-6) {
      doc.Fail("/modes", "probabilities sum to more than 1");
    }
    PredictionSet set;
    for (auto& m : pf.modes) set.modes.push_back({std::move(m), 0.1});
    set.probabilities = std::move(probs);
    set = SortedByProbability(std::move(set));
    pf.modes.clear();
    for (auto& m : set.modes) pf.modes.push_back(std::move(m.points));
    pf.probabilities = std::move(set.probabilities);
  }
  return pf;
}

PredictionFile LoadPredictions(const std::filesystem::path& path) {
  return ParsePredictions(ReadFile(path), path.string());
}

std::string WritePredictions(const PredictionFile& pf) {
  std::string out = "{\n";
  out += "  \"format_version\": " + Str(std::string(kFormatVersion)) + ",\n";
  out += "  \"sequence_id\": " + Str(pf.sequence_id) + ",\n";
  out += "  \"modes\": [";
  for (std::size_t i = 0; i < pf.modes.size(); ++i) {
    out += i ? ",\n" : "\n";
    out += "    {";
    if (pf.probabilities) {
      out += "\"probability\": " + Num((*pf.probabilities)[i]) + ", ";
    }
    out += "\"points\": " + Points(pf.modes[i]) + "}";
  }
  out += "\n  ]\n}\n";
  return out;
}

Sequence MakeSequence(const ScenarioFile& scenario,
                      const PredictionFile& predictions) {
  if (scenario.sequence_id != predictions.sequence_id) {
    throw ValidationError("prediction sequence_id '" + predictions.sequence_id +
                          "' does not match scenario '" +
                          scenario.sequence_id + "'");
  }
  Sequence seq;
  seq.sequence_id = scenario.sequence_id;
  seq.focal_agent_class = scenario.focal_agent_class;
  seq.ground_truth = {scenario.ground_truth_future, scenario.dt};
  for (const auto& mode : predictions.modes) {
    if (mode.size() != scenario.ground_truth_future.size()) {
      throw ValidationError(
          "sequence '" + scenario.sequence_id + "': prediction modes have " +
          std::to_string(mode.size()) + " points, ground truth has " +
          std::to_string(scenario.ground_truth_future.size()));
    }
    seq.predictions.modes.push_back({mode, scenario.dt});
  }
  seq.predictions.probabilities = predictions.probabilities;
  try {
    seq.graph = std::make_shared<const LaneGraph>(
        BuildLaneGraph(scenario.lane_graph));
  } catch (const ValidationError& e) {
    throw ValidationError("sequence '" + scenario.sequence_id + "': " +
                          e.what());
  }
  return seq;
}

}  // namespace lmr
