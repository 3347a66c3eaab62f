#include "lmr/testkit.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>

namespace lmr {
namespace {

constexpr std::array<std::pair<TopologyKind, std::string_view>, 7> kKindNames{{
    {TopologyKind::kStraight, "straight"},
    {TopologyKind::kParallelOpposing, "parallel_opposing"},
    {TopologyKind::kFork, "fork"},
    {TopologyKind::kMerge, "merge"},
    {TopologyKind::kChain, "chain"},
    {TopologyKind::kDiamond, "diamond"},
    {TopologyKind::kRoundabout, "roundabout"},
}};

// Uniform doubles straight from the engine bits, so generated files do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  int Index(int n) {
    return std::min(n - 1, static_cast<int>(Uniform() * n));
  }
  bool Chance(double p) { return Uniform() < p; }
  double Sign() { return Chance(0.5) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
};

double Round(double x) { return std::round(x * 1e4) / 1e4; }
Point2 Round(Point2 p) { return {Round(p.x), Round(p.y)}; }

std::vector<Point2> Line(Point2 a, Point2 b) { return {a, b}; }

// Circular arc starting at `start` with heading `heading`; positive sweep
// turns left.
std::vector<Point2> Arc(Point2 start, double heading, double radius,
                        double sweep, int pieces = 8) {
  const double sgn = sweep >= 0.0 ? 1.0 : -1.0;
  const Point2 center =
      start + sgn * radius * Point2{-std::sin(heading), std::cos(heading)};
  const double a0 = heading - sgn * kPi / 2;
  std::vector<Point2> pts{start};
  for (int j = 1; j <= pieces; ++j) {
    const double a = a0 + sweep * j / pieces;
    pts.push_back(center + radius * Point2{std::cos(a), std::sin(a)});
  }
  return pts;
}

std::vector<Point2> Offset(const std::vector<Point2>& pts, double offset) {
  std::vector<Point2> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Point2 dir{};
    if (i > 0) dir = dir + (1.0 / Distance(pts[i], pts[i - 1])) * (pts[i] - pts[i - 1]);
    if (i + 1 < pts.size()) {
      dir = dir + (1.0 / Distance(pts[i + 1], pts[i])) * (pts[i + 1] - pts[i]);
    }
    dir = (1.0 / Norm(dir)) * dir;
    out[i] = pts[i] + offset * Point2{-dir.y, dir.x};
  }
  return out;
}

struct MapLayout {
  std::vector<RawLaneSegment> lanes;
  std::vector<std::vector<std::size_t>> routes;
};

class MapBuilder {
 public:
  explicit MapBuilder(const TopologyTemplate& tmpl) : tmpl_(tmpl) {}

  std::size_t Add(std::vector<Point2> centerline) {
    RawLaneSegment lane;
    lane.id = "lane_" + std::to_string(layout_.lanes.size());
    for (auto& p : centerline) p = Round(p);
    if (tmpl_.explicit_boundaries) {
      lane.left_boundary = Offset(centerline, tmpl_.lane_spacing / 2);
      lane.right_boundary = Offset(centerline, -tmpl_.lane_spacing / 2);
      for (auto& p : *lane.left_boundary) p = Round(p);
      for (auto& p : *lane.right_boundary) p = Round(p);
    }
    lane.centerline = std::move(centerline);
    layout_.lanes.push_back(std::move(lane));
    return layout_.lanes.size() - 1;
  }

  void Link(std::size_t from, std::size_t to) {
    layout_.lanes[from].successors.push_back(layout_.lanes[to].id);
    layout_.lanes[to].predecessors.push_back(layout_.lanes[from].id);
  }

  void Route(std::vector<std::size_t> lanes) {
    layout_.routes.push_back(std::move(lanes));
  }

  MapLayout Take() { return std::move(layout_); }

 private:
  const TopologyTemplate& tmpl_;
  MapLayout layout_;
};

MapLayout BuildLayout(const TopologyTemplate& tmpl, double len) {
  MapBuilder b(tmpl);
  const int n = std::max(1, tmpl.segment_count);
  const double w = tmpl.lane_spacing;
  switch (tmpl.kind) {
    case TopologyKind::kStraight: {
      std::vector<std::size_t> route;
      for (int i = 0; i < n; ++i) {
        route.push_back(b.Add(Line({i * len, 0.0}, {(i + 1) * len, 0.0})));
        if (i > 0) b.Link(route[i - 1], route[i]);
      }
      b.Route(route);
      break;
    }
    case TopologyKind::kChain: {
      // Gentle S-curves with alternating turn direction.
      const double radius = 4.0 * len;
      Point2 pos{};
      double heading = 0.0;
      std::vector<std::size_t> route;
      for (int i = 0; i < n; ++i) {
        const double sweep = (i % 2 == 0 ? 1.0 : -1.0) * len / radius;
        auto pts = Arc(pos, heading, radius, sweep);
        pos = Round(pts.back());
        heading += sweep;
        route.push_back(b.Add(std::move(pts)));
        if (i > 0) b.Link(route[i - 1], route[i]);
      }
      b.Route(route);
      break;
    }
    case TopologyKind::kParallelOpposing: {
      std::vector<std::size_t> forward;
      std::vector<std::size_t> opposing;
      for (int i = 0; i < n; ++i) {
        forward.push_back(b.Add(Line({i * len, 0.0}, {(i + 1) * len, 0.0})));
        if (i > 0) b.Link(forward[i - 1], forward[i]);
      }
      for (int i = 0; i < n; ++i) {
        opposing.push_back(
            b.Add(Line({(n - i) * len, w}, {(n - i - 1) * len, w})));
        if (i > 0) b.Link(opposing[i - 1], opposing[i]);
      }
      b.Route(forward);
      break;
    }
    case TopologyKind::kFork: {
      const std::size_t a = b.Add(Line({0.0, 0.0}, {len, 0.0}));
      const std::size_t straight = b.Add(Line({len, 0.0}, {3 * len, 0.0}));
      const std::size_t left = b.Add(Arc({len, 0.0}, 0.0, 2.5 * len, 0.8));
      b.Link(a, straight);
      b.Link(a, left);
      b.Route({a, straight});
      b.Route({a, left});
      break;
    }
    case TopologyKind::kMerge: {
      const std::size_t main = b.Add(Line({0.0, 0.0}, {len, 0.0}));
      // Ramp joining from the right: built backwards from the merge point.
      auto ramp = Arc({len, 0.0}, kPi, 2.5 * len, 0.8);
      std::reverse(ramp.begin(), ramp.end());
      const std::size_t side = b.Add(std::move(ramp));
      const std::size_t out = b.Add(Line({len, 0.0}, {3 * len, 0.0}));
      b.Link(main, out);
      b.Link(side, out);
      b.Route({main, out});
      b.Route({side, out});
      break;
    }
    case TopologyKind::kDiamond: {
      const std::size_t a = b.Add(Line({0.0, 0.0}, {len, 0.0}));
      const std::size_t direct = b.Add(Line({len, 0.0}, {2 * len, 0.0}));
      const std::size_t detour = b.Add({{len, 0.0},
                                        {1.25 * len, 1.5 * w},
                                        {1.75 * len, 1.5 * w},
                                        {2 * len, 0.0}});
      const std::size_t d = b.Add(Line({2 * len, 0.0}, {4 * len, 0.0}));
      b.Link(a, direct);
      b.Link(a, detour);
      b.Link(direct, d);
      b.Link(detour, d);
      b.Route({a, direct, d});
      b.Route({a, detour, d});
      break;
    }
    case TopologyKind::kRoundabout: {
      const int pieces = std::max(3, n);
      const double radius = pieces * len / (2 * kPi);
      const double step = 2 * kPi / pieces;
      const Point2 center{0.0, radius};
      std::vector<std::size_t> ring;
      for (int i = 0; i < pieces; ++i) {
        std::vector<Point2> pts;
        for (int j = 0; j <= 8; ++j) {
          const double a = -kPi / 2 + step * (8 * i + j) / 8.0;
          pts.push_back(center + radius * Point2{std::cos(a), std::sin(a)});
        }
        ring.push_back(b.Add(std::move(pts)));
      }
      for (int i = 0; i < pieces; ++i) b.Link(ring[i], ring[(i + 1) % pieces]);
      // Two laps are always enough for the horizons used here; the caller
      // extends further when needed.
      std::vector<std::size_t> route = ring;
      route.insert(route.end(), ring.begin(), ring.end());
      b.Route(route);
      break;
    }
  }
  return b.Take();
}

Polyline RoutePolyline(const MapLayout& layout,
                       const std::vector<std::size_t>& route) {
  std::vector<Point2> pts;
  for (std::size_t lane : route) {
    for (const Point2& p : layout.lanes[lane].centerline) {
      if (!pts.empty() && Distance(pts.back(), p) < 1e-6) continue;
      pts.push_back(p);
    }
  }
  return Polyline(std::move(pts));
}

Point2 LeftNormal(const Polyline& route, double s) {
  const double h = HeadingOnPolylineAt(route, std::clamp(s, 0.0, route.length()));
  return {-std::sin(h), std::cos(h)};
}

Point2 Sample(const Polyline& route, double s, double lateral) {
  return Round(route.PointAt(s) + lateral * LeftNormal(route, s));
}

std::vector<ModePlacement> RandomModes(Rng& rng, int count,
                                       double lane_spacing) {
  std::vector<ModePlacement> modes(static_cast<std::size_t>(std::max(1, count)));
  for (auto& m : modes) {
    const double r = rng.Uniform();
    if (r < 0.40) {
      m.longitudinal_offset = rng.Uniform(-4.0, 4.0);
      m.lateral_offset = rng.Uniform(-1.0, 1.0);
    } else if (r < 0.65) {
      m.longitudinal_offset = rng.Uniform(-15.0, 15.0);
      m.lateral_offset = rng.Uniform(-0.5, 0.5);
    } else if (r < 0.85) {
      m.longitudinal_offset = rng.Uniform(-3.0, 3.0);
      m.lateral_offset = rng.Sign() * rng.Uniform(0.7, 1.3) * lane_spacing;
    } else {
      m.longitudinal_offset = rng.Uniform(-5.0, 5.0);
      m.lateral_offset = rng.Sign() * rng.Uniform(6.0, 12.0);
    }
  }
  if (rng.Chance(0.8)) {
    double total = 0.0;
    std::vector<double> weights;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      weights.push_back(rng.Uniform(0.05, 1.0));
      total += weights.back();
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
      modes[i].probability = std::floor(weights[i] / total * 1e6) / 1e6;
    }
  }
  return modes;
}

}  // namespace

std::string_view TopologyKindName(TopologyKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

TopologyKind ParseTopologyKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw ValidationError("unknown topology template '" + std::string(name) + "'");
}

GeneratedScenario GenerateScenario(const TopologyTemplate& tmpl,
                                   std::uint64_t seed) {
  if (tmpl.horizon < 2) throw ValidationError("horizon must be >= 2");
  if (!(tmpl.dt > 0.0)) throw ValidationError("dt must be > 0");
  if (!(tmpl.segment_length > 0.0)) {
    throw ValidationError("segment_length must be > 0");
  }

  Rng rng(seed);
  const std::vector<ModePlacement> placements =
      tmpl.modes.empty() ? RandomModes(rng, tmpl.random_modes, tmpl.lane_spacing)
                         : tmpl.modes;

  double max_ahead = 0.0;
  for (const auto& m : placements) {
    max_ahead = std::max(max_ahead, m.longitudinal_offset);
  }
  const double travel = tmpl.speed * tmpl.dt * (tmpl.horizon - 1);
  const double needed = tmpl.start_s + travel + max_ahead + 1.0;

  // Lengthen segments until the chosen route covers the whole horizon.
  double len = tmpl.segment_length;
  MapLayout layout;
  std::size_t route_index = 0;
  for (int attempt = 0;; ++attempt) {
    layout = BuildLayout(tmpl, len);
    route_index = tmpl.route_choice >= 0
                      ? static_cast<std::size_t>(tmpl.route_choice) %
                            layout.routes.size()
                      : static_cast<std::size_t>(
                            rng.Index(static_cast<int>(layout.routes.size())));
    const double have =
        RoutePolyline(layout, layout.routes[route_index]).length();
    if (have >= needed || attempt == 8) break;
    len *= 1.05 * needed / have;
  }
  const Polyline route = RoutePolyline(layout, layout.routes[route_index]);

  GeneratedScenario out;
  ScenarioFile& sc = out.scenario;
  sc.sequence_id = tmpl.sequence_id.empty()
                       ? std::string(TopologyKindName(tmpl.kind)) + "_" +
                             std::to_string(seed)
                       : tmpl.sequence_id;
  sc.focal_agent_class = tmpl.focal_agent_class;
  sc.dt = tmpl.dt;
  const int last = tmpl.horizon - 1;
  for (int t = 0; t <= last; ++t) {
    const double frac = static_cast<double>(t) / last;
    const double s = tmpl.start_s + tmpl.speed * tmpl.dt * t;
    sc.ground_truth_future.push_back(
        Sample(route, s, frac * tmpl.gt_lateral_offset));
  }
  sc.lane_graph = std::move(layout.lanes);

  PredictionFile& pf = out.predictions;
  pf.sequence_id = sc.sequence_id;
  bool all_probabilities = true;
  for (const auto& m : placements) {
    all_probabilities = all_probabilities && m.probability.has_value();
    std::vector<Point2> mode;
    for (int t = 0; t <= last; ++t) {
      const double frac = static_cast<double>(t) / last;
      const double s = tmpl.start_s + tmpl.speed * tmpl.dt * t +
                       frac * m.longitudinal_offset;
      mode.push_back(Sample(
          route, s, frac * (tmpl.gt_lateral_offset + m.lateral_offset)));
    }
    pf.modes.push_back(std::move(mode));
  }
  if (all_probabilities) {
    pf.probabilities.emplace();
    for (const auto& m : placements) pf.probabilities->push_back(*m.probability);
  }
  return out;
}

TopologyTemplate RandomTemplate(std::uint64_t seed) {
  // Separate stream from the one GenerateScenario uses with the same seed.
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  TopologyTemplate t;
  t.kind = kKindNames[static_cast<std::size_t>(rng.Index(7))].first;
  t.segment_length = rng.Uniform(15.0, 40.0);
  t.segment_count = t.kind == TopologyKind::kRoundabout ? 4 + rng.Index(5)
                                                        : 2 + rng.Index(4);
  t.lane_spacing = rng.Uniform(3.0, 4.0);
  t.explicit_boundaries = rng.Chance(0.7);
  t.speed = rng.Chance(0.05) ? 0.0 : rng.Uniform(1.0, 20.0);
  t.start_s = rng.Uniform(1.0, 10.0);
  t.gt_lateral_offset = rng.Chance(0.04) ? rng.Sign() * rng.Uniform(6.0, 10.0)
                                         : rng.Uniform(-0.6, 0.6);
  return t;
}

std::vector<GeneratedScenario> GenerateRandomDataset(std::size_t count,
                                                     std::uint64_t seed,
                                                     int modes) {
  std::vector<GeneratedScenario> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t s = seed * count + i;
    TopologyTemplate t = RandomTemplate(s);
    t.random_modes = modes;
    t.sequence_id = "seq_" + std::to_string(seed) + "_" + std::to_string(i);
    out.push_back(GenerateScenario(t, s));
  }
  return out;
}

std::vector<GoldenCase> GoldenCases() {
  std::vector<GoldenCase> cases;

  {
    GoldenCase c{.name = "straight_perfect", .tmpl = {}, .seed = 1};
    c.tmpl.kind = TopologyKind::kStraight;
    c.tmpl.modes = {{.longitudinal_offset = 0.0, .lateral_offset = 0.0,
                     .probability = 1.0}};
    cases.push_back(c);
  }
  {
    // Ground truth near the left edge of its lane; the prediction ends 1.5 m
    // further left, on the disconnected opposing lane.
    GoldenCase c{.name = "opposing_lane_lateral", .tmpl = {}, .seed = 2};
    c.tmpl.kind = TopologyKind::kParallelOpposing;
    c.tmpl.gt_lateral_offset = 1.0;
    c.tmpl.modes = {{.longitudinal_offset = 0.0, .lateral_offset = 1.5,
                     .probability = std::nullopt}};
    cases.push_back(c);
  }
  {
    // 15 m/s gives a 3.7 m lane threshold; the prediction is 3 m ahead on the
    // same lane, across a segment boundary.
    GoldenCase c{.name = "correct_lane_far_ahead", .tmpl = {}, .seed = 3};
    c.tmpl.kind = TopologyKind::kStraight;
    c.tmpl.segment_count = 4;
    c.tmpl.segment_length = 32.0;
    c.tmpl.speed = 15.0;
    c.tmpl.modes = {{.longitudinal_offset = 3.0, .lateral_offset = 0.0,
                     .probability = std::nullopt}};
    cases.push_back(c);
  }
  {
    GoldenCase c{.name = "ground_truth_off_road", .tmpl = {}, .seed = 4};
    c.tmpl.kind = TopologyKind::kStraight;
    c.tmpl.speed = 5.0;
    c.tmpl.gt_lateral_offset = 8.0;
    c.tmpl.modes = {{.longitudinal_offset = 0.0, .lateral_offset = -1.0,
                     .probability = 0.7},
                    {.longitudinal_offset = 5.0, .lateral_offset = 0.0,
                     .probability = 0.3}};
    cases.push_back(c);
  }
  {
    GoldenCase c{.name = "prediction_off_road", .tmpl = {}, .seed = 5};
    c.tmpl.kind = TopologyKind::kStraight;
    c.tmpl.gt_lateral_offset = 1.5;
    c.tmpl.modes = {{.longitudinal_offset = 0.0, .lateral_offset = 0.5,
                     .probability = 0.6},
                    {.longitudinal_offset = 0.0, .lateral_offset = 0.0,
                     .probability = 0.4}};
    cases.push_back(c);
  }
  {
    // Ground truth ends 1 m into a roundabout segment; the prediction trails
    // by 1.8 m on the previous segment.
    GoldenCase c{.name = "roundabout_behind", .tmpl = {}, .seed = 6};
    c.tmpl.kind = TopologyKind::kRoundabout;
    c.tmpl.segment_count = 6;
    c.tmpl.segment_length = 20.0;
    c.tmpl.speed = 8.0;
    c.tmpl.start_s = 13.0;
    c.tmpl.modes = {{.longitudinal_offset = -1.8, .lateral_offset = 0.0,
                     .probability = std::nullopt}};
    cases.push_back(c);
  }
  for (auto& c : cases) c.tmpl.sequence_id = c.name;
  return cases;
}

void WriteScenarioFiles(const GeneratedScenario& generated,
                        const std::filesystem::path& dataset_dir,
                        const std::filesystem::path& predictions_dir) {
  std::filesystem::create_directories(dataset_dir);
  std::filesystem::create_directories(predictions_dir);
  const std::string& id = generated.scenario.sequence_id;
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
  };
  write(dataset_dir / (id + std::string(kScenarioSuffix)),
        WriteScenario(generated.scenario));
  write(predictions_dir / (id + std::string(kPredictionSuffix)),
        WritePredictions(generated.predictions));
}

}  // namespace lmr
