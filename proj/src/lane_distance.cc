#include "lmr/lane_distance.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace lmr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArcTolerance = 1e-9;

enum class Direction { kForward, kBackward };

// Best-first expansion along one link direction. Each segment is expanded
// again only when entered with a strictly smaller accumulated distance, which
// also makes loops safe. Entries at or beyond the threshold are pruned.
double SearchDirection(const LaneGraph& graph, const IndexedLanePoint& from,
                       std::span<const IndexedLanePoint> targets,
                       double threshold, Direction dir, double best) {
  const bool forward = dir == Direction::kForward;
  auto neighbors = [&](SegmentIndex i) {
    return forward ? graph.successors(i) : graph.predecessors(i);
  };

  using Entry = std::pair<double, SegmentIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<double> entry(graph.size(), kInf);

  const double first = forward
                           ? graph.segment(from.segment).length() - from.s
                           : from.s;
  for (SegmentIndex next : neighbors(from.segment)) {
    if (first < threshold && first < entry[next]) {
      entry[next] = first;
      open.emplace(first, next);
    }
  }

  while (!open.empty()) {
    const auto [dist, seg] = open.top();
    open.pop();
    if (dist > entry[seg]) continue;
    // Nothing below can improve on a distance already found.
    if (dist >= best) break;
    const double len = graph.segment(seg).length();
    for (const IndexedLanePoint& t : targets) {
      if (t.segment != seg) continue;
      const double total = dist + (forward ? t.s : len - t.s);
      if (total < best) best = total;
    }
    const double through = dist + len;
    if (through >= threshold) continue;
    for (SegmentIndex next : neighbors(seg)) {
      if (through < entry[next]) {
        entry[next] = through;
        open.emplace(through, next);
      }
    }
  }
  return best;
}

void CheckArc(const LaneGraph& graph, SegmentIndex seg, double s) {
  const double len = graph.segment(seg).length();
  if (!(s >= 0.0 && s <= len + kArcTolerance)) {
    throw ValidationError("arc-length " + std::to_string(s) +
                          " outside lane segment '" + graph.segment(seg).id +
                          "'");
  }
}

}  // namespace

ReachResult WithinLaneDistance(const LaneGraph& graph,
                               const IndexedLanePoint& from,
                               std::span<const IndexedLanePoint> to_set,
                               double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("threshold must be > 0");

  double best = kInf;
  for (const IndexedLanePoint& t : to_set) {
    if (t.segment == from.segment) best = std::min(best, std::abs(t.s - from.s));
  }
  best = SearchDirection(graph, from, to_set, threshold, Direction::kForward,
                         best);
  best = SearchDirection(graph, from, to_set, threshold, Direction::kBackward,
                         best);

  ReachResult result;
  if (best < threshold) {
    result.reached = true;
    result.distance = best;
  }
  return result;
}

ReachResult WithinLaneDistance(const LaneGraph& graph, const LanePoint& from,
                               std::span<const LanePoint> to_set,
                               double threshold) {
  const IndexedLanePoint start{graph.IndexOf(from.segment_id), from.s};
  CheckArc(graph, start.segment, start.s);
  std::vector<IndexedLanePoint> targets;
  targets.reserve(to_set.size());
  for (const LanePoint& p : to_set) {
    targets.push_back({graph.IndexOf(p.segment_id), p.s});
    CheckArc(graph, targets.back().segment, p.s);
  }
  return WithinLaneDistance(graph, start, targets, threshold);
}

}  // namespace lmr
