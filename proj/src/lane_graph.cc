#include "lmr/lane_graph.h"

#include <algorithm>

namespace lmr {

std::optional<SegmentIndex> LaneGraph::Find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

SegmentIndex LaneGraph::IndexOf(std::string_view id) const {
  if (const auto found = Find(id)) return *found;
  throw UnknownSegmentError(std::string(id));
}

namespace {

Polyline MakeSegmentPolyline(const std::string& id, const char* what,
                             const std::vector<Point2>& points) {
  try {
    return Polyline(points);
  } catch (const ValidationError& e) {
    throw ValidationError("lane segment '" + id + "' " + what + ": " +
                          e.what());
  }
}

// Appends `to` to `list` unless it is a duplicate; returns false when skipped.
bool AddUnique(std::vector<SegmentIndex>& list, SegmentIndex to) {
  if (std::find(list.begin(), list.end(), to) != list.end()) return false;
  list.push_back(to);
  return true;
}

}  // namespace

LaneGraph BuildLaneGraph(std::span<const RawLaneSegment> raw) {
  if (raw.empty()) throw ValidationError("empty lane graph");

  LaneGraph graph;
  graph.segments_.reserve(raw.size());
  for (const RawLaneSegment& r : raw) {
    if (r.id.empty()) throw ValidationError("lane segment with empty id");
    if (r.centerline.size() < 2) {
      throw ValidationError("lane segment '" + r.id +
                            "' centerline needs at least 2 points");
    }
    if (r.left_boundary.has_value() != r.right_boundary.has_value()) {
      throw ValidationError("lane segment '" + r.id +
                            "' must have both boundaries or neither");
    }
    const auto index = static_cast<SegmentIndex>(graph.segments_.size());
    if (!graph.by_id_.emplace(r.id, index).second) {
      throw ValidationError("duplicate lane segment id '" + r.id + "'");
    }
    LaneSegment seg{
        .id = r.id,
        .centerline = MakeSegmentPolyline(r.id, "centerline", r.centerline),
        .left_boundary = std::nullopt,
        .right_boundary = std::nullopt,
        .successors = {},
        .predecessors = {},
    };
    if (r.left_boundary) {
      seg.left_boundary =
          MakeSegmentPolyline(r.id, "left boundary", *r.left_boundary);
      seg.right_boundary =
          MakeSegmentPolyline(r.id, "right boundary", *r.right_boundary);
    }
    graph.segments_.push_back(std::move(seg));
  }

  const std::size_t n = raw.size();
  graph.successor_index_.assign(n, {});
  graph.predecessor_index_.assign(n, {});
  auto resolve = [&](SegmentIndex self,
                     const std::string& id) -> std::optional<SegmentIndex> {
    const auto found = graph.Find(id);
    if (!found || *found == self) {
      ++graph.repaired_links_;
      return std::nullopt;
    }
    return found;
  };
  for (SegmentIndex a = 0; a < n; ++a) {
    for (const std::string& id : raw[a].successors) {
      if (const auto b = resolve(a, id)) {
        if (!AddUnique(graph.successor_index_[a], *b)) ++graph.repaired_links_;
      }
    }
    for (const std::string& id : raw[a].predecessors) {
      if (const auto b = resolve(a, id)) {
        if (!AddUnique(graph.predecessor_index_[a], *b)) {
          ++graph.repaired_links_;
        }
      }
    }
  }
  // Symmetrize: a link stated on either side exists on both.
  for (SegmentIndex a = 0; a < n; ++a) {
    for (SegmentIndex b : graph.successor_index_[a]) {
      AddUnique(graph.predecessor_index_[b], a);
    }
    for (SegmentIndex b : graph.predecessor_index_[a]) {
      AddUnique(graph.successor_index_[b], a);
    }
  }
  for (SegmentIndex a = 0; a < n; ++a) {
    auto& seg = graph.segments_[a];
    for (SegmentIndex b : graph.successor_index_[a]) {
      seg.successors.push_back(graph.segments_[b].id);
    }
    for (SegmentIndex b : graph.predecessor_index_[a]) {
      seg.predecessors.push_back(graph.segments_[b].id);
    }
  }
  return graph;
}

namespace {

Point2 UnitOrZero(Point2 v) {
  const double n = Norm(v);
  return n > 0.0 ? (1.0 / n) * v : Point2{};
}

}  // namespace

LanePolygon MakeLanePolygon(const LaneSegment& segment, double half_width) {
  LanePolygon polygon{.segment_id = segment.id, .ring = {}};
  if (segment.has_boundaries()) {
    const auto& left = segment.left_boundary->points();
    const auto& right = segment.right_boundary->points();
    polygon.ring.reserve(left.size() + right.size());
    polygon.ring.insert(polygon.ring.end(), left.begin(), left.end());
    polygon.ring.insert(polygon.ring.end(), right.rbegin(), right.rend());
    return polygon;
  }

  const auto& pts = segment.centerline.points();
  const std::size_t n = pts.size();
  std::vector<Point2> left(n);
  std::vector<Point2> right(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 incoming = i > 0 ? UnitOrZero(pts[i] - pts[i - 1]) : Point2{};
    const Point2 outgoing =
        i + 1 < n ? UnitOrZero(pts[i + 1] - pts[i]) : Point2{};
    Point2 dir = UnitOrZero(incoming + outgoing);
    if (dir == Point2{}) dir = i + 1 < n ? outgoing : incoming;
    const Point2 normal{-dir.y, dir.x};
    left[i] = pts[i] + half_width * normal;
    right[i] = pts[i] - half_width * normal;
  }
  polygon.ring = std::move(left);
  polygon.ring.insert(polygon.ring.end(), right.rbegin(), right.rend());
  return polygon;
}

}  // namespace lmr
