// Lane graph data model: lane segments with centerlines, optional
// boundaries, and successor/predecessor adjacency.

#ifndef LMR_LANE_GRAPH_H_
#define LMR_LANE_GRAPH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lmr/geometry.h"

namespace lmr {

// Dense index of a segment inside one LaneGraph.
using SegmentIndex = std::uint32_t;

// Map record as it comes out of a file, before validation.
struct RawLaneSegment {
  std::string id;
  std::vector<Point2> centerline;
  std::optional<std::vector<Point2>> left_boundary;
  std::optional<std::vector<Point2>> right_boundary;
  std::vector<std::string> successors;
  std::vector<std::string> predecessors;

  friend bool operator==(const RawLaneSegment&,
                         const RawLaneSegment&) = default;
};

struct LaneSegment {
  std::string id;
  Polyline centerline;
  std::optional<Polyline> left_boundary;
  std::optional<Polyline> right_boundary;
  std::vector<std::string> successors;
  std::vector<std::string> predecessors;

  double length() const { return centerline.length(); }
  bool has_boundaries() const { return left_boundary.has_value(); }
};

// Immutable after construction. Adjacency is symmetric:
// b in successors(a) iff a in predecessors(b).
class LaneGraph {
 public:
  std::size_t size() const { return segments_.size(); }
  const std::vector<LaneSegment>& segments() const { return segments_; }
  const LaneSegment& segment(SegmentIndex i) const { return segments_[i]; }

  std::optional<SegmentIndex> Find(std::string_view id) const;
  // Throws UnknownSegmentError.
  SegmentIndex IndexOf(std::string_view id) const;

  std::span<const SegmentIndex> successors(SegmentIndex i) const {
    return successor_index_[i];
  }
  std::span<const SegmentIndex> predecessors(SegmentIndex i) const {
    return predecessor_index_[i];
  }

  // Number of adjacency entries dropped during build (dangling ids,
  // self-links, duplicates).
  int repaired_link_count() const { return repaired_links_; }

 private:
  friend LaneGraph BuildLaneGraph(std::span<const RawLaneSegment> raw);

  std::vector<LaneSegment> segments_;
  std::unordered_map<std::string, SegmentIndex> by_id_;
  std::vector<std::vector<SegmentIndex>> successor_index_;
  std::vector<std::vector<SegmentIndex>> predecessor_index_;
  int repaired_links_ = 0;
};

// Validates and repairs a raw map. Throws ValidationError for an empty map,
// duplicate ids, malformed centerlines or boundaries (message names the id).
LaneGraph BuildLaneGraph(std::span<const RawLaneSegment> raw);

inline constexpr double kDefaultHalfWidth = 2.0;

struct LanePolygon {
  std::string segment_id;
  std::vector<Point2> ring;
};

// Left boundary followed by the reversed right boundary, or the centerline
// buffered by `half_width` on both sides when boundaries are absent.
LanePolygon MakeLanePolygon(const LaneSegment& segment,
                            double half_width = kDefaultHalfWidth);

}  // namespace lmr

#endif  // LMR_LANE_GRAPH_H_
