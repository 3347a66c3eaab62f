// Threshold-bounded distance along the lane graph.
//
// A path follows successor links only or predecessor links only. Distances:
//   same segment:  |s_to - s_from|
//   forward:       (len(from) - s_from) + sum(len(intermediate)) + s_to
//   backward:      s_from + sum(len(intermediate)) + (len(to) - s_to)

#ifndef LMR_LANE_DISTANCE_H_
#define LMR_LANE_DISTANCE_H_

#include <optional>
#include <span>
#include <string>

#include "lmr/lane_graph.h"

namespace lmr {

struct LanePoint {
  std::string segment_id;
  double s = 0.0;
};

struct ReachResult {
  bool reached = false;
  std::optional<double> distance;  // present iff reached; < threshold
};

// Whether any point of `to_set` lies strictly closer than `threshold` to
// `from` along a monotone path. Throws UnknownSegmentError for ids missing
// from the graph and ValidationError for s outside a segment or
// threshold <= 0.
ReachResult WithinLaneDistance(const LaneGraph& graph, const LanePoint& from,
                               std::span<const LanePoint> to_set,
                               double threshold);

// Index-based variant used on the hot path; inputs are trusted.
struct IndexedLanePoint {
  SegmentIndex segment = 0;
  double s = 0.0;
};

ReachResult WithinLaneDistance(const LaneGraph& graph,
                               const IndexedLanePoint& from,
                               std::span<const IndexedLanePoint> to_set,
                               double threshold);

}  // namespace lmr

#endif  // LMR_LANE_DISTANCE_H_
