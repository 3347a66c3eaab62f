// Binding of trajectory endpoints to lane centerlines with a confidence
// that combines lateral distance and heading agreement.

#ifndef LMR_ASSIGNMENT_H_
#define LMR_ASSIGNMENT_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmr/geometry.h"
#include "lmr/lane_graph.h"
#include "lmr/spatial_index.h"

namespace lmr {

struct AssignmentConfig {
  double c_dist = 5.0;       // meters at which distance confidence reaches 0
  double c_orient = kPi;     // radians at which heading confidence reaches 0
  double w = 0.5;            // weight of distance vs. heading confidence
  double margin = 0.1;       // prediction assignments kept within max(p) - margin
  double epsilon_heading = kDefaultHeadingEpsilon;
  double half_width = kDefaultHalfWidth;  // polygon fallback without boundaries
  // Candidate query radius around the endpoint; negative means
  // half_width + 1.0.
  double query_inflate = -1.0;

  double EffectiveQueryInflate() const {
    return query_inflate >= 0.0 ? query_inflate : half_width + 1.0;
  }
  // Throws ValidationError when a constant is out of range.
  void Validate() const;
};

struct LaneAssignment {
  SegmentIndex segment = 0;
  std::string segment_id;
  double s = 0.0;
  double p = 0.0;
  double d = 0.0;
  // Absent when the trajectory has no heading (stationary).
  std::optional<double> delta_alpha;
};

// max(0, 1 - d / c_dist)
double DistanceConfidence(double d, double c_dist);
// max(0, 1 - delta_alpha / c_orient)
double OrientationConfidence(double delta_alpha, double c_orient);
// w * p_d + (1 - w) * p_alpha
double CombinedConfidence(double p_d, double p_alpha, double w);

// One assignment per segment whose lane polygon contains the trajectory's
// last point, sorted by p descending and then by segment id ascending.
std::vector<LaneAssignment> GetLaneAssignments(
    std::span<const Point2> trajectory, const LaneGraph& graph,
    const CenterlineIndex& index, const AssignmentConfig& config);

// Highest-confidence assignment, or empty when nothing was assigned.
std::optional<LaneAssignment> SelectGroundTruthAssignment(
    std::span<const LaneAssignment> assignments);

// Every assignment with p >= max(p) - margin.
std::vector<LaneAssignment> SelectPredictionAssignments(
    std::span<const LaneAssignment> assignments,
    const AssignmentConfig& config);

}  // namespace lmr

#endif  // LMR_ASSIGNMENT_H_
