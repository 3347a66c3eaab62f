#include "lmr/assignment.h"

#include <algorithm>

namespace lmr {

void AssignmentConfig::Validate() const {
  if (!(c_dist > 0.0)) throw ValidationError("c_dist must be > 0");
  if (!(c_orient > 0.0)) throw ValidationError("c_orient must be > 0");
  if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("w must be in [0, 1]");
  if (!(margin >= 0.0)) throw ValidationError("margin must be >= 0");
  if (!(epsilon_heading > 0.0)) {
    throw ValidationError("epsilon_heading must be > 0");
  }
  if (!(half_width > 0.0)) throw ValidationError("half_width must be > 0");
}

double DistanceConfidence(double d, double c_dist) {
  return std::max(0.0, 1.0 - d / c_dist);
}

double OrientationConfidence(double delta_alpha, double c_orient) {
  return std::max(0.0, 1.0 - delta_alpha / c_orient);
}

double CombinedConfidence(double p_d, double p_alpha, double w) {
  return w * p_d + (1.0 - w) * p_alpha;
}

std::vector<LaneAssignment> GetLaneAssignments(
    std::span<const Point2> trajectory, const LaneGraph& graph,
    const CenterlineIndex& index, const AssignmentConfig& config) {
  std::vector<LaneAssignment> out;
  if (trajectory.empty()) return out;
  const Point2 endpoint = trajectory.back();
  const std::optional<double> heading =
      HeadingAtEnd(trajectory, config.epsilon_heading);

  for (SegmentIndex i :
       index.QueryCandidates(endpoint, config.EffectiveQueryInflate())) {
    const LaneSegment& seg = graph.segment(i);
    const LanePolygon polygon = MakeLanePolygon(seg, config.half_width);
    if (!PointInPolygon(endpoint, polygon.ring)) continue;

    const ArcProjection proj = ProjectOntoPolyline(endpoint, seg.centerline);
    LaneAssignment a{.segment = i,
                     .segment_id = seg.id,
                     .s = proj.s,
                     .p = 0.0,
                     .d = proj.d,
                     .delta_alpha = std::nullopt};
    const double p_d = DistanceConfidence(proj.d, config.c_dist);
    if (heading) {
      a.delta_alpha =
          WrappedAngleDiff(*heading, HeadingOnPolylineAt(seg.centerline, a.s));
      const double p_alpha =
          OrientationConfidence(*a.delta_alpha, config.c_orient);
      a.p = CombinedConfidence(p_d, p_alpha, config.w);
    } else {
      a.p = p_d;
    }
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(),
            [](const LaneAssignment& a, const LaneAssignment& b) {
              if (a.p != b.p) return a.p > b.p;
              return a.segment_id < b.segment_id;
            });
  return out;
}

std::optional<LaneAssignment> SelectGroundTruthAssignment(
    std::span<const LaneAssignment> assignments) {
  const auto best = std::min_element(
      assignments.begin(), assignments.end(),
      [](const LaneAssignment& a, const LaneAssignment& b) {
        if (a.p != b.p) return a.p > b.p;
        return a.segment_id < b.segment_id;
      });
  if (best == assignments.end()) return std::nullopt;
  return *best;
}

std::vector<LaneAssignment> SelectPredictionAssignments(
    std::span<const LaneAssignment> assignments,
    const AssignmentConfig& config) {
  std::vector<LaneAssignment> out;
  if (assignments.empty()) return out;
  double best = assignments.front().p;
  for (const auto& a : assignments) best = std::max(best, a.p);
  for (const auto& a : assignments) {
    if (a.p >= best - config.margin) out.push_back(a);
  }
  return out;
}

}  // namespace lmr
