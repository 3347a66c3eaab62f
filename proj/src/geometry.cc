#include "lmr/geometry.h"

#include <algorithm>
#include <limits>
#include <string>

namespace lmr {

Polyline::Polyline(std::vector<Point2> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw ValidationError("polyline needs at least 2 points, got " +
                          std::to_string(points_.size()));
  }
  cumulative_.reserve(points_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!IsFinite(points_[i])) {
      throw ValidationError("polyline point " + std::to_string(i) +
                            " is not finite");
    }
    if (i == 0) continue;
    const double step = Distance(points_[i - 1], points_[i]);
    if (step < kDuplicatePointTolerance) {
      throw ValidationError("polyline points " + std::to_string(i - 1) +
                            " and " + std::to_string(i) + " coincide");
    }
    cumulative_.push_back(cumulative_.back() + step);
  }
}

std::size_t Polyline::SegmentAt(double s) const {
  const auto it =
      std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const auto index = static_cast<std::ptrdiff_t>(it - cumulative_.begin()) - 1;
  const auto last = static_cast<std::ptrdiff_t>(points_.size()) - 2;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(index, 0, last));
}

Point2 Polyline::PointAt(double s) const {
  s = std::clamp(s, 0.0, length());
  const std::size_t i = SegmentAt(s);
  const double seg_len = cumulative_[i + 1] - cumulative_[i];
  const double t = std::clamp((s - cumulative_[i]) / seg_len, 0.0, 1.0);
  return points_[i] + t * (points_[i + 1] - points_[i]);
}

ArcProjection ProjectOntoPolyline(Point2 query, const Polyline& line) {
  const auto& pts = line.points();
  const auto& cum = line.cumulative_arclength();
  ArcProjection best;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Point2 a = pts[i];
    const Point2 ab = pts[i + 1] - a;
    const double t =
        std::clamp(Dot(query - a, ab) / Dot(ab, ab), 0.0, 1.0);
    const Point2 foot = a + t * ab;
    const Point2 diff = query - foot;
    const double sq = Dot(diff, diff);
    // Strict comparison keeps the earliest (smallest s) segment on ties.
    if (sq < best_sq) {
      best_sq = sq;
      best.foot_point = foot;
      best.s = cum[i] + t * (cum[i + 1] - cum[i]);
    }
  }
  best.s = std::clamp(best.s, 0.0, line.length());
  best.d = Distance(query, best.foot_point);
  return best;
}

namespace {

constexpr double kBoundaryTolerance = 1e-9;

bool OnSegment(Point2 q, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len_sq = Dot(ab, ab);
  if (len_sq == 0.0) return Distance(q, a) <= kBoundaryTolerance;
  const double t = std::clamp(Dot(q - a, ab) / len_sq, 0.0, 1.0);
  return Distance(q, a + t * ab) <= kBoundaryTolerance;
}

}  // namespace

bool PointInPolygon(Point2 query, std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;

  double twice_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice_area += Cross(ring[i], ring[(i + 1) % n]);
  }
  if (twice_area == 0.0) return false;

  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = ring[j];
    const Point2 b = ring[i];
    if (OnSegment(query, a, b)) return true;
    if ((b.y > query.y) != (a.y > query.y)) {
      const double x_cross = b.x + (query.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (query.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::optional<double> HeadingAtEnd(std::span<const Point2> points,
                                   double epsilon) {
  for (std::size_t i = points.size(); i >= 2; --i) {
    const Point2 step = points[i - 1] - points[i - 2];
    if (Norm(step) > epsilon) return std::atan2(step.y, step.x);
  }
  return std::nullopt;
}

double WrappedAngleDiff(double a, double b) {
  return std::abs(std::atan2(std::sin(a - b), std::cos(a - b)));
}

double HeadingOnPolylineAt(const Polyline& line, double s) {
  const std::size_t i = line.SegmentAt(s);
  const Point2 dir = line.points()[i + 1] - line.points()[i];
  return std::atan2(dir.y, dir.x);
}

}  // namespace lmr
