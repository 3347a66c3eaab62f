// Planar geometry primitives shared by the lane graph, assignment and
// distance modules. All functions are pure and thread-safe.

#ifndef LMR_GEOMETRY_H_
#define LMR_GEOMETRY_H_

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "lmr/error.h"

namespace lmr {

inline constexpr double kPi = 3.14159265358979323846;

// Consecutive polyline vertices closer than this are rejected.
inline constexpr double kDuplicatePointTolerance = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double k, Point2 a) { return {k * a.x, k * a.y}; }

inline double Dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double Cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double Norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double Distance(Point2 a, Point2 b) { return Norm(a - b); }
inline bool IsFinite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// An ordered point sequence with cached cumulative arc-length.
// Construction enforces >= 2 finite points and no consecutive duplicates.
class Polyline {
 public:
  explicit Polyline(std::vector<Point2> points);

  const std::vector<Point2>& points() const { return points_; }
  const std::vector<double>& cumulative_arclength() const { return cumulative_; }
  std::size_t size() const { return points_.size(); }
  double length() const { return cumulative_.back(); }

  // Index i of the segment [points[i], points[i+1]] that contains arc-length
  // s. Interior vertices belong to the following segment; s == length()
  // belongs to the final segment.
  std::size_t SegmentAt(double s) const;

  // Point at arc-length s (clamped to [0, length()]).
  Point2 PointAt(double s) const;

 private:
  std::vector<Point2> points_;
  std::vector<double> cumulative_;
};

struct ArcProjection {
  double s = 0.0;  // arc-length of the foot point
  double d = 0.0;  // unsigned distance from query to foot point
  Point2 foot_point;
};

// Closest point on `line` to `query`. Ties between segments resolve to the
// smaller arc-length.
ArcProjection ProjectOntoPolyline(Point2 query, const Polyline& line);

// Even-odd containment; points on the ring boundary count as inside.
// Rings with fewer than 3 vertices or zero area contain nothing.
bool PointInPolygon(Point2 query, std::span<const Point2> ring);

inline constexpr double kDefaultHeadingEpsilon = 1e-3;

// Heading of the last displacement longer than `epsilon`, scanning back from
// the end. Empty for stationary sequences.
std::optional<double> HeadingAtEnd(std::span<const Point2> points,
                                   double epsilon = kDefaultHeadingEpsilon);

// |atan2(sin(a - b), cos(a - b))|, in [0, pi].
double WrappedAngleDiff(double a, double b);

// Heading of the polyline segment containing arc-length s.
double HeadingOnPolylineAt(const Polyline& line, double s);

}  // namespace lmr

#endif  // LMR_GEOMETRY_H_
