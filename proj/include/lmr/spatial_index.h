// Bounding-rectangle index over lane centerlines.

#ifndef LMR_SPATIAL_INDEX_H_
#define LMR_SPATIAL_INDEX_H_

#include <memory>
#include <vector>

#include "lmr/geometry.h"
#include "lmr/lane_graph.h"

namespace lmr {

struct Mbr {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  static Mbr Of(std::span<const Point2> points);
  // True when this rectangle, grown by `inflate` on each side, contains p.
  bool ContainsInflated(Point2 p, double inflate) const;

  friend bool operator==(const Mbr&, const Mbr&) = default;
};

enum class IndexBackend {
  kRTree,
  // Brute-force scan over every entry. Must return the same candidate sets
  // as kRTree; used for differential testing.
  kLinearScan,
};

class CenterlineIndex {
 public:
  explicit CenterlineIndex(const LaneGraph& graph,
                           IndexBackend backend = IndexBackend::kRTree);
  ~CenterlineIndex();
  CenterlineIndex(CenterlineIndex&&) noexcept;
  CenterlineIndex& operator=(CenterlineIndex&&) noexcept;

  std::size_t size() const { return boxes_.size(); }
  IndexBackend backend() const { return backend_; }
  const Mbr& box(SegmentIndex i) const { return boxes_[i]; }

  // Segments whose centerline rectangle, inflated by `inflate`, contains
  // `point`. Sorted by segment index.
  std::vector<SegmentIndex> QueryCandidates(Point2 point,
                                            double inflate) const;

 private:
  struct Tree;

  IndexBackend backend_;
  std::vector<Mbr> boxes_;
  std::unique_ptr<Tree> tree_;
};

}  // namespace lmr

#endif  // LMR_SPATIAL_INDEX_H_
