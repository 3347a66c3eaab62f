#include "lmr/spatial_index.h"

#include <algorithm>
#include <utility>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

namespace lmr {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

using BgPoint = bg::model::point<double, 2, bg::cs::cartesian>;
using BgBox = bg::model::box<BgPoint>;
using TreeValue = std::pair<BgBox, SegmentIndex>;

struct CenterlineIndex::Tree {
  bgi::rtree<TreeValue, bgi::rstar<16>> rtree;
};

Mbr Mbr::Of(std::span<const Point2> points) {
  Mbr box{points.front().x, points.front().y, points.front().x,
          points.front().y};
  for (const Point2& p : points) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  return box;
}

// Same arithmetic as the closed box-box intersection test the R-tree runs
// against the query rectangle [p - inflate, p + inflate].
bool Mbr::ContainsInflated(Point2 p, double inflate) const {
  return p.x - inflate <= max_x && min_x <= p.x + inflate &&
         p.y - inflate <= max_y && min_y <= p.y + inflate;
}

CenterlineIndex::CenterlineIndex(const LaneGraph& graph, IndexBackend backend)
    : backend_(backend) {
  boxes_.reserve(graph.size());
  for (const LaneSegment& seg : graph.segments()) {
    boxes_.push_back(Mbr::Of(seg.centerline.points()));
  }
  if (backend_ == IndexBackend::kRTree) {
    std::vector<TreeValue> values;
    values.reserve(boxes_.size());
    for (SegmentIndex i = 0; i < boxes_.size(); ++i) {
      const Mbr& b = boxes_[i];
      values.emplace_back(BgBox({b.min_x, b.min_y}, {b.max_x, b.max_y}), i);
    }
    // Packing constructor: bulk-loaded tree.
    tree_ = std::make_unique<Tree>(Tree{{values.begin(), values.end()}});
  }
}

CenterlineIndex::~CenterlineIndex() = default;
CenterlineIndex::CenterlineIndex(CenterlineIndex&&) noexcept = default;
CenterlineIndex& CenterlineIndex::operator=(CenterlineIndex&&) noexcept =
    default;

std::vector<SegmentIndex> CenterlineIndex::QueryCandidates(
    Point2 point, double inflate) const {
  std::vector<SegmentIndex> out;
  if (backend_ == IndexBackend::kLinearScan) {
    for (SegmentIndex i = 0; i < boxes_.size(); ++i) {
      if (boxes_[i].ContainsInflated(point, inflate)) out.push_back(i);
    }
    return out;
  }
  const BgBox query({point.x - inflate, point.y - inflate},
                    {point.x + inflate, point.y + inflate});
  std::vector<TreeValue> hits;
  tree_->rtree.query(bgi::intersects(query), std::back_inserter(hits));
  out.reserve(hits.size());
  for (const auto& [box, index] : hits) out.push_back(index);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace lmr
