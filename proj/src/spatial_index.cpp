#include "orchard/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orchard {

namespace {

struct Candidate {
  double d2;
  std::size_t index;
  bool operator<(const Candidate& o) const {
    return d2 < o.d2 || (d2 == o.d2 && index < o.index);
  }
};

}  // namespace

void SpatialIndex::build(const std::vector<Vec3>& points) {
  points_ = points;
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.clear();
  nodes_.reserve(points_.size() / kLeafSize * 2 + 2);
  root_ = points_.empty() ? -1 : build_range(0, points_.size());
}

int SpatialIndex::build_range(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Node node;
  node.begin = begin;
  node.end = end;
  if (end - begin <= kLeafSize) {
    nodes_[id] = node;
    return id;
  }

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::size_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) {  // all points coincide on every axis
    nodes_[id] = node;
    return id;
  }

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  node.axis = axis;
  node.split = points_[order_[mid]][axis];
  node.left = build_range(begin, mid);
  node.right = build_range(mid, end);
  nodes_[id] = node;
  return id;
}

std::vector<Neighbor> SpatialIndex::knn(const Vec3& query, std::size_t k) const {
  if (points_.empty()) throw std::runtime_error("empty index");
  if (k < 1) throw std::invalid_argument("knn: k must be >= 1");

  // Max-heap on (d2, index); ties resolve to the smaller input index.
  std::vector<Candidate> heap;
  heap.reserve(k + 1);
  const auto worst_d2 = [&] {
    return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.front().d2;
  };
  const auto offer = [&](std::size_t idx) {
    const Candidate c{(points_[idx] - query).squaredNorm(), idx};
    if (heap.size() < k) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end());
    } else if (c < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = c;
      std::push_heap(heap.begin(), heap.end());
    }
  };

  const auto visit = [&](auto&& self, int id) -> void {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) offer(order_[i]);
      return;
    }
    const double delta = query[node.axis] - node.split;
    const int near = delta <= 0.0 ? node.left : node.right;
    const int far = delta <= 0.0 ? node.right : node.left;
    self(self, near);
    // A tied point across the plane can still win on index order, so the far
    // side is visited when delta^2 equals the current worst distance too.
    if (delta * delta <= worst_d2()) self(self, far);
  };
  visit(visit, root_);

  std::sort(heap.begin(), heap.end());
  std::vector<Neighbor> out;
  out.reserve(heap.size());
  for (const Candidate& c : heap) out.push_back(Neighbor{c.index, std::sqrt(c.d2)});
  return out;
}

std::vector<Neighbor> SpatialIndex::radius_search(const Vec3& query, double radius) const {
  if (!(radius >= 0.0)) throw std::invalid_argument("radius_search: radius must be >= 0");
  std::vector<Candidate> found;
  if (points_.empty()) return {};
  const double r2 = radius * radius;

  const auto visit = [&](auto&& self, int id) -> void {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        const double d2 = (points_[idx] - query).squaredNorm();
        if (d2 <= r2) found.push_back(Candidate{d2, idx});
      }
      return;
    }
    const double delta = query[node.axis] - node.split;
    const int near = delta <= 0.0 ? node.left : node.right;
    const int far = delta <= 0.0 ? node.right : node.left;
    self(self, near);
    if (delta * delta <= r2) self(self, far);
  };
  visit(visit, root_);

  std::sort(found.begin(), found.end());
  std::vector<Neighbor> out;
  out.reserve(found.size());
  for (const Candidate& c : found) out.push_back(Neighbor{c.index, std::sqrt(c.d2)});
  return out;
}

double SpatialIndex::nearest_dist2(const Vec3& query) const {
  if (points_.empty()) throw std::runtime_error("empty index");
  // Tracks squared distance directly; no sqrt round-trip so callers that
  // compare d2 against thresholds agree exactly with a brute-force scan.
  double best = std::numeric_limits<double>::infinity();
  const auto visit = [&](auto&& self, int id) -> void {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        best = std::min(best, (points_[order_[i]] - query).squaredNorm());
      }
      return;
    }
    const double delta = query[node.axis] - node.split;
    const int near = delta <= 0.0 ? node.left : node.right;
    const int far = delta <= 0.0 ? node.right : node.left;
    self(self, near);
    if (delta * delta <= best) self(self, far);
  };
  visit(visit, root_);
  return best;
}

}  // namespace orchard
