#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "graspkit/geometry.hpp"

namespace graspkit::detail {

// Static 3-d tree for k-nearest-neighbor queries. Equal distances are broken
// by point index so results never depend on traversal order.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points) : points_(points) {
    index_.resize(points.size());
    for (std::size_t i = 0; i < index_.size(); ++i) index_[i] = static_cast<std::uint32_t>(i);
    nodes_.reserve(2 * points.size() / kLeafSize + 2);
    if (!index_.empty()) build(0, index_.size());
  }

  /// Indices of the k nearest points to `query`, nearest first.
  std::vector<std::uint32_t> knn(const Vec3& query, std::size_t k) const {
    Heap heap;
    if (!nodes_.empty() && k > 0) search(0, query, k, heap);
    std::vector<std::uint32_t> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
      out[i] = heap.top().second;
      heap.pop();
    }
    return out;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;

  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  using Entry = std::pair<double, std::uint32_t>;
  using Heap = std::priority_queue<Entry>;  // max-heap on (dist2, index)

  std::uint32_t build(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    Vec3 lo = points_[index_[begin]];
    Vec3 hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[index_[i]]);
      hi = hi.cwiseMax(points_[index_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] - lo[axis] <= 0.0) return id;  // all coincident: keep as leaf

    const std::size_t mid = begin + (end - begin) / 2;
    auto first = index_.begin() + static_cast<std::ptrdiff_t>(begin);
    std::nth_element(first, index_.begin() + static_cast<std::ptrdiff_t>(mid),
                     index_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double pa = points_[a][axis];
                       const double pb = points_[b][axis];
                       return pa < pb || (pa == pb && a < b);
                     });
    const double split = points_[index_[mid]][axis];
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    Node& node = nodes_[id];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

  void offer(Heap& heap, std::size_t k, double d2, std::uint32_t idx) const {
    const Entry e{d2, idx};
    if (heap.size() < k) {
      heap.push(e);
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
  }

  void search(std::uint32_t id, const Vec3& q, std::size_t k, Heap& heap) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t idx = index_[i];
        offer(heap, k, (points_[idx] - q).squaredNorm(), idx);
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const std::uint32_t near = diff < 0.0 ? node.left : node.right;
    const std::uint32_t far = diff < 0.0 ? node.right : node.left;
    search(near, q, k, heap);
    // <= keeps equal-distance candidates on the far side reachable for tie-breaking.
    if (heap.size() < k || diff * diff <= heap.top().first) search(far, q, k, heap);
  }

  std::span<const Vec3> points_;
  std::vector<std::uint32_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace graspkit::detail
