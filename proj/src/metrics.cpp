// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rfpc/errors.hpp"

namespace rfpc {
namespace {

// Left-balanced kd-tree over point indices; splits cycle by depth.
struct KdTree {
  struct Node {
    int index = -1;   // point id
    int axis = 0;
    int left = -1;
    int right = -1;
  };
  const std::vector<Vec3>* points = nullptr;
  std::vector<Node> nodes;
  int root = -1;

  explicit KdTree(const std::vector<Vec3>& pts) : points(&pts) {
    std::vector<int> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    nodes.reserve(pts.size());
    root = build(order.begin(), order.end(), 0);
  }

  int build(std::vector<int>::iterator first, std::vector<int>::iterator last,
            int depth) {
    if (first == last) return -1;
    const int axis = depth % 3;
    auto mid = first + (last - first) / 2;
    std::nth_element(first, mid, last, [this, axis](int a, int b) {
      return (*points)[static_cast<size_t>(a)][axis] <
             (*points)[static_cast<size_t>(b)][axis];
    });
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({*mid, axis, -1, -1});
    const int left = build(first, mid, depth + 1);
    const int right = build(mid + 1, last, depth + 1);
    nodes[static_cast<size_t>(id)].left = left;
    nodes[static_cast<size_t>(id)].right = right;
    return id;
  }

  void nearest_sq(int node, const Vec3& query, double& best_sq) const {
    if (node < 0) return;
    const Node& n = nodes[static_cast<size_t>(node)];
    const Vec3& p = (*points)[static_cast<size_t>(n.index)];
    const double d_sq = (query - p).squaredNorm();
    if (d_sq < best_sq) best_sq = d_sq;
    const double delta = query[n.axis] - p[n.axis];
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    nearest_sq(near, query, best_sq);
    if (delta * delta < best_sq) nearest_sq(far, query, best_sq);
  }

  double nearest(const Vec3& query) const {
    double best_sq = kInf;
    nearest_sq(root, query, best_sq);
    return std::sqrt(best_sq);
  }
};

std::vector<double> nearest_impl(const PointCloud& from, const PointCloud& to,
                                 bool accelerate) {
  if (to.positions.empty()) throw EmptyCloud("nearest_distances: empty target");
  std::vector<double> out(from.positions.size(), 0.0);
  if (accelerate) {
    const KdTree tree(to.positions);
    const int count = static_cast<int>(from.positions.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) {
      out[static_cast<size_t>(i)] = tree.nearest(from.positions[static_cast<size_t>(i)]);
    }
  } else {
    for (size_t i = 0; i < from.positions.size(); ++i) {
      double best_sq = kInf;
      for (const Vec3& q : to.positions) {
        const double d_sq = (from.positions[i] - q).squaredNorm();
        if (d_sq < best_sq) best_sq = d_sq;
      }
      out[i] = std::sqrt(best_sq);
    }
  }
  return out;
}

double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

void require_nonempty(const PointCloud& a, const PointCloud& b) {
  if (a.positions.empty() || b.positions.empty()) {
    throw EmptyCloud("metric over an empty cloud");
  }
}

} // namespace

std::vector<double> nearest_distances(const PointCloud& from,
                                      const PointCloud& to) {
  return nearest_impl(from, to, true);
}

std::vector<double> nearest_distances_brute(const PointCloud& from,
                                            const PointCloud& to) {
  return nearest_impl(from, to, false);
}

double chamfer(const PointCloud& a, const PointCloud& b) {
  require_nonempty(a, b);
  return 0.5 * (mean(nearest_distances(a, b)) + mean(nearest_distances(b, a)));
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  require_nonempty(a, b);
  const std::vector<double> ab = nearest_distances(a, b);
  const std::vector<double> ba = nearest_distances(b, a);
  const double max_ab = *std::max_element(ab.begin(), ab.end());
  const double max_ba = *std::max_element(ba.begin(), ba.end());
  return std::max(max_ab, max_ba);
}

double fscore(const PointCloud& a, const PointCloud& b, double threshold) {
  require_nonempty(a, b);
  if (threshold < 0.0) throw BadRange("fscore threshold must be >= 0");
  const std::vector<double> ab = nearest_distances(a, b);
  const std::vector<double> ba = nearest_distances(b, a);
  const auto fraction_within = [threshold](const std::vector<double>& d) {
    size_t hits = 0;
    for (const double v : d) {
      if (v <= threshold) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(d.size());
  };
  const double precision = fraction_within(ab);
  const double recall = fraction_within(ba);
  if (precision + recall == 0.0) return 0.0;
  return 200.0 * (precision * recall) / (precision + recall);
}

CloudMetrics evaluate_clouds(const PointCloud& a, const PointCloud& b,
                             double threshold) {
  require_nonempty(a, b);
  if (threshold < 0.0) throw BadRange("fscore threshold must be >= 0");
  const std::vector<double> ab = nearest_distances(a, b);
  const std::vector<double> ba = nearest_distances(b, a);

  CloudMetrics metrics;
  metrics.threshold = threshold;
  metrics.chamfer = 0.5 * (mean(ab) + mean(ba));
  metrics.hausdorff = std::max(*std::max_element(ab.begin(), ab.end()),
                               *std::max_element(ba.begin(), ba.end()));
  const auto fraction_within = [threshold](const std::vector<double>& d) {
    size_t hits = 0;
    for (const double v : d) {
      if (v <= threshold) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(d.size());
  };
  const double precision = fraction_within(ab);
  const double recall = fraction_within(ba);
  metrics.fscore = (precision + recall == 0.0)
                       ? 0.0
                       : 200.0 * (precision * recall) / (precision + recall);
  return metrics;
}

} // namespace rfpc
