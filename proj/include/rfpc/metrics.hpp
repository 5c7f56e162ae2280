// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rfpc/point_cloud.hpp"

namespace rfpc {

struct CloudMetrics {
  double chamfer = 0.0;
  double hausdorff = 0.0;
  double fscore = 0.0; // percent in [0, 100]
  double threshold = 0.0;
};

/// Exact nearest-neighbor distance from every point of `from` to the cloud
/// `to`, kd-tree accelerated and parallel across queries. Bitwise equal to
/// the brute-force reference: both minimize the same squared distances and
/// take one square root per query. Throws EmptyCloud when `to` is empty.
std::vector<double> nearest_distances(const PointCloud& from,
                                      const PointCloud& to);
/// Serial O(n*m) reference.
std::vector<double> nearest_distances_brute(const PointCloud& from,
                                            const PointCloud& to);

/// 0.5 * (mean_a d(a, B) + mean_b d(b, A)). Throws EmptyCloud.
double chamfer(const PointCloud& a, const PointCloud& b);

/// max(max_a d(a, B), max_b d(b, A)). Throws EmptyCloud.
double hausdorff(const PointCloud& a, const PointCloud& b);

/// precision = fraction of A within `threshold` of B, recall vice versa;
/// F = 200*P*R/(P+R) percent, 0 when P+R = 0. Throws EmptyCloud on empty
/// inputs and BadRange on a negative threshold.
double fscore(const PointCloud& a, const PointCloud& b, double threshold);

/// All three metrics over one pair of nearest-distance passes.
CloudMetrics evaluate_clouds(const PointCloud& a, const PointCloud& b,
                             double threshold);

} // namespace rfpc
