// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace rfpc {

/// Density-based hierarchical clustering over a precomputed distance matrix:
/// mutual-reachability distances (core distance = distance to the
/// min_cluster_size-th neighbor, the point itself counted), minimum spanning
/// tree, condensed cluster tree, excess-of-mass selection. When
/// single_cluster is set the root cluster is eligible. Labels are dense
/// 0..k-1 by ascending tree node id; -1 marks noise.
///
/// An all-zero matrix (every point identical) is a degenerate input: the
/// result is a single cluster containing everything rather than an error.
struct HdbscanResult {
  std::vector<int> labels;
  int num_clusters = 0;
  bool degenerate = false;
};

/// `distance_matrix` is row-major n x n, symmetric, zero diagonal.
/// Throws BadRange on min_cluster_size < 2 or a matrix/point-count mismatch.
HdbscanResult hdbscan_cluster(const std::vector<double>& distance_matrix,
                              int num_points, int min_cluster_size,
                              bool single_cluster);

} // namespace rfpc
