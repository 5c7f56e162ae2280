// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfpc/camera.hpp"
#include "rfpc/focus_area.hpp"
#include "rfpc/geometry.hpp"

namespace rfpc {

/// Where a camera's ray passes closest to the rays of its neighbors.
struct CausticPoint {
  Vec3 position = Vec3::Zero();
  double depth = 0.0;
  std::string camera_id;
};

/// Depth search window. Non-positive bounds are derived from the scene
/// scale (bounding-box diagonal of the camera origins): 0.1x for t_min,
/// 4x for t_max.
struct TSearch {
  double t_min = 0.0;
  double t_max = 0.0;
  int steps = 256;
};

struct LrfConfig {
  int max_areas = 5;
  int neighbors = 20;
  double frustum_half_angle_deg = 10.0;
  int min_cluster_size = 20;
  bool single_cluster = true;
  TSearch t_search;
  // Camera counts above this use a spatial-hash neighbor search; results
  // are bit-identical to the brute-force path either way.
  int nn_brute_force_limit = 2000;
};

/// Bounding box of the camera origins grown about its center.
Aabb scene_box_from_poses(const std::vector<CameraPose>& poses,
                          double scale = 2.0);

/// Fills in non-positive t_search bounds from the poses' scene scale and
/// validates the window. Throws ConfigError when invalid.
TSearch resolve_t_search(const TSearch& t_search,
                         const std::vector<CameraPose>& poses);

/// The depth t minimizing the summed distance from x(t) = origin + t*dir to
/// its n nearest neighbors among the other cameras' points at the same t.
/// Scans a log-spaced grid over [t_min, t_max] and refines by golden section
/// inside the winning cell; ties prefer smaller t. `flat`, when given,
/// reports a search objective that never moved (no depth signal).
/// Throws TooFewCameras when fewer than n+1 poses exist.
double optimal_ray_depth(size_t camera_index,
                         const std::vector<CameraPose>& poses, int n,
                         const TSearch& t_search,
                         int nn_brute_force_limit = 2000,
                         bool* flat = nullptr);

/// One caustic point per camera; position = origin + depth * direction.
/// `flat_flags`, when given, receives one entry per camera.
std::vector<CausticPoint> build_caustic_points(
    const std::vector<CameraPose>& poses, const LrfConfig& config,
    std::vector<std::uint8_t>* flat_flags = nullptr);
std::vector<CausticPoint> build_caustic_points_serial(
    const std::vector<CameraPose>& poses, const LrfConfig& config,
    std::vector<std::uint8_t>* flat_flags = nullptr);

/// max{ ||(x_a; t_a) - (x_b; t_b)||_2 - (t_a + t_b) sin(alpha), 0 }
/// over the 4D position-depth vectors: distance between growing view
/// frustums of half-angle alpha.
double frustum_semimetric(const CausticPoint& a, const CausticPoint& b,
                          double alpha_deg);

/// Row-major n x n matrix of frustum_semimetric values, zero diagonal.
std::vector<double> pairwise_semimetric_matrix(
    const std::vector<CausticPoint>& points, double alpha_deg);
std::vector<double> pairwise_semimetric_matrix_serial(
    const std::vector<CausticPoint>& points, double alpha_deg);

/// Per cluster: center = mean member position, radius = mean l-infinity
/// distance from the center to member camera origins. Clusters are ranked
/// by member count (ties: lexicographically smallest member camera id) and
/// at most max_areas are returned.
std::vector<FocusArea> focus_areas_from_clusters(
    const std::vector<int>& labels, const std::vector<CausticPoint>& points,
    const std::vector<CameraPose>& poses, int max_areas);

/// Full pipeline: caustic points, pairwise semimetric matrix, density
/// clustering, cluster summaries. Deterministic for fixed poses and config.
std::vector<FocusArea> detect_focus_areas(const std::vector<CameraPose>& poses,
                                          const LrfConfig& config);

} // namespace rfpc
