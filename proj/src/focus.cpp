// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/focus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "rfpc/errors.hpp"
#include "rfpc/hdbscan.hpp"

namespace rfpc {
namespace {

constexpr double kFlatRelative = 1e-9;
constexpr double kMinRadius = 1e-9;

void positions_at(const std::vector<Vec3>& origins,
                  const std::vector<Vec3>& directions, double t,
                  std::vector<Vec3>& out) {
  out.resize(origins.size());
  for (size_t i = 0; i < origins.size(); ++i) {
    out[i] = origins[i] + t * directions[i];
  }
}

// Sum of the n smallest neighbor distances, accumulated in ascending order.
// Both search paths below must select the same n-smallest distance multiset
// so their sums agree bit for bit.
double sum_n_smallest(std::vector<double>& distances, int n) {
  std::nth_element(distances.begin(), distances.begin() + (n - 1),
                   distances.end());
  std::sort(distances.begin(), distances.begin() + n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += distances[static_cast<size_t>(i)];
  return sum;
}

double nn_sum_brute(const std::vector<Vec3>& pts, size_t self, int n,
                    std::vector<double>& scratch) {
  scratch.clear();
  for (size_t j = 0; j < pts.size(); ++j) {
    if (j == self) continue;
    scratch.push_back((pts[j] - pts[self]).norm());
  }
  return sum_n_smallest(scratch, n);
}

std::uint64_t cell_key(long long ix, long long iy, long long iz) {
  const std::uint64_t bias = 1ull << 20;
  return ((static_cast<std::uint64_t>(ix) + bias) << 42) ^
         ((static_cast<std::uint64_t>(iy) + bias) << 21) ^
         (static_cast<std::uint64_t>(iz) + bias);
}

// Expanding-ring search over a spatial hash. Cells past ring r lie farther
// than r*cell from the query, so once the n-th best distance drops to that
// bound the n-smallest set is exact.
double nn_sum_grid(const std::vector<Vec3>& pts, size_t self, int n,
                   std::vector<double>& scratch) {
  Aabb box = Aabb::of_points(pts);
  const double diag = box.diagonal();
  if (diag <= 0.0) return 0.0; // all points coincide
  const double cell = diag / std::cbrt(static_cast<double>(pts.size()));

  std::unordered_map<std::uint64_t, std::vector<int>> buckets;
  buckets.reserve(pts.size() * 2);
  const auto cell_of = [&](const Vec3& p, long long& ix, long long& iy,
                           long long& iz) {
    ix = static_cast<long long>(std::floor((p.x() - box.min.x()) / cell));
    iy = static_cast<long long>(std::floor((p.y() - box.min.y()) / cell));
    iz = static_cast<long long>(std::floor((p.z() - box.min.z()) / cell));
  };
  for (size_t j = 0; j < pts.size(); ++j) {
    if (j == self) continue;
    long long ix, iy, iz;
    cell_of(pts[j], ix, iy, iz);
    buckets[cell_key(ix, iy, iz)].push_back(static_cast<int>(j));
  }

  long long cx, cy, cz;
  cell_of(pts[self], cx, cy, cz);
  const long long max_ring =
      static_cast<long long>(std::ceil(diag / cell)) + 2;
  scratch.clear();
  for (long long r = 0;; ++r) {
    for (long long dx = -r; dx <= r; ++dx) {
      for (long long dy = -r; dy <= r; ++dy) {
        for (long long dz = -r; dz <= r; ++dz) {
          if (std::max({std::llabs(dx), std::llabs(dy), std::llabs(dz)}) != r) {
            continue;
          }
          const auto it = buckets.find(cell_key(cx + dx, cy + dy, cz + dz));
          if (it == buckets.end()) continue;
          for (const int j : it->second) {
            scratch.push_back(
                (pts[static_cast<size_t>(j)] - pts[self]).norm());
          }
        }
      }
    }
    if (static_cast<int>(scratch.size()) >= n) {
      std::nth_element(scratch.begin(), scratch.begin() + (n - 1),
                       scratch.end());
      if (scratch[static_cast<size_t>(n - 1)] <=
          static_cast<double>(r) * cell) {
        break;
      }
    }
    if (r > max_ring) break; // every occupied cell has been visited
  }
  return sum_n_smallest(scratch, n);
}

struct DepthObjective {
  const std::vector<Vec3>& origins;
  const std::vector<Vec3>& directions;
  size_t self;
  int n;
  bool use_grid;
  mutable std::vector<Vec3> pts;
  mutable std::vector<double> scratch;

  double operator()(double t) const {
    positions_at(origins, directions, t, pts);
    return use_grid ? nn_sum_grid(pts, self, n, scratch)
                    : nn_sum_brute(pts, self, n, scratch);
  }
};

double optimal_ray_depth_impl(size_t camera_index,
                              const std::vector<Vec3>& origins,
                              const std::vector<Vec3>& directions, int n,
                              const TSearch& window, int nn_brute_force_limit,
                              bool* flat) {
  const DepthObjective objective{
      origins, directions, camera_index, n,
      static_cast<int>(origins.size()) > nn_brute_force_limit,
      {}, {}};

  const int steps = window.steps;
  const double ratio = window.t_max / window.t_min;
  std::vector<double> grid_t(static_cast<size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    grid_t[static_cast<size_t>(i)] =
        window.t_min * std::pow(ratio, static_cast<double>(i) / (steps - 1.0));
  }

  double best_v = kInf;
  double best_t = grid_t[0];
  int best_i = 0;
  double lo_v = kInf, hi_v = -kInf;
  for (int i = 0; i < steps; ++i) {
    const double v = objective(grid_t[static_cast<size_t>(i)]);
    if (v < best_v) {
      best_v = v;
      best_t = grid_t[static_cast<size_t>(i)];
      best_i = i;
    }
    lo_v = std::min(lo_v, v);
    hi_v = std::max(hi_v, v);
  }
  if (flat != nullptr) {
    *flat = (hi_v - lo_v) <= kFlatRelative * std::max(1.0, hi_v);
  }

  const auto consider = [&](double t, double v) {
    if (v < best_v || (v == best_v && t < best_t)) {
      best_v = v;
      best_t = t;
    }
  };
  double a = grid_t[static_cast<size_t>(std::max(best_i - 1, 0))];
  double b = grid_t[static_cast<size_t>(std::min(best_i + 1, steps - 1))];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  consider(c, fc);
  consider(d, fd);
  for (int iter = 0; iter < 80 && (b - a) > 1e-12 * window.t_max; ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = objective(d);
      consider(d, fd);
    }
  }
  return best_t;
}

void split_poses(const std::vector<CameraPose>& poses,
                 std::vector<Vec3>& origins, std::vector<Vec3>& directions) {
  origins.resize(poses.size());
  directions.resize(poses.size());
  for (size_t i = 0; i < poses.size(); ++i) {
    origins[i] = poses[i].origin;
    directions[i] = poses[i].viewing_direction;
  }
}

void validate_lrf_config(const LrfConfig& config) {
  if (config.max_areas < 0) throw ConfigError("max_areas must be >= 0");
  if (config.neighbors < 1) throw ConfigError("neighbors must be >= 1");
  if (!(config.frustum_half_angle_deg > 0.0 &&
        config.frustum_half_angle_deg < 90.0)) {
    throw ConfigError("frustum_half_angle_deg must be in (0, 90)");
  }
  if (config.min_cluster_size < 2) {
    throw ConfigError("min_cluster_size must be >= 2");
  }
}

std::vector<CausticPoint> build_caustic_points_impl(
    const std::vector<CameraPose>& poses, const LrfConfig& config,
    std::vector<std::uint8_t>* flat_flags, bool parallel) {
  validate_lrf_config(config);
  if (poses.size() < static_cast<size_t>(config.neighbors) + 1) {
    throw TooFewCameras("need at least neighbors+1 cameras");
  }
  const TSearch window = resolve_t_search(config.t_search, poses);
  std::vector<Vec3> origins, directions;
  split_poses(poses, origins, directions);

  const int count = static_cast<int>(poses.size());
  std::vector<CausticPoint> points(poses.size());
  std::vector<std::uint8_t> flats(poses.size(), 0);
#pragma omp parallel for if (parallel) schedule(static)
  for (int i = 0; i < count; ++i) {
    bool flat = false;
    const double t = optimal_ray_depth_impl(
        static_cast<size_t>(i), origins, directions, config.neighbors, window,
        config.nn_brute_force_limit, &flat);
    CausticPoint& p = points[static_cast<size_t>(i)];
    p.depth = t;
    p.position = origins[static_cast<size_t>(i)] +
                 t * directions[static_cast<size_t>(i)];
    p.camera_id = poses[static_cast<size_t>(i)].id;
    flats[static_cast<size_t>(i)] = flat ? 1 : 0;
  }
  if (flat_flags != nullptr) *flat_flags = std::move(flats);
  return points;
}

std::vector<double> pairwise_matrix_impl(const std::vector<CausticPoint>& points,
                                         double alpha_deg, bool parallel) {
  const int n = static_cast<int>(points.size());
  std::vector<double> matrix(static_cast<size_t>(n) * static_cast<size_t>(n),
                             0.0);
#pragma omp parallel for if (parallel) schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = frustum_semimetric(points[static_cast<size_t>(i)],
                                          points[static_cast<size_t>(j)],
                                          alpha_deg);
      matrix[static_cast<size_t>(i) * n + j] = d;
      matrix[static_cast<size_t>(j) * n + i] = d;
    }
  }
  return matrix;
}

} // namespace

Aabb scene_box_from_poses(const std::vector<CameraPose>& poses, double scale) {
  if (poses.empty()) throw EmptySet("no poses");
  std::vector<Vec3> origins(poses.size());
  for (size_t i = 0; i < poses.size(); ++i) origins[i] = poses[i].origin;
  return Aabb::of_points(origins).scaled(scale);
}

TSearch resolve_t_search(const TSearch& t_search,
                         const std::vector<CameraPose>& poses) {
  TSearch out = t_search;
  if (out.steps < 2) throw ConfigError("t_search steps must be >= 2");
  if (out.t_min <= 0.0 || out.t_max <= 0.0) {
    if (poses.empty()) throw EmptySet("no poses to derive the depth window");
    std::vector<Vec3> origins(poses.size());
    for (size_t i = 0; i < poses.size(); ++i) origins[i] = poses[i].origin;
    double scale = Aabb::of_points(origins).diagonal();
    if (scale <= 0.0) scale = 1.0; // coincident camera origins
    if (out.t_min <= 0.0) out.t_min = 0.1 * scale;
    if (out.t_max <= 0.0) out.t_max = 4.0 * scale;
  }
  if (!(out.t_min > 0.0) || !(out.t_max > 0.0) || out.t_min > out.t_max) {
    throw ConfigError("t_search window must satisfy 0 < t_min <= t_max");
  }
  return out;
}

double optimal_ray_depth(size_t camera_index,
                         const std::vector<CameraPose>& poses, int n,
                         const TSearch& t_search, int nn_brute_force_limit,
                         bool* flat) {
  if (n < 1) throw ConfigError("neighbors must be >= 1");
  if (poses.size() < static_cast<size_t>(n) + 1) {
    throw TooFewCameras("need at least n+1 cameras");
  }
  if (camera_index >= poses.size()) throw OutOfBounds("camera_index");
  const TSearch window = resolve_t_search(t_search, poses);
  std::vector<Vec3> origins, directions;
  split_poses(poses, origins, directions);
  return optimal_ray_depth_impl(camera_index, origins, directions, n, window,
                                nn_brute_force_limit, flat);
}

std::vector<CausticPoint> build_caustic_points(
    const std::vector<CameraPose>& poses, const LrfConfig& config,
    std::vector<std::uint8_t>* flat_flags) {
  return build_caustic_points_impl(poses, config, flat_flags, true);
}

std::vector<CausticPoint> build_caustic_points_serial(
    const std::vector<CameraPose>& poses, const LrfConfig& config,
    std::vector<std::uint8_t>* flat_flags) {
  return build_caustic_points_impl(poses, config, flat_flags, false);
}

double frustum_semimetric(const CausticPoint& a, const CausticPoint& b,
                          double alpha_deg) {
  const double dt = a.depth - b.depth;
  const double euclid =
      std::sqrt((a.position - b.position).squaredNorm() + dt * dt);
  const double shrink =
      (a.depth + b.depth) * std::sin(alpha_deg * std::numbers::pi / 180.0);
  return std::max(euclid - shrink, 0.0);
}

std::vector<double> pairwise_semimetric_matrix(
    const std::vector<CausticPoint>& points, double alpha_deg) {
  return pairwise_matrix_impl(points, alpha_deg, true);
}

std::vector<double> pairwise_semimetric_matrix_serial(
    const std::vector<CausticPoint>& points, double alpha_deg) {
  return pairwise_matrix_impl(points, alpha_deg, false);
}

std::vector<FocusArea> focus_areas_from_clusters(
    const std::vector<int>& labels, const std::vector<CausticPoint>& points,
    const std::vector<CameraPose>& poses, int max_areas) {
  if (labels.size() != points.size()) {
    throw BadRange("labels and points must align");
  }
  if (max_areas < 0) throw ConfigError("max_areas must be >= 0");

  std::unordered_map<std::string, Vec3> origin_of;
  origin_of.reserve(poses.size());
  for (const CameraPose& pose : poses) origin_of[pose.id] = pose.origin;

  std::map<int, std::vector<size_t>> members;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) members[labels[i]].push_back(i);
  }

  std::vector<FocusArea> areas;
  areas.reserve(members.size());
  for (const auto& [label, indices] : members) {
    FocusArea area;
    Vec3 sum = Vec3::Zero();
    for (const size_t i : indices) sum += points[i].position;
    area.center = sum / static_cast<double>(indices.size());
    double radius_sum = 0.0;
    for (const size_t i : indices) {
      const auto it = origin_of.find(points[i].camera_id);
      if (it == origin_of.end()) {
        throw BadRange("no pose for camera " + points[i].camera_id);
      }
      radius_sum += (area.center - it->second).cwiseAbs().maxCoeff();
    }
    area.radius =
        std::max(radius_sum / static_cast<double>(indices.size()), kMinRadius);
    for (const size_t i : indices) {
      area.member_camera_ids.push_back(points[i].camera_id);
    }
    std::sort(area.member_camera_ids.begin(), area.member_camera_ids.end());
    areas.push_back(std::move(area));
  }

  std::sort(areas.begin(), areas.end(),
            [](const FocusArea& x, const FocusArea& y) {
              if (x.member_camera_ids.size() != y.member_camera_ids.size()) {
                return x.member_camera_ids.size() > y.member_camera_ids.size();
              }
              return x.member_camera_ids.front() < y.member_camera_ids.front();
            });
  if (static_cast<int>(areas.size()) > max_areas) {
    areas.resize(static_cast<size_t>(max_areas));
  }
  return areas;
}

std::vector<FocusArea> detect_focus_areas(const std::vector<CameraPose>& poses,
                                          const LrfConfig& config) {
  std::vector<std::uint8_t> flat_flags;
  const std::vector<CausticPoint> points =
      build_caustic_points(poses, config, &flat_flags);
  const std::vector<double> matrix =
      pairwise_semimetric_matrix(points, config.frustum_half_angle_deg);
  const HdbscanResult clusters =
      hdbscan_cluster(matrix, static_cast<int>(points.size()),
                      config.min_cluster_size, config.single_cluster);
  std::vector<FocusArea> areas = focus_areas_from_clusters(
      clusters.labels, points, poses, config.max_areas);

  std::unordered_map<std::string, bool> flat_of;
  flat_of.reserve(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    flat_of[points[i].camera_id] = flat_flags[i] != 0;
  }
  for (FocusArea& area : areas) {
    size_t flat_members = 0;
    for (const std::string& id : area.member_camera_ids) {
      const auto it = flat_of.find(id);
      if (it != flat_of.end() && it->second) ++flat_members;
    }
    area.low_confidence = 2 * flat_members >= area.member_camera_ids.size();
  }
  return areas;
}

} // namespace rfpc
