// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rfpc/field.hpp"
#include "rfpc/geometry.hpp"

namespace rfpc {

/// Optional world-space checkerboard modulation of a part's albedo,
/// alternating between albedo and color2 on the (axis_u, axis_v) plane.
struct CheckerSpec {
  Vec3 color2 = Vec3::Zero();
  double block = 1.0;
  int axis_u = 0;
  int axis_v = 1;
};

/// One homogeneous region of an analytic scene. Solid parts carry the
/// opaque density; fog parts carry their own translucent density.
struct AnalyticPart {
  enum class Shape {
    half_space, // solid where normal . p <= offset (normal points outward)
    ball,       // solid inside the sphere
    box,        // solid inside the axis-aligned box
    fog_slab,   // translucent where lo <= normal . p <= hi
    fog_frame,  // translucent inside box but outside the inner xy rectangle
  };

  Shape shape = Shape::half_space;
  Vec3 normal = Vec3(0, 0, 1);
  double offset = 0.0;
  double lo = 0.0, hi = 0.0; // fog_slab interval along the normal
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  Aabb bounds;          // box / fog_frame outer extent
  Vec2 inner_min, inner_max; // fog_frame inner xy rectangle
  double fog_density = 0.0;
  Vec3 albedo = Vec3::Ones();
  std::optional<CheckerSpec> checker;

  bool is_solid() const {
    return shape == Shape::half_space || shape == Shape::ball ||
           shape == Shape::box;
  }
  bool inside(const Vec3& p) const;
  Vec3 albedo_at(const Vec3& p) const;
  /// Entry distance of the ray into a solid part; kInf on miss, 0 inside.
  double entry_distance(const Ray& ray) const;
  /// Euclidean distance from p to the solid region (0 inside).
  double exterior_distance(const Vec3& p) const;
};

/// Scene with analytically known geometry: densities are piecewise constant
/// (opaque inside solids, fog_density inside fog), so rendered depths and
/// colors have closed-form ground truth.
class AnalyticField : public RadianceField {
public:
  AnalyticField(std::vector<AnalyticPart> parts, double scene_scale);

  FieldSample query(const Vec3& position, const Vec3& direction) const override;

  /// Exact distance to the first solid surface along the ray; kInf on miss.
  /// Fog parts are not surfaces and do not contribute.
  double analytic_depth(const Ray& ray) const;

  /// Distance from p to the nearest solid part (0 on or inside one).
  double surface_distance(const Vec3& p) const;

  double scene_scale() const { return scene_scale_; }
  double shell_thickness() const { return 1e-3 * scene_scale_; }
  double opaque_density() const { return 1e4 / scene_scale_; }
  const std::vector<AnalyticPart>& parts() const { return parts_; }

private:
  std::vector<AnalyticPart> parts_;
  double scene_scale_;
};

AnalyticField load_analytic_field(const std::string& path);
void save_analytic_field(const AnalyticField& field, const std::string& path);

} // namespace rfpc
