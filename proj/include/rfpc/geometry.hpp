// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <limits>
#include <span>
#include <vector>

namespace rfpc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ray {
  Vec3 origin;
  Vec3 direction; // unit norm
};

/// Axis-aligned bounding box.
struct Aabb {
  Vec3 min{Vec3::Zero()};
  Vec3 max{Vec3::Zero()};

  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  double diagonal() const { return (max - min).norm(); }

  bool contains(const Vec3& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() &&
           p.y() <= max.y() && p.z() >= min.z() && p.z() <= max.z();
  }

  /// Box grown symmetrically about its center by the given factor.
  Aabb scaled(double factor) const {
    const Vec3 c = center();
    const Vec3 h = 0.5 * factor * extent();
    return {c - h, c + h};
  }

  static Aabb of_points(std::span<const Vec3> points) {
    Aabb box;
    box.min = Vec3::Constant(kInf);
    box.max = Vec3::Constant(-kInf);
    for (const Vec3& p : points) {
      box.min = box.min.cwiseMin(p);
      box.max = box.max.cwiseMax(p);
    }
    return box;
  }
};

} // namespace rfpc
