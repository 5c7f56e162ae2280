// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "rfpc/geometry.hpp"

namespace rfpc {

/// One registered camera. Rotation maps camera frame to world; the optical
/// axis is -Z in the camera frame, +X right, +Y up (image y grows downward).
struct CameraPose {
  std::string id;
  Vec3 origin{Vec3::Zero()};
  Mat3 rotation{Mat3::Identity()};
  Vec3 viewing_direction{0.0, 0.0, -1.0};
  double fx = 0.0, fy = 0.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;
};

/// Validates intrinsics and the rotation, re-orthonormalizing when it is
/// within 1e-3 of orthonormal. Throws InvalidPose otherwise. The viewing
/// direction is derived as rotation * (0,0,-1).
CameraPose make_camera_pose(std::string id, const Vec3& origin, const Mat3& rotation,
                            double fx, double fy, double cx, double cy,
                            int width, int height);

/// Max-norm of R*R^T - I.
double orthonormality_error(const Mat3& rotation);

/// Back-projects a continuous pixel coordinate through the pinhole model.
/// Throws OutOfBounds when the pixel lies outside [0,w] x [0,h].
Ray pixel_ray(const CameraPose& pose, const Vec2& pixel);

/// Camera at `position` aimed at `target`. The up hint resolves the roll;
/// a hint parallel to the view direction falls back to +Y then +X.
CameraPose look_at_pose(std::string id, const Vec3& position, const Vec3& target,
                        double fx, double fy, double cx, double cy,
                        int width, int height,
                        const Vec3& up_hint = Vec3(0.0, 0.0, 1.0));

} // namespace rfpc
