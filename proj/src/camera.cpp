// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/camera.hpp"

#include <cmath>

#include "rfpc/errors.hpp"

namespace rfpc {

double orthonormality_error(const Mat3& rotation) {
  const Mat3 residual = rotation * rotation.transpose() - Mat3::Identity();
  return residual.cwiseAbs().maxCoeff();
}

CameraPose make_camera_pose(std::string id, const Vec3& origin, const Mat3& rotation,
                            double fx, double fy, double cx, double cy,
                            int width, int height) {
  if (fx <= 0.0 || fy <= 0.0 || width <= 0 || height <= 0) {
    throw InvalidPose("camera '" + id + "': focal and image size must be positive");
  }
  Mat3 r = rotation;
  const double err = orthonormality_error(r);
  if (err > 1e-3) {
    throw InvalidPose("camera '" + id + "': rotation is not orthonormal (residual " +
                      std::to_string(err) + ")");
  }
  if (err > 1e-6) {
    // Snap to the nearest rotation via the orthogonal polar factor.
    Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    r = svd.matrixU() * svd.matrixV().transpose();
  }
  if (r.determinant() < 0.0) {
    throw InvalidPose("camera '" + id + "': rotation has negative determinant");
  }

  CameraPose pose;
  pose.id = std::move(id);
  pose.origin = origin;
  pose.rotation = r;
  pose.viewing_direction = (r * Vec3(0.0, 0.0, -1.0)).normalized();
  pose.fx = fx;
  pose.fy = fy;
  pose.cx = cx;
  pose.cy = cy;
  pose.width = width;
  pose.height = height;
  return pose;
}

Ray pixel_ray(const CameraPose& pose, const Vec2& pixel) {
  if (pixel.x() < 0.0 || pixel.x() > pose.width || pixel.y() < 0.0 ||
      pixel.y() > pose.height) {
    throw OutOfBounds("pixel (" + std::to_string(pixel.x()) + ", " +
                      std::to_string(pixel.y()) + ") outside image bounds");
  }
  // Image y grows downward while camera +Y points up.
  const Vec3 dir_cam((pixel.x() - pose.cx) / pose.fx,
                     -(pixel.y() - pose.cy) / pose.fy, -1.0);
  return Ray{pose.origin, (pose.rotation * dir_cam).normalized()};
}

CameraPose look_at_pose(std::string id, const Vec3& position, const Vec3& target,
                        double fx, double fy, double cx, double cy,
                        int width, int height, const Vec3& up_hint) {
  const Vec3 forward = (target - position).normalized();
  Vec3 up = up_hint;
  if (std::abs(forward.dot(up.normalized())) > 1.0 - 1e-9) {
    up = Vec3(0.0, 1.0, 0.0);
    if (std::abs(forward.dot(up)) > 1.0 - 1e-9) up = Vec3(1.0, 0.0, 0.0);
  }
  const Vec3 z_cam = -forward;
  const Vec3 y_cam = (up - up.dot(forward) * forward).normalized();
  const Vec3 x_cam = y_cam.cross(z_cam);
  Mat3 rotation;
  rotation.col(0) = x_cam;
  rotation.col(1) = y_cam;
  rotation.col(2) = z_cam;
  return make_camera_pose(std::move(id), position, rotation, fx, fy, cx, cy,
                          width, height);
}

} // namespace rfpc
