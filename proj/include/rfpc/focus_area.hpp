// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "rfpc/geometry.hpp"

namespace rfpc {

/// Axis-aligned cube around a detected concentration of camera focus.
struct FocusArea {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::vector<std::string> member_camera_ids;
  // Set when the member cameras gave no usable depth signal (flat search
  // objective, e.g. parallel rays).
  bool low_confidence = false;

  Aabb cube() const {
    return Aabb{center.array() - radius, center.array() + radius};
  }
};

} // namespace rfpc
