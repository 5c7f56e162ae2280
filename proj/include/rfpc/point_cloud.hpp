// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "rfpc/geometry.hpp"

namespace rfpc {

struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Vec3> colors; // empty, or one RGB in [0,1] per position

  size_t size() const { return positions.size(); }
  bool has_colors() const { return !colors.empty(); }

  void push_back(const Vec3& p) { positions.push_back(p); }
  void push_back(const Vec3& p, const Vec3& c) {
    positions.push_back(p);
    colors.push_back(c);
  }
};

/// Binary little-endian PLY, float positions, uchar colors.
void save_ply(const PointCloud& cloud, const std::string& path);
PointCloud load_ply(const std::string& path);

} // namespace rfpc
