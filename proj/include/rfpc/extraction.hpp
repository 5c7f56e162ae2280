// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rfpc/camera.hpp"
#include "rfpc/field.hpp"
#include "rfpc/geometry.hpp"
#include "rfpc/point_cloud.hpp"
#include "rfpc/volume_render.hpp"

namespace rfpc {

struct ExtractionConfig {
  long long target_points = 10000;
  int patch_w = 3; // odd; 1x1 disables the patch depth filter
  int patch_h = 3;
  double eps3 = 0.0025; // relative slack of the patch depth filter, in (0,1)
  std::optional<Aabb> bounds;
  uint64_t seed = 0;
  RenderConfig render; // samples, near/far, and color mode per center ray
  long long max_attempts = 1000000;
  int batch_size = 4096;
};

struct ExtractionStats {
  long long attempted = 0;
  long long accepted = 0;
  long long rejected_infinite_depth = 0;
  long long rejected_empty_window = 0;
  long long rejected_out_of_bounds = 0;
  long long rejected_sdd = 0;
  uint64_t field_queries = 0;
};

enum class ExtractionOutcome {
  complete,
  exhausted, // max_attempts reached first; the cloud is partial
};

struct ExtractionResult {
  PointCloud cloud;
  ExtractionStats stats;
  ExtractionOutcome outcome = ExtractionOutcome::complete;
};

/// One-sided patch depth test: accept unless some patch ray reports a depth
/// below (1 - eps3) times the center depth. Infinite entries never reject;
/// an all-infinite (or empty) patch accepts.
bool sdd_accept(double center_depth, std::span<const double> patch_depths,
                double eps3);

/// Two-step extraction: centers are rendered first and only survivors of the
/// depth/window/bounds checks pay for their patch rays.
ExtractionResult extract_point_cloud(const RadianceField& field,
                                     const std::vector<CameraPose>& poses,
                                     const ExtractionConfig& config);

/// Renders every patch ray for every candidate before filtering. Identical
/// output to extract_point_cloud under the same seed; strictly more queries.
ExtractionResult extract_naive(const RadianceField& field,
                               const std::vector<CameraPose>& poses,
                               const ExtractionConfig& config);

} // namespace rfpc
