// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rfpc/image.hpp"
#include "rfpc/rng.hpp"

namespace rfpc {

/// Boolean edge mask with the dimensions of the source image.
struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> mask; // row-major, nonzero = edge

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool at(int x, int y) const {
    return mask[static_cast<size_t>(y) * width + x] != 0;
  }
  size_t edge_count() const;
};

/// Canny edge detector: Gaussian blur, Sobel gradients, non-maximum
/// suppression, double-threshold hysteresis. Thresholds apply to gradient
/// magnitudes normalized by the image maximum, so they live on [0, 1].
/// Requires 0 < low_threshold < high_threshold.
EdgeMap detect_edges(const ImageBuffer& image, double blur_sigma = 1.4,
                     double low_threshold = 0.1, double high_threshold = 0.2);

/// Single-threaded reference; bitwise identical to detect_edges.
EdgeMap detect_edges_serial(const ImageBuffer& image, double blur_sigma = 1.4,
                            double low_threshold = 0.1,
                            double high_threshold = 0.2);

/// All pixels of the integer segment from a to b, endpoints included.
std::vector<Eigen::Vector2i> bresenham_segment(const Eigen::Vector2i& a,
                                               const Eigen::Vector2i& b);

/// Three pixels on one image: the midpoint q1 and the symmetric endpoints
/// q0, q2. Candidates satisfy q1 = (q0+q2)/2 exactly, |q0-q2| bounded, and an
/// edge-free Bresenham segment.
struct PixelTriplet {
  Eigen::Vector2i q0 = Eigen::Vector2i::Zero();
  Eigen::Vector2i q1 = Eigen::Vector2i::Zero();
  Eigen::Vector2i q2 = Eigen::Vector2i::Zero();
  std::string image_id;
  bool is_collinear_candidate = false;
};

/// Deterministic part of triplet sampling: given the midpoint q1, search 16
/// discrete directions for the longest centered edge-free segment (Euclidean
/// half-length capped at max_segment/2, ties broken by direction index).
PixelTriplet triplet_at(const EdgeMap& edges, const Eigen::Vector2i& q1,
                        double max_segment = 40.0);

/// Draws q1 uniformly. Midpoints on an edge produce a non-candidate triplet
/// with q0 and q2 drawn uniformly as well; all other midpoints defer to
/// triplet_at.
PixelTriplet sample_triplet(const EdgeMap& edges, Rng& rng,
                            double max_segment = 40.0);

} // namespace rfpc
