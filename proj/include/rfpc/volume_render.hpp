// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rfpc/field.hpp"
#include "rfpc/geometry.hpp"
#include "rfpc/rng.hpp"

namespace rfpc {

enum class RayStatus {
  accepted,
  rejected_infinite_depth,
  rejected_empty_window,
};

enum class ColorMode { standard, csd };

/// Discretized ray. Directions are unit vectors, so the distance t_i along
/// the ray doubles as the sample depth d_i = |o - p_i|.
struct RaySamples {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::Zero();
  std::vector<double> distances; // ascending
  std::vector<double> intervals; // delta_i > 0
  std::vector<double> densities;
  std::vector<Vec3> colors;

  size_t size() const { return distances.size(); }
  Vec3 position(size_t i) const { return origin + distances[i] * direction; }
};

/// Stratified sampling of [near, far] into n equal bins; midpoints when rng
/// is null, uniform within each bin otherwise.
RaySamples sample_ray(const Ray& ray, double near, double far, int n,
                      Rng* jitter = nullptr);

/// w_i = T_i - T_{i+1} with T_{i+1} = T_i * exp(-sigma_i * delta_i). The
/// telescoping form keeps the naive running sum of weights at or below 1.
std::vector<double> compositing_weights(std::span<const double> densities,
                                        std::span<const double> intervals);

struct DepthResult {
  double depth = kInf;
  int index = -1; // first index where cumulative weight exceeds 0.5
  RayStatus status = RayStatus::rejected_infinite_depth;
};

DepthResult render_depth(std::span<const double> weights,
                         std::span<const double> distances);

Vec3 render_color_standard(std::span<const double> weights,
                           std::span<const Vec3> colors);

struct CsdResult {
  Vec3 color = Vec3::Zero();
  RayStatus status = RayStatus::accepted;
};

/// Restricts color compositing to samples whose depth lies within a relative
/// window around the rendered depth, renormalized to the total weight mass.
CsdResult render_color_csd(std::span<const double> weights,
                           std::span<const Vec3> colors,
                           std::span<const double> distances, double depth,
                           double eps4);

struct RenderConfig {
  int samples_per_ray = 256;
  double near = 0.05;
  double far = 100.0;
  double eps4 = 0.0025;
  ColorMode color_mode = ColorMode::csd;
  /// One deterministic weight-proportional resampling round that
  /// concentrates samples near surfaces before the final compositing.
  bool resample = true;
  bool jitter = false;
  uint64_t seed = 0;
};

struct RayRender {
  std::vector<double> weights;
  std::vector<double> distances;
  double depth = kInf;
  Vec3 color = Vec3::Zero();
  RayStatus status = RayStatus::rejected_infinite_depth;
};

/// Samples the ray, queries the field, optionally resamples proportionally
/// to first-pass weights, and renders depth plus color in the configured
/// mode. jitter_key_* select an independent reproducible jitter stream.
RayRender render_pixel(const RadianceField& field, const Ray& ray,
                       const RenderConfig& config, uint64_t jitter_key_a = 0,
                       uint64_t jitter_key_b = 0);

/// Depth-only variant: skips color work; used by patch depth checks.
RayRender render_ray_depth(const RadianceField& field, const Ray& ray,
                           const RenderConfig& config,
                           uint64_t jitter_key_a = 0,
                           uint64_t jitter_key_b = 0);

} // namespace rfpc
