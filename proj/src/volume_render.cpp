// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/volume_render.hpp"

#include <algorithm>
#include <cmath>

#include "rfpc/errors.hpp"

namespace rfpc {

namespace {

constexpr double kMinWeightMass = 1e-12;

void query_field(const RadianceField& field, const RaySamples& samples,
                 size_t begin, std::vector<double>* densities,
                 std::vector<Vec3>* colors) {
  for (size_t i = begin; i < samples.size(); ++i) {
    const FieldSample s = field.query(samples.position(i), samples.direction);
    (*densities)[i] = s.density;
    (*colors)[i] = s.color;
  }
}

/// Deterministic inverse-CDF draw of n extra samples with per-bin mass
/// proportional to the first-pass weights plus a small uniform floor.
std::vector<double> resample_distances(const RaySamples& pass1,
                                       std::span<const double> weights,
                                       double total_mass) {
  const size_t n = pass1.size();
  const double floor_mass = 0.01 * total_mass / static_cast<double>(n);
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (size_t k = 0; k < n; ++k) {
    acc += weights[k] + floor_mass;
    cdf[k] = acc;
  }
  std::vector<double> extra(n);
  size_t k = 0;
  for (size_t j = 0; j < n; ++j) {
    const double u = (static_cast<double>(j) + 0.5) /
                     static_cast<double>(n) * acc;
    while (k + 1 < n && cdf[k] <= u) ++k;
    const double mass = weights[k] + floor_mass;
    const double lo = cdf[k] - mass;
    const double frac = mass > 0.0 ? std::clamp((u - lo) / mass, 0.0, 1.0) : 0.5;
    const double bin_start = pass1.distances[k] - 0.5 * pass1.intervals[k];
    extra[j] = bin_start + frac * pass1.intervals[k];
  }
  return extra;
}

RaySamples merge_samples(const RaySamples& pass1,
                         const std::vector<double>& extra, double far) {
  RaySamples merged;
  merged.origin = pass1.origin;
  merged.direction = pass1.direction;
  const size_t n = pass1.size();
  merged.distances.resize(2 * n);
  std::merge(pass1.distances.begin(), pass1.distances.end(), extra.begin(),
             extra.end(), merged.distances.begin());
  merged.intervals.resize(2 * n);
  const double min_delta = 1e-12 * far;
  for (size_t i = 0; i + 1 < merged.distances.size(); ++i) {
    merged.intervals[i] =
        std::max(merged.distances[i + 1] - merged.distances[i], min_delta);
  }
  merged.intervals.back() =
      std::max(far - merged.distances.back(), min_delta);
  return merged;
}

RayRender render_ray(const RadianceField& field, const Ray& ray,
                     const RenderConfig& config, uint64_t key_a, uint64_t key_b,
                     bool want_color) {
  Rng jitter = stream_rng(config.seed, key_a, key_b, 0x5a6d7e8fULL);
  Rng* jitter_ptr = config.jitter ? &jitter : nullptr;
  RaySamples samples =
      sample_ray(ray, config.near, config.far, config.samples_per_ray,
                 jitter_ptr);
  samples.densities.resize(samples.size());
  samples.colors.resize(samples.size());
  query_field(field, samples, 0, &samples.densities, &samples.colors);
  std::vector<double> weights =
      compositing_weights(samples.densities, samples.intervals);

  if (config.resample) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total > kMinWeightMass) {
      const std::vector<double> extra =
          resample_distances(samples, weights, total);
      RaySamples merged = merge_samples(samples, extra, config.far);
      merged.densities.resize(merged.size());
      merged.colors.resize(merged.size());
      // First-pass samples keep their cached field values; only the
      // resampled positions are queried again.
      size_t src = 0, ext = 0;
      for (size_t i = 0; i < merged.size(); ++i) {
        const bool from_pass1 =
            ext >= extra.size() ||
            (src < samples.size() &&
             samples.distances[src] <= extra[ext]);
        if (from_pass1) {
          merged.densities[i] = samples.densities[src];
          merged.colors[i] = samples.colors[src];
          ++src;
        } else {
          const FieldSample s =
              field.query(merged.position(i), merged.direction);
          merged.densities[i] = s.density;
          merged.colors[i] = s.color;
          ++ext;
        }
      }
      samples = std::move(merged);
      weights = compositing_weights(samples.densities, samples.intervals);
    }
  }

  RayRender out;
  const DepthResult depth = render_depth(weights, samples.distances);
  out.depth = depth.depth;
  out.status = depth.status;
  if (want_color) {
    if (config.color_mode == ColorMode::standard) {
      out.color = render_color_standard(weights, samples.colors);
    } else if (depth.status == RayStatus::accepted) {
      const CsdResult csd = render_color_csd(
          weights, samples.colors, samples.distances, depth.depth, config.eps4);
      out.color = csd.color;
      out.status = csd.status;
    }
  }
  out.weights = std::move(weights);
  out.distances = std::move(samples.distances);
  return out;
}

} // namespace

RaySamples sample_ray(const Ray& ray, double near, double far, int n,
                      Rng* jitter) {
  if (!(near > 0.0) || !(far > near)) {
    throw BadRange("sample_ray: need 0 < near < far");
  }
  if (n < 1) throw BadRange("sample_ray: need n >= 1");

  RaySamples samples;
  samples.origin = ray.origin;
  samples.direction = ray.direction;
  samples.distances.resize(n);
  samples.intervals.assign(n, (far - near) / n);
  const double delta = (far - near) / n;
  for (int k = 0; k < n; ++k) {
    const double frac = jitter ? jitter->next_double() : 0.5;
    samples.distances[k] = near + (k + frac) * delta;
  }
  return samples;
}

std::vector<double> compositing_weights(std::span<const double> densities,
                                        std::span<const double> intervals) {
  std::vector<double> weights(densities.size());
  double transmittance = 1.0;
  // Running left-to-right total as any consumer would recompute it; the
  // telescoped weight is clamped so that total can never round above 1.
  double total = 0.0;
  for (size_t i = 0; i < densities.size(); ++i) {
    const double next = transmittance * std::exp(-densities[i] * intervals[i]);
    double w = transmittance - next;
    if (total + w > 1.0) w = 1.0 - total;
    weights[i] = w;
    total += w;
    transmittance = next;
  }
  return weights;
}

DepthResult render_depth(std::span<const double> weights,
                         std::span<const double> distances) {
  double cumulative = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (cumulative > 0.5) {
      return {distances[i], static_cast<int>(i), RayStatus::accepted};
    }
  }
  return {kInf, -1, RayStatus::rejected_infinite_depth};
}

Vec3 render_color_standard(std::span<const double> weights,
                           std::span<const Vec3> colors) {
  Vec3 c = Vec3::Zero();
  for (size_t i = 0; i < weights.size(); ++i) c += weights[i] * colors[i];
  return c;
}

CsdResult render_color_csd(std::span<const double> weights,
                           std::span<const Vec3> colors,
                           std::span<const double> distances, double depth,
                           double eps4) {
  if (!std::isfinite(depth)) {
    return {Vec3::Zero(), RayStatus::rejected_infinite_depth};
  }
  const double lo = depth * (1.0 - eps4);
  const double hi = depth * (1.0 + eps4);
  double total = 0.0;
  double windowed = 0.0;
  bool any = false;
  for (size_t i = 0; i < weights.size(); ++i) {
    total += weights[i];
    if (distances[i] >= lo && distances[i] <= hi) {
      windowed += weights[i];
      any = true;
    }
  }
  if (!any || windowed <= 0.0) {
    return {Vec3::Zero(), RayStatus::rejected_empty_window};
  }
  const double factor = total / windowed;
  Vec3 c = Vec3::Zero();
  for (size_t i = 0; i < weights.size(); ++i) {
    if (distances[i] >= lo && distances[i] <= hi) {
      c += (weights[i] * factor) * colors[i];
    }
  }
  return {c, RayStatus::accepted};
}

RayRender render_pixel(const RadianceField& field, const Ray& ray,
                       const RenderConfig& config, uint64_t jitter_key_a,
                       uint64_t jitter_key_b) {
  return render_ray(field, ray, config, jitter_key_a, jitter_key_b, true);
}

RayRender render_ray_depth(const RadianceField& field, const Ray& ray,
                           const RenderConfig& config, uint64_t jitter_key_a,
                           uint64_t jitter_key_b) {
  return render_ray(field, ray, config, jitter_key_a, jitter_key_b, false);
}

} // namespace rfpc
