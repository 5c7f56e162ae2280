// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/train.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rfpc/edges.hpp"
#include "rfpc/errors.hpp"
#include "rfpc/rng.hpp"

namespace rfpc {

namespace {

constexpr uint64_t kTripletStream = 0x7a31;
constexpr double kMinMass = 1e-8;
constexpr int kChunkRays = 16; // fixed reduction granularity

void validate_config(const TrainConfig& config) {
  if (config.samples_per_ray < 1) {
    throw ConfigError("training needs at least one sample per ray");
  }
  if (!(config.near > 0.0) || !(config.far > config.near)) {
    throw ConfigError("training needs 0 < near < far");
  }
  if (config.batch_triplets < 1) {
    throw ConfigError("training batch needs at least one triplet");
  }
  if (config.iterations < 0) {
    throw ConfigError("iteration count cannot be negative");
  }
  if (!(config.learning_rate > 0.0)) {
    throw ConfigError("learning rate must be positive");
  }
  if (config.lambda_col < 0.0) {
    throw ConfigError("collinearity weight cannot be negative");
  }
  if (!(config.adam_beta1 >= 0.0 && config.adam_beta1 < 1.0) ||
      !(config.adam_beta2 >= 0.0 && config.adam_beta2 < 1.0)) {
    throw ConfigError("adam decay rates must lie in [0, 1)");
  }
}

double sample_distance(const TrainConfig& config, int s) {
  const double delta =
      (config.far - config.near) / config.samples_per_ray;
  return config.near + (s + 0.5) * delta;
}

/// Per-ray forward cache: everything phase B and C need without keeping the
/// full per-sample network state alive.
struct RayCache {
  std::vector<double> sigma;
  std::vector<double> weight;
  std::vector<double> tmit_next; // transmittance after each sample
  std::vector<Vec3> color;
  // Full per-sample network state, kept only when gradients are requested so
  // the backward pass does not re-run the field.
  std::vector<ToyHashField::Forward> fwd;
  Vec3 rendered = Vec3::Zero();
  double weight_sum = 0.0;
  double depth = 0.0;
  // Upstream gradients filled in phase B.
  Vec3 g_color = Vec3::Zero();
  double g_depth = 0.0;
};

void forward_ray(const ToyHashField& field, const Ray& ray,
                 const TrainConfig& config, RayCache& cache,
                 bool keep_forward) {
  const int n = config.samples_per_ray;
  const double delta = (config.far - config.near) / n;
  cache.sigma.resize(n);
  cache.weight.resize(n);
  cache.tmit_next.resize(n);
  cache.color.resize(n);
  if (keep_forward) cache.fwd.resize(n);

  double tmit = 1.0;
  Vec3 rendered = Vec3::Zero();
  double mass = 0.0;
  double depth_raw = 0.0;
  for (int s = 0; s < n; ++s) {
    const double t = sample_distance(config, s);
    const Vec3 p = ray.origin + t * ray.direction;
    ToyHashField::Forward fwd = field.forward(p, ray.direction);
    const double a = std::exp(-fwd.sigma * delta);
    const double w = tmit * (1.0 - a);
    tmit *= a;
    cache.sigma[s] = fwd.sigma;
    cache.color[s] = fwd.color;
    cache.weight[s] = w;
    cache.tmit_next[s] = tmit;
    rendered += w * fwd.color;
    mass += w;
    depth_raw += w * t;
    if (keep_forward) cache.fwd[s] = std::move(fwd);
  }
  cache.rendered = rendered;
  cache.weight_sum = mass;
  cache.depth = depth_raw / std::max(mass, kMinMass);
  cache.g_color = Vec3::Zero();
  cache.g_depth = 0.0;
}

void validate_batch(const SupervisionBatch& batch) {
  if (batch.rays.empty()) throw EmptySet("gradient batch has no rays");
  const int n = static_cast<int>(batch.rays.size());
  for (const TripletSupervision& t : batch.triplets) {
    const bool ok = t.ray0 >= 0 && t.ray0 < n && t.ray1 >= 0 && t.ray1 < n &&
                    t.ray2 >= 0 && t.ray2 < n;
    if (!ok) throw ConfigError("triplet ray index out of range");
  }
}

BatchLoss run_batch(const ToyHashField& field, const SupervisionBatch& batch,
                    const TrainConfig& config, std::span<double> grad) {
  validate_config(config);
  validate_batch(batch);
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != field.param_count()) {
    throw ConfigError("gradient span does not match the parameter count");
  }

  const int num_rays = static_cast<int>(batch.rays.size());
  const int n = config.samples_per_ray;
  const double delta = (config.far - config.near) / n;
  std::vector<RayCache> caches(num_rays);

#pragma omp parallel for schedule(static)
  for (int r = 0; r < num_rays; ++r) {
    forward_ray(field, batch.rays[r].ray, config, caches[r], want_grad);
  }

  BatchLoss loss;
  for (int r = 0; r < num_rays; ++r) {
    const Vec3 residual = caches[r].rendered - batch.rays[r].target_color;
    loss.photometric += residual.squaredNorm();
    caches[r].g_color = (2.0 / num_rays) * residual;
  }
  loss.photometric /= num_rays;

  if (!batch.triplets.empty()) {
    const double scale =
        config.lambda_col / static_cast<double>(batch.triplets.size());
    for (const TripletSupervision& t : batch.triplets) {
      const RayCache& r0 = caches[t.ray0];
      const RayCache& r1 = caches[t.ray1];
      const RayCache& r2 = caches[t.ray2];
      const CollinearityTerms terms = collinearity_loss(
          r0.depth, r1.depth, r2.depth, t.c0, t.c1, t.c2,
          batch.rays[t.ray0].ray.direction, batch.rays[t.ray1].ray.direction,
          batch.rays[t.ray2].ray.direction, config.collinearity);
      loss.collinearity += terms.loss;
      caches[t.ray0].g_depth += scale * terms.d_loss_d0;
      caches[t.ray1].g_depth += scale * terms.d_loss_d1;
      caches[t.ray2].g_depth += scale * terms.d_loss_d2;
    }
    loss.collinearity /= static_cast<double>(batch.triplets.size());
  }
  loss.total = loss.photometric + config.lambda_col * loss.collinearity;
  if (!want_grad) return loss;

  std::fill(grad.begin(), grad.end(), 0.0);
  const int num_chunks = (num_rays + kChunkRays - 1) / kChunkRays;
  std::vector<std::vector<double>> chunk_grads(num_chunks);

#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < num_chunks; ++c) {
    std::vector<double>& out = chunk_grads[c];
    out.assign(field.param_count(), 0.0);
    std::vector<double> d_sigma(n);
    const int ray_end = std::min(num_rays, (c + 1) * kChunkRays);
    for (int r = c * kChunkRays; r < ray_end; ++r) {
      const RayCache& cache = caches[r];
      if (cache.g_depth == 0.0 && cache.g_color == Vec3::Zero()) continue;

      // d(loss)/d(sigma_s) through the compositing weights: each weight
      // feeds the color sum and the normalized expected depth.
      const double mass = std::max(cache.weight_sum, kMinMass);
      const bool live = cache.weight_sum > kMinMass;
      double suffix = 0.0; // sum over later samples of w_j * dL/dw_j
      for (int s = n - 1; s >= 0; --s) {
        const double t = sample_distance(config, s);
        const double d_depth_dw =
            (t - (live ? cache.depth : 0.0)) / mass;
        const double g_w =
            cache.g_color.dot(cache.color[s]) + cache.g_depth * d_depth_dw;
        d_sigma[s] = delta * (cache.tmit_next[s] * g_w - suffix);
        suffix += cache.weight[s] * g_w;
      }

      for (int s = 0; s < n; ++s) {
        const Vec3 d_color = cache.weight[s] * cache.g_color;
        if (d_sigma[s] == 0.0 && d_color == Vec3::Zero()) continue;
        field.backward(cache.fwd[s], d_sigma[s], d_color, out);
      }
    }
  }
  for (const std::vector<double>& part : chunk_grads) {
    for (size_t i = 0; i < grad.size(); ++i) grad[i] += part[i];
  }
  return loss;
}

} // namespace

RayForwardSummary render_training_ray(const ToyHashField& field,
                                      const Ray& ray,
                                      const TrainConfig& config) {
  validate_config(config);
  RayCache cache;
  forward_ray(field, ray, config, cache, false);
  return {cache.rendered, cache.depth, cache.weight_sum};
}

BatchLoss evaluate_batch(const ToyHashField& field,
                         const SupervisionBatch& batch,
                         const TrainConfig& config) {
  return run_batch(field, batch, config, {});
}

BatchLoss field_gradients(const ToyHashField& field,
                          const SupervisionBatch& batch,
                          const TrainConfig& config, std::span<double> grad) {
  if (grad.empty()) {
    throw ConfigError("field_gradients needs a gradient span");
  }
  return run_batch(field, batch, config, grad);
}

TrainResult train_toy(ToyHashField& field,
                      const std::vector<CameraPose>& poses,
                      const std::vector<ImageBuffer>& images,
                      const TrainConfig& config) {
  validate_config(config);
  if (poses.empty()) throw ConfigError("training needs at least one view");
  if (poses.size() != images.size()) {
    throw ConfigError("pose and image counts differ");
  }
  for (size_t i = 0; i < poses.size(); ++i) {
    if (images[i].width != poses[i].width ||
        images[i].height != poses[i].height) {
      throw ConfigError("image size does not match its pose");
    }
    if (images[i].width < 3 || images[i].height < 3) {
      throw ConfigError("training images must be at least 3x3");
    }
  }

  std::vector<EdgeMap> edge_maps;
  edge_maps.reserve(images.size());
  for (const ImageBuffer& image : images) {
    edge_maps.push_back(detect_edges(image, config.edge_blur_sigma,
                                     config.edge_low, config.edge_high));
  }

  const size_t params = field.param_count();
  std::vector<double> grad(params);
  std::vector<double> m(params, 0.0);
  std::vector<double> v(params, 0.0);

  TrainResult result;
  result.loss_history.reserve(config.iterations);
  result.photometric_history.reserve(config.iterations);
  result.collinearity_history.reserve(config.iterations);

  for (int iter = 0; iter < config.iterations; ++iter) {
    SupervisionBatch batch;
    batch.rays.reserve(static_cast<size_t>(config.batch_triplets) * 3);
    for (int t = 0; t < config.batch_triplets; ++t) {
      Rng rng = stream_rng(config.seed, kTripletStream,
                           static_cast<uint64_t>(iter),
                           static_cast<uint64_t>(t));
      const size_t img = rng.next_below(images.size());
      const PixelTriplet triplet = sample_triplet(
          edge_maps[img], rng, config.collinearity.max_segment);
      const int base = static_cast<int>(batch.rays.size());
      for (const Eigen::Vector2i& q : {triplet.q0, triplet.q1, triplet.q2}) {
        RaySupervision ray;
        ray.ray = pixel_ray(poses[img], Vec2(q.x() + 0.5, q.y() + 0.5));
        ray.target_color = images[img].rgb(q.x(), q.y());
        batch.rays.push_back(ray);
      }
      if (triplet.is_collinear_candidate) {
        batch.triplets.push_back({base, base + 1, base + 2,
                                  images[img].rgb(triplet.q0.x(), triplet.q0.y()),
                                  images[img].rgb(triplet.q1.x(), triplet.q1.y()),
                                  images[img].rgb(triplet.q2.x(), triplet.q2.y())});
      }
    }

    const BatchLoss loss = run_batch(field, batch, config, grad);
    result.loss_history.push_back(loss.total);
    result.photometric_history.push_back(loss.photometric);
    result.collinearity_history.push_back(loss.collinearity);

    const double step = iter + 1.0;
    const double bias1 = 1.0 - std::pow(config.adam_beta1, step);
    const double bias2 = 1.0 - std::pow(config.adam_beta2, step);
    std::vector<double>& p = field.params();
    for (size_t i = 0; i < params; ++i) {
      m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * grad[i];
      v[i] = config.adam_beta2 * v[i] +
             (1.0 - config.adam_beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_eps);
    }
  }
  return result;
}

} // namespace rfpc
