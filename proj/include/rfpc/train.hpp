// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "rfpc/camera.hpp"
#include "rfpc/collinearity.hpp"
#include "rfpc/geometry.hpp"
#include "rfpc/hash_field.hpp"
#include "rfpc/image.hpp"

namespace rfpc {

struct TrainConfig {
  int iterations = 2000;
  int batch_triplets = 32; // three rays per triplet
  int samples_per_ray = 128;
  double near = 0.05;
  double far = 100.0;
  double learning_rate = 0.01;
  double lambda_col = 0.1; // weight of the collinearity term
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 0;
  // Also provides the segment cap. The depth gate is opened far wider than
  // the extraction-time default: mid-training depths are noisy, and the
  // tight gate silently zeroes the term.
  CollinearityParams collinearity{.eps2 = 0.1};
  double edge_blur_sigma = 1.4;
  double edge_low = 0.1;
  double edge_high = 0.2;
};

/// One supervised ray: pixel ray plus the ground-truth color under it.
struct RaySupervision {
  Ray ray;
  Vec3 target_color = Vec3::Zero();
};

/// Collinearity term over three rays of the batch; c0..c2 are the
/// ground-truth pixel colors feeding the color-similarity weight.
struct TripletSupervision {
  int ray0 = 0;
  int ray1 = 0;
  int ray2 = 0;
  Vec3 c0 = Vec3::Zero();
  Vec3 c1 = Vec3::Zero();
  Vec3 c2 = Vec3::Zero();
};

struct SupervisionBatch {
  std::vector<RaySupervision> rays;
  std::vector<TripletSupervision> triplets;
};

struct BatchLoss {
  double total = 0.0;
  double photometric = 0.0; // mean squared color error per ray
  double collinearity = 0.0; // mean collinearity loss per listed triplet
};

/// Differentiable render of one training ray: stratified midpoint samples,
/// alpha compositing, and mass-normalized expected depth.
struct RayForwardSummary {
  Vec3 color = Vec3::Zero();
  double depth = 0.0;
  double weight_sum = 0.0;
};
RayForwardSummary render_training_ray(const ToyHashField& field,
                                      const Ray& ray,
                                      const TrainConfig& config);

/// Loss of a batch without touching gradients.
BatchLoss evaluate_batch(const ToyHashField& field,
                         const SupervisionBatch& batch,
                         const TrainConfig& config);

/// Overwrites grad (size = field.param_count()) with d(total)/d(params).
/// Ray gradients are reduced in fixed chunk order, so the result does not
/// depend on thread count.
BatchLoss field_gradients(const ToyHashField& field,
                          const SupervisionBatch& batch,
                          const TrainConfig& config, std::span<double> grad);

struct TrainResult {
  std::vector<double> loss_history; // total loss per iteration
  std::vector<double> photometric_history;
  std::vector<double> collinearity_history;
};

/// Adam-driven stochastic descent on photometric + collinearity loss with
/// counter-seeded triplet batches; deterministic under a fixed seed.
TrainResult train_toy(ToyHashField& field,
                      const std::vector<CameraPose>& poses,
                      const std::vector<ImageBuffer>& images,
                      const TrainConfig& config);

} // namespace rfpc
