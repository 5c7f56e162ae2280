// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "rfpc/errors.hpp"
#include "rfpc/fixtures.hpp"
#include "rfpc/rng.hpp"
#include "rfpc/train.hpp"

using namespace rfpc;

namespace {

ToyFieldConfig small_field_config() {
  ToyFieldConfig config;
  config.levels = 4;
  config.table_size = 1 << 10;
  config.head_width = 16;
  config.geo_features = 7;
  config.seed = 3;
  return config;
}

ToyHashField small_field() {
  return ToyHashField(small_field_config(), Aabb{Vec3(-1, -1, -1), Vec3(1, 1, 1)},
                      {});
}

TrainConfig small_train_config() {
  TrainConfig config;
  config.samples_per_ray = 16;
  config.near = 0.5;
  config.far = 3.0;
  return config;
}

/// A little batch of rays through the unit box with fixed targets; the two
/// triplets use a wide-open depth gate so the collinearity path carries
/// gradients.
SupervisionBatch probe_batch(uint64_t seed) {
  SupervisionBatch batch;
  Rng rng = stream_rng(seed, 0xba7cULL);
  for (int r = 0; r < 6; ++r) {
    RaySupervision ray;
    ray.ray.origin = Vec3(0.1 * r - 0.25, 0.05 * r - 0.1, -2.0);
    Vec3 dir(0.08 * rng.next_double() - 0.04, 0.08 * rng.next_double() - 0.04,
             1.0);
    ray.ray.direction = dir.normalized();
    ray.target_color =
        Vec3(rng.next_double(), rng.next_double(), rng.next_double());
    batch.rays.push_back(ray);
  }
  batch.triplets.push_back({0, 1, 2, Vec3(0.4, 0.4, 0.4), Vec3(0.42, 0.4, 0.4),
                            Vec3(0.4, 0.44, 0.4)});
  batch.triplets.push_back({3, 4, 5, Vec3(0.7, 0.2, 0.1), Vec3(0.7, 0.2, 0.1),
                            Vec3(0.7, 0.2, 0.1)});
  return batch;
}

} // namespace

TEST_CASE("batch gradients match central finite differences") {
  ToyHashField field = small_field();
  // Spread the parameters away from the fresh-init point: there every hidden
  // preactivation sits within the probe step of a piecewise-linear kink, and
  // central differences would measure the kink instead of the slope.
  Rng noise = stream_rng(5, 0x9a01);
  for (double& p : field.params()) p += noise.next_range(-0.35, 0.35);
  const SupervisionBatch batch = probe_batch(11);
  TrainConfig config = small_train_config();
  config.collinearity.eps2 = 10.0; // keep the depth gate open
  config.lambda_col = 0.05;

  std::vector<double> grad(field.param_count());
  const BatchLoss loss = field_gradients(field, batch, config, grad);
  CHECK(loss.total > 0.0);
  CHECK(loss.collinearity > 0.0);

  // Probe a deterministic mix of table entries and head weights.
  Rng rng = stream_rng(7, 0xfd);
  int checked = 0;
  int significant = 0;
  const double step = 1e-5;
  while (checked < 100) {
    const size_t i = rng.next_below(field.param_count());
    ++checked;
    std::vector<double>& params = field.params();
    const double saved = params[i];
    params[i] = saved + step;
    const double up = evaluate_batch(field, batch, config).total;
    params[i] = saved - step;
    const double down = evaluate_batch(field, batch, config).total;
    params[i] = saved;
    const double fd = (up - down) / (2.0 * step);
    // The floor absorbs finite-difference cancellation noise, which sits near
    // 1e-16 / step for this loss magnitude.
    const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
    if (std::abs(fd) > 1e-7) ++significant;
    CHECK(std::abs(fd - grad[i]) / scale < 1e-3);
  }
  CHECK(significant > 20); // the probe must exercise real gradients
}

TEST_CASE("zero photometric error and zero collinearity give a zero gradient") {
  ToyHashField field = small_field();
  TrainConfig config = small_train_config();
  config.collinearity.eps2 = 1e-12; // depth gate closed: term is exactly zero

  SupervisionBatch batch = probe_batch(4);
  for (RaySupervision& ray : batch.rays) {
    ray.target_color = render_training_ray(field, ray.ray, config).color;
  }

  std::vector<double> grad(field.param_count(), 1.0);
  const BatchLoss loss = field_gradients(field, batch, config, grad);
  CHECK(loss.photometric == 0.0);
  CHECK(loss.collinearity == 0.0);
  CHECK(loss.total == 0.0);
  for (double g : grad) {
    REQUIRE(g == 0.0);
  }
}

TEST_CASE("gradients do not flow through the color-similarity weight") {
  ToyHashField field = small_field();
  TrainConfig config = small_train_config();
  config.collinearity.eps2 = 10.0;
  config.lambda_col = 1.0;

  // Photometric-only reference.
  SupervisionBatch batch = probe_batch(21);
  TrainConfig photo_only = config;
  photo_only.lambda_col = 0.0;
  std::vector<double> grad_photo(field.param_count());
  field_gradients(field, batch, photo_only, grad_photo);

  // Same batch with equal triplet colors (weight = 1)...
  SupervisionBatch equal_colors = batch;
  for (TripletSupervision& t : equal_colors.triplets) {
    t.c0 = t.c1 = t.c2 = Vec3(0.5, 0.5, 0.5);
  }
  std::vector<double> grad_full(field.param_count());
  field_gradients(field, equal_colors, config, grad_full);

  // ...and with spread colors that shrink the weight to w < 1.
  SupervisionBatch spread_colors = batch;
  for (TripletSupervision& t : spread_colors.triplets) {
    t.c0 = Vec3(0.2, 0.5, 0.5);
    t.c1 = Vec3(0.5, 0.5, 0.5);
    t.c2 = Vec3(0.5, 0.5, 0.8);
  }
  std::vector<double> grad_damped(field.param_count());
  field_gradients(field, spread_colors, config, grad_damped);

  const double w = std::exp(-(0.09 + 0.09) / (2.0 * 0.01));
  for (size_t i = 0; i < grad_photo.size(); ++i) {
    const double collinear_part = grad_full[i] - grad_photo[i];
    const double damped_part = grad_damped[i] - grad_photo[i];
    REQUIRE(std::abs(damped_part - w * collinear_part) <=
            1e-6 * std::abs(w * collinear_part) + 1e-15);
  }
}

TEST_CASE("gradient reduction does not depend on the chunk schedule") {
  ToyHashField field = small_field();
  const SupervisionBatch batch = probe_batch(33);
  TrainConfig config = small_train_config();
  config.collinearity.eps2 = 10.0;

  std::vector<double> first(field.param_count());
  std::vector<double> second(field.param_count());
  field_gradients(field, batch, config, first);
  field_gradients(field, batch, config, second);
  for (size_t i = 0; i < first.size(); ++i) {
    REQUIRE(first[i] == second[i]);
  }
}

TEST_CASE("training rejects inconsistent configurations") {
  ToyHashField field = small_field();
  FixtureSpec spec;
  spec.kind = FixtureKind::textured_plane;
  spec.cameras = 2;
  spec.width = 16;
  spec.height = 16;
  const Fixture fixture = build_fixture(spec);
  TrainConfig config = small_train_config();
  config.iterations = 1;

  {
    TrainConfig bad = config;
    bad.batch_triplets = 0;
    CHECK_THROWS_AS(train_toy(field, fixture.poses, fixture.images, bad),
                    ConfigError);
  }
  {
    TrainConfig bad = config;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(train_toy(field, fixture.poses, fixture.images, bad),
                    ConfigError);
  }
  {
    TrainConfig bad = config;
    bad.iterations = -1;
    CHECK_THROWS_AS(train_toy(field, fixture.poses, fixture.images, bad),
                    ConfigError);
  }
  {
    std::vector<ImageBuffer> wrong(fixture.images.begin(),
                                   fixture.images.end() - 1);
    CHECK_THROWS_AS(train_toy(field, fixture.poses, wrong, config),
                    ConfigError);
  }
  CHECK_THROWS_AS(train_toy(field, {}, {}, config), ConfigError);
  std::vector<double> grad(field.param_count());
  CHECK_THROWS_AS(field_gradients(field, SupervisionBatch{}, config, grad),
                  EmptySet);
}

TEST_CASE("zero iterations leave the field untouched") {
  FixtureSpec spec;
  spec.kind = FixtureKind::textured_plane;
  spec.cameras = 2;
  spec.width = 16;
  spec.height = 16;
  const Fixture fixture = build_fixture(spec);

  ToyHashField field = small_field();
  const std::vector<double> before = field.params();
  TrainConfig config = small_train_config();
  config.iterations = 0;

  const TrainResult result =
      train_toy(field, fixture.poses, fixture.images, config);
  CHECK(result.loss_history.empty());
  const std::vector<double>& after = field.params();
  REQUIRE(after.size() == before.size());
  for (size_t i = 0; i < before.size(); ++i) {
    REQUIRE(after[i] == before[i]);
  }
}

TEST_CASE("training is deterministic and reduces the loss") {
  FixtureSpec spec;
  spec.kind = FixtureKind::textured_plane;
  spec.cameras = 3;
  spec.width = 32;
  spec.height = 32;
  const Fixture fixture = build_fixture(spec);

  TrainConfig config;
  config.iterations = 60;
  config.batch_triplets = 8;
  config.samples_per_ray = 32;
  config.near = fixture.metadata.render_near;
  config.far = fixture.metadata.render_far;
  config.seed = 2;

  ToyFieldConfig field_config = small_field_config();
  ToyHashField field_a(field_config, fixture.metadata.scene_bounds, {});
  const TrainResult run_a =
      train_toy(field_a, fixture.poses, fixture.images, config);

  ToyHashField field_b(field_config, fixture.metadata.scene_bounds, {});
  const TrainResult run_b =
      train_toy(field_b, fixture.poses, fixture.images, config);

  REQUIRE(run_a.loss_history.size() == 60);
  for (size_t i = 0; i < run_a.loss_history.size(); ++i) {
    REQUIRE(run_a.loss_history[i] == run_b.loss_history[i]);
  }
  const std::vector<double>& pa = field_a.params();
  const std::vector<double>& pb = field_b.params();
  size_t diff = 0;
  for (size_t i = 0; i < pa.size(); ++i) {
    if (pa[i] != pb[i]) ++diff;
  }
  CHECK(diff == 0);

  // Smoothed trend: the mean over the last quarter sits below the first.
  const auto window_mean = [&](size_t lo, size_t hi) {
    return std::accumulate(run_a.photometric_history.begin() + lo,
                           run_a.photometric_history.begin() + hi, 0.0) /
           (hi - lo);
  };
  CHECK(window_mean(45, 60) < window_mean(0, 15));
}
