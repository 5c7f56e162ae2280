// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/extraction.hpp"

#include <algorithm>
#include <cstdint>

#include "rfpc/errors.hpp"
#include "rfpc/rng.hpp"

namespace rfpc {
namespace {

constexpr uint64_t kCandidateStream = 0x5dca;

enum class Reason : uint8_t {
  pending,
  infinite_depth,
  empty_window,
  out_of_bounds,
};

struct Candidate {
  int pose = 0;
  int x0 = 0;
  int y0 = 0;
};

void validate(const std::vector<CameraPose>& poses,
              const ExtractionConfig& config) {
  if (poses.empty()) throw EmptySet("extraction needs at least one camera");
  if (config.patch_w < 1 || config.patch_h < 1 || config.patch_w % 2 == 0 ||
      config.patch_h % 2 == 0) {
    throw ConfigError("patch dimensions must be odd and >= 1");
  }
  if (config.target_points < 0) {
    throw ConfigError("target point count must be >= 0");
  }
  if (!(config.eps3 > 0.0 && config.eps3 < 1.0)) {
    throw ConfigError("patch depth slack must lie in (0, 1)");
  }
  if (config.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  for (const CameraPose& pose : poses) {
    if (pose.width < config.patch_w || pose.height < config.patch_h) {
      throw ConfigError("patch does not fit inside image " + pose.id);
    }
  }
}

Candidate draw_candidate(uint64_t seed, long long index,
                         const std::vector<CameraPose>& poses, int patch_w,
                         int patch_h) {
  Rng rng = stream_rng(seed, kCandidateStream, static_cast<uint64_t>(index));
  Candidate candidate;
  candidate.pose = static_cast<int>(rng.next_below(poses.size()));
  const CameraPose& pose = poses[static_cast<size_t>(candidate.pose)];
  const int hw = (patch_w - 1) / 2;
  const int hh = (patch_h - 1) / 2;
  candidate.x0 = hw + static_cast<int>(rng.next_below(
                          static_cast<uint64_t>(pose.width - patch_w + 1)));
  candidate.y0 = hh + static_cast<int>(rng.next_below(
                          static_cast<uint64_t>(pose.height - patch_h + 1)));
  return candidate;
}

ExtractionResult run_extraction(const RadianceField& scene,
                                const std::vector<CameraPose>& poses,
                                const ExtractionConfig& config, bool naive) {
  validate(poses, config);
  ExtractionResult result;
  if (config.target_points == 0) return result;

  const QueryCountingField field(scene);
  const int patch = config.patch_w * config.patch_h;
  const int neighbors = patch - 1;
  const int hw = (config.patch_w - 1) / 2;
  const int hh = (config.patch_h - 1) / 2;
  const int center_slot = hh * config.patch_w + hw;

  long long next_candidate = 0;
  bool done = false;
  while (!done && result.stats.attempted < config.max_attempts) {
    const long long remaining = config.max_attempts - result.stats.attempted;
    const int batch = static_cast<int>(
        std::min<long long>(config.batch_size, remaining));

    std::vector<Candidate> candidates(static_cast<size_t>(batch));
    std::vector<Ray> rays(static_cast<size_t>(batch));
    for (int i = 0; i < batch; ++i) {
      candidates[static_cast<size_t>(i)] = draw_candidate(
          config.seed, next_candidate + i, poses, config.patch_w,
          config.patch_h);
      const Candidate& c = candidates[static_cast<size_t>(i)];
      rays[static_cast<size_t>(i)] =
          pixel_ray(poses[static_cast<size_t>(c.pose)],
                    Vec2(c.x0 + 0.5, c.y0 + 0.5));
    }

    std::vector<RayRender> centers(static_cast<size_t>(batch));
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < batch; ++i) {
      centers[static_cast<size_t>(i)] = render_pixel(
          field, rays[static_cast<size_t>(i)], config.render,
          static_cast<uint64_t>(next_candidate + i),
          static_cast<uint64_t>(center_slot));
    }

    std::vector<Reason> reasons(static_cast<size_t>(batch), Reason::pending);
    std::vector<Vec3> points(static_cast<size_t>(batch), Vec3::Zero());
    std::vector<int> patch_row(static_cast<size_t>(batch), -1);
    std::vector<int> row_candidate;
    for (int i = 0; i < batch; ++i) {
      const RayRender& render = centers[static_cast<size_t>(i)];
      if (render.status == RayStatus::rejected_infinite_depth) {
        reasons[static_cast<size_t>(i)] = Reason::infinite_depth;
      } else if (render.status == RayStatus::rejected_empty_window) {
        reasons[static_cast<size_t>(i)] = Reason::empty_window;
      } else {
        const Vec3 point = rays[static_cast<size_t>(i)].origin +
                           render.depth * rays[static_cast<size_t>(i)].direction;
        points[static_cast<size_t>(i)] = point;
        if (config.bounds && !config.bounds->contains(point)) {
          reasons[static_cast<size_t>(i)] = Reason::out_of_bounds;
        }
      }
      if (naive || reasons[static_cast<size_t>(i)] == Reason::pending) {
        patch_row[static_cast<size_t>(i)] =
            static_cast<int>(row_candidate.size());
        row_candidate.push_back(i);
      }
    }

    std::vector<double> patch_depths(row_candidate.size() *
                                     static_cast<size_t>(neighbors));
    const long long jobs =
        static_cast<long long>(row_candidate.size()) * neighbors;
#pragma omp parallel for schedule(dynamic, 16)
    for (long long j = 0; j < jobs; ++j) {
      const int row = static_cast<int>(j / neighbors);
      const int n = static_cast<int>(j % neighbors);
      const int slot = n < center_slot ? n : n + 1;
      const int i = row_candidate[static_cast<size_t>(row)];
      const Candidate& c = candidates[static_cast<size_t>(i)];
      const int dx = slot % config.patch_w - hw;
      const int dy = slot / config.patch_w - hh;
      const Ray ray = pixel_ray(poses[static_cast<size_t>(c.pose)],
                                Vec2(c.x0 + dx + 0.5, c.y0 + dy + 0.5));
      patch_depths[static_cast<size_t>(j)] =
          render_ray_depth(field, ray, config.render,
                           static_cast<uint64_t>(next_candidate + i),
                           static_cast<uint64_t>(slot))
              .depth;
    }

    for (int i = 0; i < batch && !done; ++i) {
      ++result.stats.attempted;
      switch (reasons[static_cast<size_t>(i)]) {
        case Reason::infinite_depth:
          ++result.stats.rejected_infinite_depth;
          continue;
        case Reason::empty_window:
          ++result.stats.rejected_empty_window;
          continue;
        case Reason::out_of_bounds:
          ++result.stats.rejected_out_of_bounds;
          continue;
        case Reason::pending:
          break;
      }
      const std::span<const double> depths{
          patch_depths.data() +
              static_cast<size_t>(patch_row[static_cast<size_t>(i)]) *
                  static_cast<size_t>(neighbors),
          static_cast<size_t>(neighbors)};
      if (!sdd_accept(centers[static_cast<size_t>(i)].depth, depths,
                      config.eps3)) {
        ++result.stats.rejected_sdd;
        continue;
      }
      result.cloud.push_back(points[static_cast<size_t>(i)],
                             centers[static_cast<size_t>(i)].color);
      if (static_cast<long long>(result.cloud.size()) >=
          config.target_points) {
        done = true;
      }
    }
    next_candidate += batch;
  }

  result.stats.accepted = static_cast<long long>(result.cloud.size());
  result.stats.field_queries = field.count();
  result.outcome = done ? ExtractionOutcome::complete
                        : ExtractionOutcome::exhausted;
  return result;
}

} // namespace

bool sdd_accept(double center_depth, std::span<const double> patch_depths,
                double eps3) {
  double patch_min = kInf;
  for (const double d : patch_depths) patch_min = std::min(patch_min, d);
  return (1.0 - eps3) * center_depth <= patch_min;
}

ExtractionResult extract_point_cloud(const RadianceField& field,
                                     const std::vector<CameraPose>& poses,
                                     const ExtractionConfig& config) {
  return run_extraction(field, poses, config, false);
}

ExtractionResult extract_naive(const RadianceField& field,
                               const std::vector<CameraPose>& poses,
                               const ExtractionConfig& config) {
  return run_extraction(field, poses, config, true);
}

} // namespace rfpc
