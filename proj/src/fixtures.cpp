// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <utility>

#include <json.hpp>

#include "rfpc/errors.hpp"
#include "rfpc/volume_render.hpp"

namespace rfpc {

using nlohmann::json;

namespace {

std::string numbered_id(const char* prefix, int index) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%s%02d", prefix, index);
  return buffer;
}

std::vector<std::string> pose_ids(const std::vector<CameraPose>& poses,
                                  size_t first, size_t count) {
  std::vector<std::string> ids;
  for (size_t i = first; i < first + count; ++i) ids.push_back(poses[i].id);
  return ids;
}

/// Cameras on a horizontal circle around `center`, aimed at it.
std::vector<CameraPose> orbit_rig(const char* prefix, const Vec3& center,
                                  double radius, int count, double fx, int w,
                                  int h) {
  std::vector<CameraPose> poses;
  for (int k = 0; k < count; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / count;
    const Vec3 position =
        center + radius * Vec3(std::cos(theta), std::sin(theta), 0.0);
    poses.push_back(look_at_pose(numbered_id(prefix, k), position, center, fx,
                                 fx, 0.5 * w, 0.5 * h, w, h));
  }
  return poses;
}

/// Cameras on a circle in the z=0 plane, all looking straight up (+z).
std::vector<CameraPose> upward_ring_rig(const char* prefix, double radius,
                                        int count, double fx, int w, int h) {
  std::vector<CameraPose> poses;
  for (int k = 0; k < count; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / count;
    const Vec3 position(radius * std::cos(theta), radius * std::sin(theta),
                        0.0);
    poses.push_back(look_at_pose(numbered_id(prefix, k), position,
                                 position + Vec3(0, 0, 1), fx, fx, 0.5 * w,
                                 0.5 * h, w, h));
  }
  return poses;
}

/// Center camera plus a ring, all aimed at a shared target.
std::vector<CameraPose> converging_rig(const char* prefix, double ring_radius,
                                       int count, const Vec3& target,
                                       double fx, int w, int h) {
  std::vector<CameraPose> poses;
  poses.push_back(look_at_pose(numbered_id(prefix, 0), Vec3::Zero(), target,
                               fx, fx, 0.5 * w, 0.5 * h, w, h));
  for (int k = 1; k < count; ++k) {
    const double theta = 2.0 * std::numbers::pi * (k - 1) / (count - 1);
    const Vec3 position(ring_radius * std::cos(theta),
                        ring_radius * std::sin(theta), 0.0);
    poses.push_back(look_at_pose(numbered_id(prefix, k), position, target, fx,
                                 fx, 0.5 * w, 0.5 * h, w, h));
  }
  return poses;
}

AnalyticPart solid_ball(const Vec3& center, double radius, const Vec3& albedo) {
  AnalyticPart part;
  part.shape = AnalyticPart::Shape::ball;
  part.center = center;
  part.radius = radius;
  part.albedo = albedo;
  return part;
}

AnalyticPart solid_box(const Vec3& lo, const Vec3& hi, const Vec3& albedo) {
  AnalyticPart part;
  part.shape = AnalyticPart::Shape::box;
  part.bounds = Aabb{lo, hi};
  part.albedo = albedo;
  return part;
}

int default_camera_count(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::single_orbit: return 30;
    case FixtureKind::two_orbits: return 60;
    case FixtureKind::square_rig: return 4;
    case FixtureKind::textured_plane: return 9;
    case FixtureKind::two_planes: return 25;
    case FixtureKind::tinted_slab_scene: return 5;
  }
  return 0;
}

std::vector<ImageBuffer> render_ground_truth(
    const std::vector<CameraPose>& poses, const AnalyticField& field,
    const FixtureMetadata& metadata, const FixtureSpec& spec) {
  RenderConfig config;
  config.samples_per_ray = 512;
  config.near = metadata.render_near;
  config.far = metadata.render_far;
  config.color_mode = ColorMode::standard;
  config.jitter = spec.jitter_images;
  config.seed = spec.seed;

  std::vector<ImageBuffer> images;
  images.reserve(poses.size());
  for (size_t cam = 0; cam < poses.size(); ++cam) {
    const CameraPose& pose = poses[cam];
    ImageBuffer image(pose.width, pose.height, 3);
    const int pixel_count = pose.width * pose.height;
#pragma omp parallel for schedule(dynamic, 64)
    for (int p = 0; p < pixel_count; ++p) {
      const int x = p % pose.width;
      const int y = p / pose.width;
      const Ray ray = pixel_ray(pose, Vec2(x + 0.5, y + 0.5));
      const RayRender render = render_pixel(field, ray, config,
                                            static_cast<uint64_t>(cam),
                                            static_cast<uint64_t>(p));
      for (int c = 0; c < 3; ++c) {
        image.at(x, y, c) = std::clamp(render.color[c], 0.0, 1.0);
      }
    }
    images.push_back(std::move(image));
  }
  return images;
}

void validate_common(const FixtureSpec& spec) {
  if (spec.width < 16 || spec.height < 16) {
    throw ConfigError("fixture resolution must be at least 16x16");
  }
  if (spec.cameras < 0) throw ConfigError("camera count must be positive");
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

} // namespace

FixtureKind fixture_kind_from_name(const std::string& name) {
  if (name == "single_orbit") return FixtureKind::single_orbit;
  if (name == "two_orbits") return FixtureKind::two_orbits;
  if (name == "square_rig") return FixtureKind::square_rig;
  if (name == "textured_plane") return FixtureKind::textured_plane;
  if (name == "two_planes") return FixtureKind::two_planes;
  if (name == "tinted_slab_scene") return FixtureKind::tinted_slab_scene;
  throw ConfigError("unknown fixture kind: " + name);
}

std::string fixture_kind_name(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::single_orbit: return "single_orbit";
    case FixtureKind::two_orbits: return "two_orbits";
    case FixtureKind::square_rig: return "square_rig";
    case FixtureKind::textured_plane: return "textured_plane";
    case FixtureKind::two_planes: return "two_planes";
    case FixtureKind::tinted_slab_scene: return "tinted_slab_scene";
  }
  throw ConfigError("unknown fixture kind");
}

Fixture build_fixture(const FixtureSpec& spec) {
  validate_common(spec);
  const int cameras =
      spec.cameras == 0 ? default_camera_count(spec.kind) : spec.cameras;
  const int w = spec.width;
  const int h = spec.height;

  std::vector<CameraPose> poses;
  std::vector<AnalyticPart> parts;
  double scene_scale = 1.0;
  FixtureMetadata meta;
  meta.kind = fixture_kind_name(spec.kind);
  meta.seed = spec.seed;

  switch (spec.kind) {
    case FixtureKind::single_orbit: {
      if (spec.orbit_radius <= 0.0) throw ConfigError("orbit radius must be positive");
      const double r = spec.orbit_radius;
      const Vec3& c = spec.orbit_center_a;
      poses = orbit_rig("cam", c, r, cameras, 0.75 * w, w, h);
      parts.push_back(solid_ball(c, 0.2 * r, Vec3(0.8, 0.8, 0.8)));
      scene_scale = r;
      meta.orbits.push_back({c, r, pose_ids(poses, 0, poses.size())});
      meta.scene_bounds = Aabb{c.array() - 0.25 * r, c.array() + 0.25 * r};
      meta.render_near = 0.5 * r;
      meta.render_far = 1.5 * r;
      break;
    }
    case FixtureKind::two_orbits: {
      if (spec.orbit_radius <= 0.0) throw ConfigError("orbit radius must be positive");
      if (cameras < 2 || cameras % 2 != 0) {
        throw ConfigError("two_orbits needs an even camera count");
      }
      const double r = spec.orbit_radius;
      const Vec3& ca = spec.orbit_center_a;
      const Vec3& cb = spec.orbit_center_b;
      if ((cb - ca).norm() <= 2.0 * r) {
        throw ConfigError("orbit centers closer than one orbit diameter");
      }
      const int per_orbit = cameras / 2;
      poses = orbit_rig("a", ca, r, per_orbit, 0.75 * w, w, h);
      std::vector<CameraPose> second =
          orbit_rig("b", cb, r, per_orbit, 0.75 * w, w, h);
      poses.insert(poses.end(), second.begin(), second.end());
      parts.push_back(solid_ball(ca, 0.2 * r, Vec3(0.85, 0.85, 0.85)));
      parts.push_back(solid_ball(cb, 0.2 * r, Vec3(0.65, 0.65, 0.65)));
      scene_scale = r;
      meta.orbits.push_back(
          {ca, r, pose_ids(poses, 0, static_cast<size_t>(per_orbit))});
      meta.orbits.push_back({cb, r,
                             pose_ids(poses, static_cast<size_t>(per_orbit),
                                      static_cast<size_t>(per_orbit))});
      meta.scene_bounds =
          Aabb{ca.cwiseMin(cb).array() - 0.25 * r, ca.cwiseMax(cb).array() + 0.25 * r};
      meta.render_near = 0.5 * r;
      meta.render_far = 1.5 * r;
      break;
    }
    case FixtureKind::square_rig: {
      if (cameras != 4) throw ConfigError("square_rig always has 4 cameras");
      const Vec3 positions[4] = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0),
                                 Vec3(0, -1, 0)};
      for (int k = 0; k < 4; ++k) {
        poses.push_back(look_at_pose(numbered_id("sq", k), positions[k],
                                     Vec3::Zero(), w, w, 0.5 * w, 0.5 * h, w,
                                     h));
      }
      parts.push_back(solid_ball(Vec3::Zero(), 0.3, Vec3(0.6, 0.6, 0.6)));
      scene_scale = 1.0;
      meta.scene_bounds = Aabb{Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5)};
      meta.render_near = 0.3;
      meta.render_far = 2.0;
      break;
    }
    case FixtureKind::textured_plane: {
      if (spec.plane_distance <= 0.0) throw ConfigError("plane distance must be positive");
      if (spec.checker_block <= 0.0) throw ConfigError("checker block must be positive");
      if (cameras < 1) throw ConfigError("textured_plane needs a camera");
      const double d = spec.plane_distance;
      poses = converging_rig("tx", 0.4, cameras, Vec3(0, 0, d), w, w, h);
      AnalyticPart plane;
      plane.shape = AnalyticPart::Shape::half_space;
      plane.normal = Vec3(0, 0, -1);
      plane.offset = -d;
      plane.albedo = Vec3(0.9, 0.9, 0.9);
      plane.checker = CheckerSpec{Vec3(0.3, 0.3, 0.3), spec.checker_block, 0, 1};
      parts.push_back(plane);
      scene_scale = d;
      meta.planes.push_back({Vec3(0, 0, -1), -d});
      const double half_extent = 0.5 * d + 0.5;
      meta.scene_bounds = Aabb{Vec3(-half_extent, -half_extent, d - 0.3),
                               Vec3(half_extent, half_extent, d + 0.3)};
      meta.render_near = 1.0;
      meta.render_far = 1.5 * d;
      break;
    }
    case FixtureKind::two_planes: {
      if (cameras < 1) throw ConfigError("two_planes needs a camera");
      poses = upward_ring_rig("tp", 1.5, cameras, 0.75 * w, w, h);
      // Far sheet, a near occluding patch, and a translucent skirt hanging
      // from the patch silhouette down to the far sheet: rays through the
      // skirt accumulate enough weight to place depth between the planes.
      parts.push_back(solid_box(Vec3(-2, -2, 6.0), Vec3(2, 2, 6.3),
                                Vec3(0.8, 0.8, 0.8)));
      parts.push_back(solid_box(Vec3(-0.8, -0.8, 4.5), Vec3(0.8, 0.8, 4.9),
                                Vec3(0.4, 0.4, 0.4)));
      AnalyticPart skirt;
      skirt.shape = AnalyticPart::Shape::fog_frame;
      skirt.bounds = Aabb{Vec3(-0.82, -0.82, 4.5), Vec3(0.82, 0.82, 6.0)};
      skirt.inner_min = Vec2(-0.8, -0.8);
      skirt.inner_max = Vec2(0.8, 0.8);
      skirt.fog_density = 1.33;
      skirt.albedo = Vec3(0.5, 0.5, 0.5);
      parts.push_back(skirt);
      scene_scale = 6.5;
      meta.planes.push_back({Vec3(0, 0, -1), -4.5});
      meta.planes.push_back({Vec3(0, 0, -1), -6.0});
      meta.gap_lo = 4.9;
      meta.gap_hi = 6.0;
      meta.scene_bounds = Aabb{Vec3(-2.2, -2.2, 4.3), Vec3(2.2, 2.2, 6.5)};
      meta.render_near = 2.0;
      meta.render_far = 8.5;
      break;
    }
    case FixtureKind::tinted_slab_scene: {
      if (spec.slab_transmittance <= 0.0 || spec.slab_transmittance >= 1.0) {
        throw ConfigError("slab transmittance must lie in (0, 1)");
      }
      if (cameras < 1) throw ConfigError("tinted_slab_scene needs a camera");
      poses = upward_ring_rig("ts", 0.2, cameras, w, w, h);
      AnalyticPart backing;
      backing.shape = AnalyticPart::Shape::half_space;
      backing.normal = Vec3(0, 0, -1);
      backing.offset = -2.0;
      backing.albedo = Vec3(1, 1, 1);
      parts.push_back(backing);
      AnalyticPart slab;
      slab.shape = AnalyticPart::Shape::fog_slab;
      slab.normal = Vec3(0, 0, 1);
      slab.lo = 0.95;
      slab.hi = 1.05;
      slab.fog_density = -std::log(spec.slab_transmittance) / 0.1;
      slab.albedo = spec.slab_tint;
      parts.push_back(slab);
      scene_scale = 2.0;
      meta.planes.push_back({Vec3(0, 0, -1), -2.0});
      meta.slab_tint = spec.slab_tint;
      meta.backing_albedo = Vec3(1, 1, 1);
      meta.foreground_weight = 1.0 - spec.slab_transmittance;
      meta.scene_bounds = Aabb{Vec3(-1.5, -1.5, 1.5), Vec3(1.5, 1.5, 2.5)};
      meta.render_near = 0.5;
      meta.render_far = 3.0;
      break;
    }
  }

  AnalyticField field(std::move(parts), scene_scale);
  std::vector<ImageBuffer> images;
  if (spec.render_images) {
    images = render_ground_truth(poses, field, meta, spec);
  }
  return Fixture{std::move(poses), std::move(field), std::move(images),
                 std::move(meta)};
}

void save_fixture_metadata(const FixtureMetadata& metadata,
                           const std::string& path) {
  json j;
  j["kind"] = metadata.kind;
  j["seed"] = metadata.seed;
  j["orbits"] = json::array();
  for (const OrbitTruth& orbit : metadata.orbits) {
    j["orbits"].push_back({{"center", vec3_to_json(orbit.center)},
                           {"radius", orbit.radius},
                           {"cameras", orbit.camera_ids}});
  }
  j["planes"] = json::array();
  for (const PlaneTruth& plane : metadata.planes) {
    j["planes"].push_back(
        {{"normal", vec3_to_json(plane.normal)}, {"offset", plane.offset}});
  }
  if (metadata.gap_hi > metadata.gap_lo) {
    j["gap"] = json::array({metadata.gap_lo, metadata.gap_hi});
  }
  if (metadata.foreground_weight > 0.0) {
    j["slab_tint"] = vec3_to_json(metadata.slab_tint);
    j["backing_albedo"] = vec3_to_json(metadata.backing_albedo);
    j["foreground_weight"] = metadata.foreground_weight;
  }
  j["bounds"] = {{"min", vec3_to_json(metadata.scene_bounds.min)},
                 {"max", vec3_to_json(metadata.scene_bounds.max)}};
  j["render"] = {{"near", metadata.render_near}, {"far", metadata.render_far}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

} // namespace rfpc
