// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfpc/analytic_field.hpp"
#include "rfpc/camera.hpp"
#include "rfpc/geometry.hpp"
#include "rfpc/image.hpp"

namespace rfpc {

enum class FixtureKind {
  single_orbit,
  two_orbits,
  square_rig,
  textured_plane,
  two_planes,
  tinted_slab_scene,
};

FixtureKind fixture_kind_from_name(const std::string& name);
std::string fixture_kind_name(FixtureKind kind);

/// Parameters for one synthetic scene + camera rig. Fields outside the
/// selected kind's family are ignored.
struct FixtureSpec {
  FixtureKind kind = FixtureKind::single_orbit;
  int cameras = 0; // 0 = kind default
  int width = 64;
  int height = 64;
  uint64_t seed = 0;
  bool render_images = true;
  bool jitter_images = false; // stratified sample jitter keyed by seed

  // Orbit rigs.
  double orbit_radius = 5.0;
  Vec3 orbit_center_a = Vec3(0.0, 0.0, 0.0);
  Vec3 orbit_center_b = Vec3(40.0, 0.0, 0.0);

  // Textured plane.
  double plane_distance = 3.0;
  double checker_block = 0.375;

  // Tinted slab.
  double slab_transmittance = 0.7;
  Vec3 slab_tint = Vec3(0.0, 0.0, 1.0);
};

struct OrbitTruth {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::vector<std::string> camera_ids;
};

/// Plane with unit normal; points p on the surface satisfy normal . p = offset.
struct PlaneTruth {
  Vec3 normal = Vec3(0, 0, 1);
  double offset = 0.0;
};

struct FixtureMetadata {
  std::string kind;
  uint64_t seed = 0;
  std::vector<OrbitTruth> orbits;
  std::vector<PlaneTruth> planes;
  // two_planes: open depth interval strictly between the solid slabs, where
  // any extracted point is a floater.
  double gap_lo = 0.0;
  double gap_hi = 0.0;
  // tinted_slab_scene ground truth for an axial ray.
  Vec3 slab_tint = Vec3::Zero();
  Vec3 backing_albedo = Vec3::Zero();
  double foreground_weight = 0.0;
  // Suggested extraction bounds and ray-march interval for this scene.
  Aabb scene_bounds;
  double render_near = 0.05;
  double render_far = 100.0;
};

struct Fixture {
  std::vector<CameraPose> poses;
  AnalyticField field;
  std::vector<ImageBuffer> images; // one per pose when rendered
  FixtureMetadata metadata;
};

/// Deterministic scene + rig generator. Ground-truth images are rendered in
/// standard color mode at 512 samples per ray over [render_near, render_far].
Fixture build_fixture(const FixtureSpec& spec);

void save_fixture_metadata(const FixtureMetadata& metadata,
                           const std::string& path);

} // namespace rfpc
