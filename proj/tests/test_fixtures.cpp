// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfpc/analytic_field.hpp"
#include "rfpc/edges.hpp"
#include "rfpc/errors.hpp"
#include "rfpc/fixtures.hpp"
#include "rfpc/volume_render.hpp"

using namespace rfpc;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

double line_to_point_distance(const CameraPose& pose, const Vec3& point) {
  const Vec3 rel = point - pose.origin;
  return (rel - rel.dot(pose.viewing_direction) * pose.viewing_direction)
      .norm();
}

RenderConfig ground_truth_config(const FixtureMetadata& meta) {
  RenderConfig config;
  config.samples_per_ray = 512;
  config.near = meta.render_near;
  config.far = meta.render_far;
  config.color_mode = ColorMode::standard;
  return config;
}

} // namespace

TEST_CASE("single orbit rig aims every camera at the center") {
  FixtureSpec spec;
  spec.kind = FixtureKind::single_orbit;
  spec.render_images = false;
  const Fixture fixture = build_fixture(spec);

  REQUIRE(fixture.poses.size() == 30);
  for (const CameraPose& pose : fixture.poses) {
    CHECK(line_to_point_distance(pose, spec.orbit_center_a) <= 1e-9);
    CHECK((pose.origin - spec.orbit_center_a).norm() ==
          doctest::Approx(5.0).epsilon(1e-12));
  }
  REQUIRE(fixture.metadata.orbits.size() == 1);
  CHECK(fixture.metadata.orbits[0].radius == 5.0);
  CHECK(fixture.metadata.orbits[0].center == spec.orbit_center_a);
  CHECK(fixture.metadata.orbits[0].camera_ids.size() == 30);
  CHECK(fixture.images.empty());
}

TEST_CASE("two orbit rig splits cameras between distant centers") {
  FixtureSpec spec;
  spec.kind = FixtureKind::two_orbits;
  spec.render_images = false;
  const Fixture fixture = build_fixture(spec);

  REQUIRE(fixture.poses.size() == 60);
  REQUIRE(fixture.metadata.orbits.size() == 2);
  const OrbitTruth& a = fixture.metadata.orbits[0];
  const OrbitTruth& b = fixture.metadata.orbits[1];
  CHECK((a.center - b.center).norm() == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(a.camera_ids.size() == 30);
  CHECK(b.camera_ids.size() == 30);
  for (size_t i = 0; i < fixture.poses.size(); ++i) {
    const CameraPose& pose = fixture.poses[i];
    const Vec3& center = i < 30 ? a.center : b.center;
    CHECK(pose.id[0] == (i < 30 ? 'a' : 'b'));
    CHECK(line_to_point_distance(pose, center) <= 1e-9);
    CHECK((pose.origin - center).norm() == doctest::Approx(5.0).epsilon(1e-12));
  }
}

TEST_CASE("square rig matches its four canonical stations") {
  FixtureSpec spec;
  spec.kind = FixtureKind::square_rig;
  spec.render_images = false;
  const Fixture fixture = build_fixture(spec);

  REQUIRE(fixture.poses.size() == 4);
  const Vec3 expected[4] = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0),
                            Vec3(0, -1, 0)};
  for (int k = 0; k < 4; ++k) {
    CHECK(fixture.poses[k].origin == expected[k]);
    CHECK(line_to_point_distance(fixture.poses[k], Vec3::Zero()) <= 1e-9);
    CHECK((fixture.poses[k].viewing_direction + expected[k]).norm() <= 1e-12);
  }
}

TEST_CASE("fixture generation is bit reproducible") {
  FixtureSpec spec;
  spec.kind = FixtureKind::two_planes;
  spec.cameras = 4;
  spec.width = 16;
  spec.height = 16;
  spec.seed = 7;
  const Fixture first = build_fixture(spec);
  const Fixture second = build_fixture(spec);

  REQUIRE(first.poses.size() == second.poses.size());
  for (size_t i = 0; i < first.poses.size(); ++i) {
    CHECK(first.poses[i].origin == second.poses[i].origin);
    CHECK(first.poses[i].rotation == second.poses[i].rotation);
  }
  REQUIRE(first.images.size() == 4);
  REQUIRE(second.images.size() == 4);
  for (size_t i = 0; i < first.images.size(); ++i) {
    CHECK(first.images[i].data == second.images[i].data);
  }
  CHECK(first.metadata.scene_bounds.min == second.metadata.scene_bounds.min);
  CHECK(first.metadata.scene_bounds.max == second.metadata.scene_bounds.max);
}

TEST_CASE("principal ray depths match the analytic surface") {
  std::vector<FixtureSpec> specs(5);
  specs[0].kind = FixtureKind::single_orbit;
  specs[0].cameras = 6;
  specs[1].kind = FixtureKind::square_rig;
  specs[2].kind = FixtureKind::textured_plane;
  specs[2].cameras = 3;
  specs[3].kind = FixtureKind::two_planes;
  specs[3].cameras = 5;
  specs[4].kind = FixtureKind::tinted_slab_scene;
  specs[4].cameras = 3;

  for (FixtureSpec& spec : specs) {
    spec.render_images = false;
    spec.width = 32;
    spec.height = 32;
    const Fixture fixture = build_fixture(spec);
    const RenderConfig config = ground_truth_config(fixture.metadata);
    const double spacing = (config.far - config.near) / 512.0;
    for (const CameraPose& pose : fixture.poses) {
      const Ray ray =
          pixel_ray(pose, Vec2(0.5 * pose.width, 0.5 * pose.height));
      const double analytic = fixture.field.analytic_depth(ray);
      REQUIRE(analytic < kInf);
      const RayRender render = render_ray_depth(fixture.field, ray, config);
      CHECK(render.status == RayStatus::accepted);
      CHECK(std::abs(render.depth - analytic) <= 1.5 * spacing);
    }
  }
}

TEST_CASE("textured plane image shows the checkerboard and its edges") {
  FixtureSpec spec;
  spec.kind = FixtureKind::textured_plane;
  spec.cameras = 1;
  const Fixture fixture = build_fixture(spec);
  REQUIRE(fixture.images.size() == 1);
  const ImageBuffer& image = fixture.images[0];
  const CameraPose& pose = fixture.poses[0];
  const AnalyticPart& plane = fixture.field.parts()[0];

  int bright = 0;
  int dark = 0;
  int checked = 0;
  for (int y = 1; y < image.height; y += 3) {
    for (int x = 1; x < image.width; x += 3) {
      const Ray ray = pixel_ray(pose, Vec2(x + 0.5, y + 0.5));
      const double depth = fixture.field.analytic_depth(ray);
      REQUIRE(depth < kInf);
      const Vec3 hit = ray.origin + depth * ray.direction;
      // Skip pixels whose footprint straddles a block boundary.
      const double block = spec.checker_block;
      const double du = std::abs(
          std::remainder(hit.x(), block));
      const double dv = std::abs(
          std::remainder(hit.y(), block));
      if (du < 0.05 || dv < 0.05 || block - du < 0.05 || block - dv < 0.05) {
        continue;
      }
      const Vec3 expected = plane.albedo_at(hit);
      const Vec3 got = image.rgb(x, y);
      CHECK((got - expected).cwiseAbs().maxCoeff() <= 0.05);
      ++checked;
      if (expected.x() > 0.5) ++bright;
      else ++dark;
    }
  }
  CHECK(checked > 100);
  CHECK(bright > 10);
  CHECK(dark > 10);

  const EdgeMap edges = detect_edges(image);
  CHECK(edges.edge_count() > 50);
  CHECK(edges.edge_count() < static_cast<size_t>(image.width) * image.height / 4);
}

TEST_CASE("tinted slab renders the hand computed color mixture") {
  FixtureSpec spec;
  spec.kind = FixtureKind::tinted_slab_scene;
  spec.cameras = 1;
  spec.render_images = false;
  const Fixture fixture = build_fixture(spec);
  CHECK(fixture.metadata.foreground_weight ==
        doctest::Approx(0.3).epsilon(1e-12));

  const CameraPose& pose = fixture.poses[0];
  const Ray ray = pixel_ray(pose, Vec2(0.5 * pose.width, 0.5 * pose.height));

  RenderConfig standard = ground_truth_config(fixture.metadata);
  const RayRender tinted = render_pixel(fixture.field, ray, standard);
  CHECK(tinted.status == RayStatus::accepted);
  CHECK(std::abs(tinted.depth - 2.0) <= 0.02);
  CHECK(std::abs(tinted.color.x() - 0.7) <= 0.02);
  CHECK(std::abs(tinted.color.y() - 0.7) <= 0.02);
  CHECK(std::abs(tinted.color.z() - 1.0) <= 0.02);

  RenderConfig csd = standard;
  csd.color_mode = ColorMode::csd;
  const RayRender clean = render_pixel(fixture.field, ray, csd);
  CHECK(clean.status == RayStatus::accepted);
  CHECK((clean.color - Vec3(1, 1, 1)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("two planes scene misses geometry on most rays") {
  FixtureSpec spec;
  spec.kind = FixtureKind::two_planes;
  spec.cameras = 3;
  spec.render_images = false;
  const Fixture fixture = build_fixture(spec);
  CHECK(fixture.metadata.gap_lo == 4.9);
  CHECK(fixture.metadata.gap_hi == 6.0);

  const CameraPose& pose = fixture.poses[0];
  int misses = 0;
  int total = 0;
  for (int y = 0; y < pose.height; ++y) {
    for (int x = 0; x < pose.width; ++x) {
      const Ray ray = pixel_ray(pose, Vec2(x + 0.5, y + 0.5));
      if (fixture.field.analytic_depth(ray) == kInf) ++misses;
      ++total;
    }
  }
  const double miss_fraction = static_cast<double>(misses) / total;
  CHECK(miss_fraction >= 0.6);
  CHECK(miss_fraction <= 0.9);
}

TEST_CASE("fog skirt pulls rendered depth between the planes") {
  FixtureSpec spec;
  spec.kind = FixtureKind::two_planes;
  spec.cameras = 1;
  spec.render_images = false;
  const Fixture fixture = build_fixture(spec);
  const RenderConfig config = ground_truth_config(fixture.metadata);

  // Through the skirt: weight accumulates in the fog and the rendered depth
  // lands inside the gap even though the only surface behind is at z = 6.
  const Ray through_skirt{Vec3(0.81, 0.0, 0.0), Vec3(0, 0, 1)};
  CHECK(fixture.field.analytic_depth(through_skirt) == 6.0);
  const RayRender foggy =
      render_ray_depth(fixture.field, through_skirt, config);
  CHECK(foggy.depth > fixture.metadata.gap_lo);
  CHECK(foggy.depth < fixture.metadata.gap_hi);

  // Through the occluder and past the skirt: depth follows the surfaces.
  const Ray through_patch{Vec3(0.0, 0.0, 0.0), Vec3(0, 0, 1)};
  const RayRender near_hit =
      render_ray_depth(fixture.field, through_patch, config);
  CHECK(std::abs(near_hit.depth - 4.5) <= 0.02);
  const Ray clear{Vec3(1.5, 0.0, 0.0), Vec3(0, 0, 1)};
  const RayRender far_hit = render_ray_depth(fixture.field, clear, config);
  CHECK(std::abs(far_hit.depth - 6.0) <= 0.02);
}

TEST_CASE("fixture validation rejects bad parameters") {
  {
    FixtureSpec spec;
    spec.width = 8;
    CHECK_THROWS_AS(build_fixture(spec), ConfigError);
  }
  {
    FixtureSpec spec;
    spec.kind = FixtureKind::square_rig;
    spec.cameras = 5;
    CHECK_THROWS_AS(build_fixture(spec), ConfigError);
  }
  {
    FixtureSpec spec;
    spec.kind = FixtureKind::two_orbits;
    spec.cameras = 7;
    CHECK_THROWS_AS(build_fixture(spec), ConfigError);
  }
  {
    FixtureSpec spec;
    spec.orbit_radius = -1.0;
    CHECK_THROWS_AS(build_fixture(spec), ConfigError);
  }
  {
    FixtureSpec spec;
    spec.kind = FixtureKind::two_orbits;
    spec.orbit_center_b = spec.orbit_center_a + Vec3(5, 0, 0);
    CHECK_THROWS_AS(build_fixture(spec), ConfigError);
  }
  {
    FixtureSpec spec;
    spec.kind = FixtureKind::tinted_slab_scene;
    spec.slab_transmittance = 1.5;
    CHECK_THROWS_AS(build_fixture(spec), ConfigError);
  }
  CHECK_THROWS_AS(fixture_kind_from_name("nope"), ConfigError);
  for (const char* name :
       {"single_orbit", "two_orbits", "square_rig", "textured_plane",
        "two_planes", "tinted_slab_scene"}) {
    CHECK(fixture_kind_name(fixture_kind_from_name(name)) == name);
  }
}

TEST_CASE("metadata json and field description round trip") {
  FixtureSpec spec;
  spec.kind = FixtureKind::two_planes;
  spec.cameras = 2;
  spec.render_images = false;
  const Fixture fixture = build_fixture(spec);

  const std::string meta_path = temp_path("rfpc_fixture_meta.json");
  save_fixture_metadata(fixture.metadata, meta_path);
  std::ifstream in(meta_path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  CHECK(j.at("kind") == "two_planes");
  CHECK(j.at("gap").at(0) == 4.9);
  CHECK(j.at("gap").at(1) == 6.0);
  CHECK(j.at("planes").size() == 2);
  CHECK(j.at("bounds").at("min").size() == 3);
  CHECK(j.at("render").at("near") == fixture.metadata.render_near);

  const std::string field_path = temp_path("rfpc_fixture_field.json");
  save_analytic_field(fixture.field, field_path);
  const AnalyticField loaded = load_analytic_field(field_path);
  REQUIRE(loaded.parts().size() == fixture.field.parts().size());
  CHECK(loaded.scene_scale() == fixture.field.scene_scale());
  const Ray probe{Vec3(0.3, -0.2, 0.0), Vec3(0, 0, 1)};
  CHECK(loaded.analytic_depth(probe) == fixture.field.analytic_depth(probe));
  const Vec3 fog_point(0.85, 0.0, 5.0);
  CHECK(loaded.query(fog_point, Vec3(0, 0, 1)).density ==
        fixture.field.query(fog_point, Vec3(0, 0, 1)).density);
}
