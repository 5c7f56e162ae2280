// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Geometry>

#include "rfpc/errors.hpp"
#include "rfpc/metrics.hpp"
#include "rfpc/point_cloud.hpp"
#include "rfpc/rng.hpp"

using namespace rfpc;

namespace {

PointCloud random_cloud(uint64_t seed, int count, double lo, double hi,
                        bool snap_to_grid = false) {
  Rng rng = stream_rng(seed, 0xc10cd);
  PointCloud cloud;
  for (int i = 0; i < count; ++i) {
    Vec3 p(rng.next_range(lo, hi), rng.next_range(lo, hi),
           rng.next_range(lo, hi));
    if (snap_to_grid) {
      p = (p * 4.0).array().round() * 0.25;
    }
    cloud.push_back(p);
  }
  return cloud;
}

PointCloud cube_grid(int side, double spacing, const Vec3& offset) {
  PointCloud cloud;
  for (int x = 0; x < side; ++x) {
    for (int y = 0; y < side; ++y) {
      for (int z = 0; z < side; ++z) {
        cloud.push_back(offset + spacing * Vec3(x, y, z));
      }
    }
  }
  return cloud;
}

PointCloud transformed(const PointCloud& cloud, const Mat3& rotation,
                       const Vec3& shift) {
  PointCloud out;
  for (const Vec3& p : cloud.positions) out.push_back(rotation * p + shift);
  return out;
}

} // namespace

TEST_CASE("identical clouds score perfectly") {
  const PointCloud cloud = random_cloud(1, 400, -2.0, 2.0);
  CHECK(chamfer(cloud, cloud) == 0.0);
  CHECK(hausdorff(cloud, cloud) == 0.0);
  CHECK(fscore(cloud, cloud, 0.05) == 100.0);
  const CloudMetrics m = evaluate_clouds(cloud, cloud, 0.05);
  CHECK(m.chamfer == 0.0);
  CHECK(m.hausdorff == 0.0);
  CHECK(m.fscore == 100.0);
  CHECK(m.threshold == 0.05);
}

TEST_CASE("two single points two meters apart") {
  PointCloud a;
  a.push_back(Vec3(0, 0, 0));
  PointCloud b;
  b.push_back(Vec3(2, 0, 0));
  CHECK(chamfer(a, b) == 2.0);
  CHECK(hausdorff(a, b) == 2.0);
  CHECK(fscore(a, b, 0.05) == 0.0);
  CHECK(fscore(a, b, 2.0) == 100.0);
}

TEST_CASE("matched point plus one distant outlier") {
  PointCloud b;
  b.push_back(Vec3(0, 0, 0));
  PointCloud a = b;
  a.push_back(Vec3(5, 0, 0));
  // a -> b distances {0, 5}; b -> a distances {0}.
  CHECK(hausdorff(a, b) == 5.0);
  CHECK(chamfer(a, b) == 1.25);
  // Precision 1/2, recall 1: harmonic mean of percentages.
  CHECK(fscore(a, b, 0.05) == doctest::Approx(200.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("acceleration structure matches brute force bitwise") {
  for (int pair = 0; pair < 100; ++pair) {
    // Half the fixtures snap to a coarse lattice so duplicates and exact
    // distance ties occur.
    const bool snap = (pair % 2) == 1;
    const PointCloud a =
        random_cloud(1000 + static_cast<uint64_t>(pair) * 2, 1000, -3.0, 3.0, snap);
    const PointCloud b =
        random_cloud(1001 + static_cast<uint64_t>(pair) * 2, 1000, -3.0, 3.0, snap);
    const std::vector<double> fast = nearest_distances(a, b);
    const std::vector<double> slow = nearest_distances_brute(a, b);
    REQUIRE(fast.size() == slow.size());
    bool all_equal = true;
    for (size_t i = 0; i < fast.size(); ++i) {
      if (fast[i] != slow[i]) all_equal = false;
    }
    CHECK(all_equal);
  }
}

TEST_CASE("shifted lattice has uniform offset metrics") {
  const PointCloud grid = cube_grid(10, 1.0, Vec3::Zero());
  const PointCloud shifted = cube_grid(10, 1.0, Vec3(0.1, 0.0, 0.0));
  // Every point's nearest neighbour is its shifted twin at distance 0.1.
  CHECK(chamfer(grid, shifted) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(hausdorff(grid, shifted) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(fscore(grid, shifted, 0.05) == 0.0);
  CHECK(fscore(grid, shifted, 0.11) == 100.0);
}

TEST_CASE("metrics are symmetric in their arguments") {
  const PointCloud a = random_cloud(7, 300, -1.0, 1.0);
  const PointCloud b = random_cloud(8, 250, -1.0, 1.5);
  CHECK(chamfer(a, b) == chamfer(b, a));
  CHECK(hausdorff(a, b) == hausdorff(b, a));
  CHECK(fscore(a, b, 0.3) == fscore(b, a, 0.3));
}

TEST_CASE("rigid motion leaves metrics unchanged") {
  const PointCloud a = random_cloud(21, 400, -2.0, 2.0);
  const PointCloud b = random_cloud(22, 350, -2.0, 2.0);
  const Mat3 rotation =
      Eigen::AngleAxisd(0.9, Vec3(1, -2, 2).normalized()).toRotationMatrix();
  const Vec3 shift(4.0, -7.0, 2.5);
  const PointCloud a2 = transformed(a, rotation, shift);
  const PointCloud b2 = transformed(b, rotation, shift);
  CHECK(chamfer(a2, b2) == doctest::Approx(chamfer(a, b)).epsilon(1e-9));
  CHECK(hausdorff(a2, b2) == doctest::Approx(hausdorff(a, b)).epsilon(1e-9));
  CHECK(fscore(a2, b2, 0.2) == doctest::Approx(fscore(a, b, 0.2)).epsilon(1e-9));
}

TEST_CASE("chamfer never exceeds hausdorff") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const PointCloud a = random_cloud(100 + seed, 120, -2.0, 2.0);
    const PointCloud b = random_cloud(200 + seed, 90, -1.0, 3.0);
    CHECK(chamfer(a, b) <= hausdorff(a, b));
  }
}

TEST_CASE("distant clouds score zero under a tight threshold") {
  const PointCloud a = random_cloud(31, 100, 0.0, 1.0);
  const PointCloud b = random_cloud(32, 100, 50.0, 51.0);
  CHECK(fscore(a, b, 0.05) == 0.0);
}

TEST_CASE("evaluate_clouds agrees with the individual metrics") {
  const PointCloud a = random_cloud(41, 320, -1.0, 1.0);
  const PointCloud b = random_cloud(42, 280, -1.2, 0.9);
  const CloudMetrics m = evaluate_clouds(a, b, 0.25);
  CHECK(m.chamfer == chamfer(a, b));
  CHECK(m.hausdorff == hausdorff(a, b));
  CHECK(m.fscore == fscore(a, b, 0.25));
  CHECK(m.threshold == 0.25);
}

TEST_CASE("degenerate inputs are rejected") {
  const PointCloud cloud = random_cloud(51, 10, 0.0, 1.0);
  const PointCloud empty;
  CHECK_THROWS_AS(chamfer(empty, cloud), EmptyCloud);
  CHECK_THROWS_AS(chamfer(cloud, empty), EmptyCloud);
  CHECK_THROWS_AS(hausdorff(empty, cloud), EmptyCloud);
  CHECK_THROWS_AS(fscore(cloud, empty, 0.05), EmptyCloud);
  CHECK_THROWS_AS(evaluate_clouds(empty, empty, 0.05), EmptyCloud);
  CHECK_THROWS_AS(nearest_distances(cloud, empty), EmptyCloud);
  CHECK_THROWS_AS(nearest_distances_brute(cloud, empty), EmptyCloud);
  CHECK_THROWS_AS(fscore(cloud, cloud, -0.1), BadRange);
  CHECK_THROWS_AS(evaluate_clouds(cloud, cloud, -1.0), BadRange);
}
