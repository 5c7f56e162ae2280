// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/edges.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rfpc/errors.hpp"

namespace rfpc {

size_t EdgeMap::edge_count() const {
  size_t n = 0;
  for (uint8_t v : mask) n += (v != 0);
  return n;
}

namespace {

// Sector split constants: tan(pi/8) and tan(3*pi/8), pinned as literals so
// the golden generator can use the exact same doubles.
constexpr double kTanPi8 = 0.41421356237309503;
constexpr double kTan3Pi8 = 2.414213562373095;

// Below this, the strongest gradient in the image is rounding residue and
// max-normalization would amplify it to full scale.
constexpr double kMagnitudeFloor = 1e-12;

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

std::vector<double> gaussian_taps(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-(static_cast<double>(i) * i) /
                                (2.0 * sigma * sigma));
  }
  double total = 0.0;
  for (double t : taps) total += t;
  for (double& t : taps) t /= total;
  return taps;
}

EdgeMap detect_edges_impl(const ImageBuffer& image, double blur_sigma,
                          double low_threshold, double high_threshold,
                          bool parallel) {
  if (!(low_threshold > 0.0) || !(low_threshold < high_threshold)) {
    throw BadThresholds("edge thresholds must satisfy 0 < low < high");
  }
  if (blur_sigma < 0.0) throw BadRange("blur sigma must be non-negative");
  const ImageBuffer gray =
      image.channels == 1 ? image : to_grayscale(image);
  const int w = gray.width;
  const int h = gray.height;
  const size_t n = static_cast<size_t>(w) * h;

  std::vector<double> smoothed(gray.data);
  if (blur_sigma > 0.0) {
    const std::vector<double> taps = gaussian_taps(blur_sigma);
    const int radius = static_cast<int>(taps.size() / 2);
    std::vector<double> tmp(n, 0.0);
    // Horizontal pass, clamped borders.
#pragma omp parallel for if (parallel) schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += taps[i + radius] *
                 smoothed[static_cast<size_t>(y) * w + clamp_index(x + i, w)];
        }
        tmp[static_cast<size_t>(y) * w + x] = acc;
      }
    }
    // Vertical pass.
#pragma omp parallel for if (parallel) schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += taps[i + radius] *
                 tmp[static_cast<size_t>(clamp_index(y + i, h)) * w + x];
        }
        smoothed[static_cast<size_t>(y) * w + x] = acc;
      }
    }
  }

  // Sobel gradients, clamped borders, fixed tap order.
  static const int kSobelX[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int kSobelY[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  std::vector<double> gx(n, 0.0), gy(n, 0.0), magnitude(n, 0.0);
#pragma omp parallel for if (parallel) schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double ax = 0.0;
      double ay = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const double v = smoothed[static_cast<size_t>(clamp_index(y + dy, h)) * w +
                                    clamp_index(x + dx, w)];
          ax += kSobelX[dy + 1][dx + 1] * v;
          ay += kSobelY[dy + 1][dx + 1] * v;
        }
      }
      const size_t idx = static_cast<size_t>(y) * w + x;
      gx[idx] = ax;
      gy[idx] = ay;
      magnitude[idx] = std::sqrt(ax * ax + ay * ay);
    }
  }

  double max_mag = 0.0;
#pragma omp parallel for if (parallel) schedule(static) reduction(max : max_mag)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      max_mag = std::max(max_mag, magnitude[static_cast<size_t>(y) * w + x]);
    }
  }

  EdgeMap out;
  out.width = w;
  out.height = h;
  out.mask.assign(n, 0);
  if (max_mag <= kMagnitudeFloor) return out;

#pragma omp parallel for if (parallel) schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t idx = static_cast<size_t>(y) * w + x;
      magnitude[idx] /= max_mag;
    }
  }

  // Non-maximum suppression on quantized gradient directions. A pixel
  // survives when it beats the backward neighbor strictly and the forward
  // neighbor at least weakly, which keeps symmetric ridges one pixel wide.
  std::vector<uint8_t> strong(n, 0), weak(n, 0);
#pragma omp parallel for if (parallel) schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t idx = static_cast<size_t>(y) * w + x;
      const double m = magnitude[idx];
      if (m < low_threshold) continue;
      const double ax = std::abs(gx[idx]);
      const double ay = std::abs(gy[idx]);
      int nx;
      int ny;
      if (ay <= kTanPi8 * ax) {
        nx = 1;
        ny = 0;
      } else if (ay >= kTan3Pi8 * ax) {
        nx = 0;
        ny = 1;
      } else if (gx[idx] * gy[idx] > 0.0) {
        nx = 1;
        ny = 1;
      } else {
        nx = 1;
        ny = -1;
      }
      auto mag_at = [&](int px, int py) {
        if (px < 0 || px >= w || py < 0 || py >= h) return 0.0;
        return magnitude[static_cast<size_t>(py) * w + px];
      };
      const double forward = mag_at(x + nx, y + ny);
      const double backward = mag_at(x - nx, y - ny);
      if (m >= forward && m > backward) {
        if (m >= high_threshold) {
          strong[idx] = 1;
        } else {
          weak[idx] = 1;
        }
      }
    }
  }

  // Hysteresis: edges are strong pixels plus weak pixels 8-connected to them.
  std::vector<size_t> stack;
  for (size_t i = 0; i < n; ++i) {
    if (strong[i]) {
      out.mask[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const size_t idx = stack.back();
    stack.pop_back();
    const int x = static_cast<int>(idx % w);
    const int y = static_cast<int>(idx / w);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int px = x + dx;
        const int py = y + dy;
        if (px < 0 || px >= w || py < 0 || py >= h) continue;
        const size_t p = static_cast<size_t>(py) * w + px;
        if (weak[p] && !out.mask[p]) {
          out.mask[p] = 1;
          stack.push_back(p);
        }
      }
    }
  }
  return out;
}

} // namespace

EdgeMap detect_edges(const ImageBuffer& image, double blur_sigma,
                     double low_threshold, double high_threshold) {
  return detect_edges_impl(image, blur_sigma, low_threshold, high_threshold,
                           true);
}

EdgeMap detect_edges_serial(const ImageBuffer& image, double blur_sigma,
                            double low_threshold, double high_threshold) {
  return detect_edges_impl(image, blur_sigma, low_threshold, high_threshold,
                           false);
}

std::vector<Eigen::Vector2i> bresenham_segment(const Eigen::Vector2i& a,
                                               const Eigen::Vector2i& b) {
  std::vector<Eigen::Vector2i> pixels;
  int x = a.x();
  int y = a.y();
  const int dx = std::abs(b.x() - a.x());
  const int dy = -std::abs(b.y() - a.y());
  const int sx = a.x() < b.x() ? 1 : -1;
  const int sy = a.y() < b.y() ? 1 : -1;
  int err = dx + dy;
  while (true) {
    pixels.emplace_back(x, y);
    if (x == b.x() && y == b.y()) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
  return pixels;
}

namespace {

// 16 integer step directions, ascending by angle from the +x axis.
constexpr int kDirections[16][2] = {
    {1, 0},  {2, 1},   {1, 1},   {1, 2},  {0, 1},  {-1, 2}, {-1, 1}, {-2, 1},
    {-1, 0}, {-2, -1}, {-1, -1}, {-1, -2}, {0, -1}, {1, -2}, {1, -1}, {2, -1}};

bool segment_clear(const EdgeMap& edges, const Eigen::Vector2i& a,
                   const Eigen::Vector2i& b) {
  for (const Eigen::Vector2i& p : bresenham_segment(a, b)) {
    if (edges.at(p.x(), p.y())) return false;
  }
  return true;
}

} // namespace

PixelTriplet triplet_at(const EdgeMap& edges, const Eigen::Vector2i& q1,
                        double max_segment) {
  if (max_segment <= 0.0) throw BadRange("max_segment must be positive");
  PixelTriplet triplet;
  triplet.q0 = triplet.q1 = triplet.q2 = q1;
  if (edges.at(q1.x(), q1.y())) return triplet;

  double best_norm = 0.0;
  Eigen::Vector2i best_v = Eigen::Vector2i::Zero();
  for (const auto& dir : kDirections) {
    const Eigen::Vector2i step(dir[0], dir[1]);
    const double step_norm =
        std::sqrt(static_cast<double>(step.squaredNorm()));
    const int max_steps =
        static_cast<int>(std::floor(max_segment / 2.0 / step_norm));
    int reach = 0;
    for (int s = 1; s <= max_steps; ++s) {
      const Eigen::Vector2i lo = q1 - s * step;
      const Eigen::Vector2i hi = q1 + s * step;
      if (!edges.in_bounds(lo.x(), lo.y()) || !edges.in_bounds(hi.x(), hi.y())) {
        break;
      }
      if (!segment_clear(edges, lo, hi)) break;
      reach = s;
    }
    const double norm = reach * step_norm;
    if (norm > best_norm) {
      best_norm = norm;
      best_v = reach * step;
    }
  }
  if (best_norm > 0.0) {
    triplet.q0 = q1 - best_v;
    triplet.q2 = q1 + best_v;
    triplet.is_collinear_candidate = true;
  }
  return triplet;
}

PixelTriplet sample_triplet(const EdgeMap& edges, Rng& rng,
                            double max_segment) {
  if (edges.width < 3 || edges.height < 3) {
    throw BadRange("triplet sampling needs at least a 3x3 image");
  }
  const int x = static_cast<int>(rng.next_below(edges.width));
  const int y = static_cast<int>(rng.next_below(edges.height));
  const Eigen::Vector2i q1(x, y);
  if (edges.at(x, y)) {
    PixelTriplet triplet;
    triplet.q1 = q1;
    triplet.q0 = Eigen::Vector2i(static_cast<int>(rng.next_below(edges.width)),
                                 static_cast<int>(rng.next_below(edges.height)));
    triplet.q2 = Eigen::Vector2i(static_cast<int>(rng.next_below(edges.width)),
                                 static_cast<int>(rng.next_below(edges.height)));
    return triplet;
  }
  return triplet_at(edges, q1, max_segment);
}

} // namespace rfpc
