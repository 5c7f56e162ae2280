// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "rfpc/geometry.hpp"

namespace rfpc {

/// Row-major image with intensities normalized to [0,1]; 1 or 3 channels.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> data;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, int c)
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, 0.0) {}

  double& at(int x, int y, int c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  double at(int x, int y, int c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  Vec3 rgb(int x, int y) const {
    if (channels == 1) {
      const double v = at(x, y);
      return Vec3(v, v, v);
    }
    return Vec3(at(x, y, 0), at(x, y, 1), at(x, y, 2));
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

/// Rec.601 luminance; identity on single-channel images.
ImageBuffer to_grayscale(const ImageBuffer& image);

ImageBuffer load_pgm(const std::string& path);
void save_pgm(const ImageBuffer& image, const std::string& path);

ImageBuffer load_png(const std::string& path);
void save_png(const ImageBuffer& image, const std::string& path);

/// Dispatches on the file extension (.png, .pgm).
ImageBuffer load_image(const std::string& path);
void save_image(const ImageBuffer& image, const std::string& path);

} // namespace rfpc
