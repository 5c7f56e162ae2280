// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rfpc/errors.hpp"

namespace rfpc {

namespace {

uint8_t quantize(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<uint8_t>(std::lround(clamped * 255.0));
}

} // namespace

ImageBuffer to_grayscale(const ImageBuffer& image) {
  if (image.channels == 1) return image;
  if (image.channels != 3) {
    throw ParseError("to_grayscale: expected 1 or 3 channels");
  }
  ImageBuffer gray(image.width, image.height, 1);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      gray.at(x, y) = 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
                      0.114 * image.at(x, y, 2);
    }
  }
  return gray;
}

ImageBuffer load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw ParseError(path + ": not a binary PGM");

  auto next_int = [&](const char* what) {
    // Skip whitespace and '#' comment lines between header fields.
    int c = in.peek();
    while (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '#') {
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else {
        in.get();
      }
      c = in.peek();
    }
    long value = -1;
    in >> value;
    if (!in || value < 0) {
      throw ParseError(path + ": bad PGM header field: " + what);
    }
    return value;
  };

  const long w = next_int("width");
  const long h = next_int("height");
  const long maxval = next_int("maxval");
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw ParseError(path + ": unsupported PGM dimensions or maxval");
  }
  in.get(); // single whitespace before raster

  std::vector<uint8_t> raw(static_cast<size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(in.gcount()) != raw.size()) {
    throw ParseError(path + ": truncated PGM raster");
  }

  ImageBuffer image(static_cast<int>(w), static_cast<int>(h), 1);
  for (size_t i = 0; i < raw.size(); ++i) {
    image.data[i] = static_cast<double>(raw[i]) / static_cast<double>(maxval);
  }
  return image;
}

void save_pgm(const ImageBuffer& image, const std::string& path) {
  const ImageBuffer gray = to_grayscale(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "P5\n" << gray.width << " " << gray.height << "\n255\n";
  std::vector<uint8_t> raw(gray.data.size());
  for (size_t i = 0; i < raw.size(); ++i) raw[i] = quantize(gray.data[i]);
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("failed writing " + path);
}

ImageBuffer load_png(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw IoError("cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw ParseError(path + ": libpng failed to decode");
  }

  png_init_io(png, fp);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  // Alpha carries no radiance information here; drop it.
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw ParseError(path + ": unsupported PNG channel count");
  }

  std::vector<uint8_t> raw(static_cast<size_t>(w) * h * channels);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) {
    rows[y] = raw.data() + static_cast<size_t>(y) * w * channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);

  ImageBuffer image(static_cast<int>(w), static_cast<int>(h), channels);
  for (size_t i = 0; i < raw.size(); ++i) {
    image.data[i] = static_cast<double>(raw[i]) / 255.0;
  }
  return image;
}

void save_png(const ImageBuffer& image, const std::string& path) {
  if (image.channels != 1 && image.channels != 3) {
    throw ParseError("save_png: expected 1 or 3 channels");
  }
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open " + path + " for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("libpng failed to encode " + path);
  }

  png_init_io(png, fp);
  const int color_type =
      image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<uint8_t> raw(image.data.size());
  for (size_t i = 0; i < raw.size(); ++i) raw[i] = quantize(image.data[i]);
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y) {
    rows[y] = raw.data() + static_cast<size_t>(y) * image.width * image.channels;
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

ImageBuffer load_image(const std::string& path) {
  if (ends_with(path, ".png")) return load_png(path);
  if (ends_with(path, ".pgm")) return load_pgm(path);
  throw ParseError(path + ": unsupported image extension");
}

void save_image(const ImageBuffer& image, const std::string& path) {
  if (ends_with(path, ".png")) {
    save_png(image, path);
  } else if (ends_with(path, ".pgm")) {
    save_pgm(image, path);
  } else {
    throw ParseError(path + ": unsupported image extension");
  }
}

} // namespace rfpc
