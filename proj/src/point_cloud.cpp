// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rfpc/errors.hpp"

namespace rfpc {

namespace {

uint8_t quantize_color(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<uint8_t>(std::lround(clamped * 255.0));
}

} // namespace

void save_ply(const PointCloud& cloud, const std::string& path) {
  if (cloud.has_colors() && cloud.colors.size() != cloud.positions.size()) {
    throw IoError("point cloud has mismatched color count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");

  out << "ply\n"
      << "format binary_little_endian 1.0\n"
      << "element vertex " << cloud.size() << "\n"
      << "property float x\n"
      << "property float y\n"
      << "property float z\n";
  if (cloud.has_colors()) {
    out << "property uchar red\n"
        << "property uchar green\n"
        << "property uchar blue\n";
  }
  out << "end_header\n";

  const size_t stride = 12 + (cloud.has_colors() ? 3 : 0);
  std::vector<uint8_t> record(stride);
  for (size_t i = 0; i < cloud.size(); ++i) {
    float xyz[3] = {static_cast<float>(cloud.positions[i].x()),
                    static_cast<float>(cloud.positions[i].y()),
                    static_cast<float>(cloud.positions[i].z())};
    std::memcpy(record.data(), xyz, 12);
    if (cloud.has_colors()) {
      record[12] = quantize_color(cloud.colors[i].x());
      record[13] = quantize_color(cloud.colors[i].y());
      record[14] = quantize_color(cloud.colors[i].z());
    }
    out.write(reinterpret_cast<const char*>(record.data()),
              static_cast<std::streamsize>(stride));
  }
  if (!out) throw IoError("failed writing " + path);
}

PointCloud load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || line != "ply") {
    throw ParseError(path + ": missing ply magic");
  }

  size_t vertex_count = 0;
  bool binary_le = false;
  bool in_vertex_element = false;
  std::vector<std::string> vertex_props;
  std::vector<std::string> vertex_types;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "end_header") break;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "comment") continue;
    if (word == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      binary_le = (fmt == "binary_little_endian");
      if (!binary_le) {
        throw ParseError(path + ": only binary_little_endian PLY supported");
      }
    } else if (word == "element") {
      std::string name;
      size_t count = 0;
      ls >> name >> count;
      in_vertex_element = (name == "vertex");
      if (in_vertex_element) vertex_count = count;
      else if (count != 0) {
        throw ParseError(path + ": unsupported non-vertex element " + name);
      }
    } else if (word == "property") {
      if (!in_vertex_element) continue;
      std::string type, name;
      ls >> type >> name;
      vertex_types.push_back(type);
      vertex_props.push_back(name);
    }
  }
  if (!in) throw ParseError(path + ": truncated PLY header");

  int off_x = -1, off_y = -1, off_z = -1;
  int off_r = -1, off_g = -1, off_b = -1;
  size_t stride = 0;
  auto type_size = [&](const std::string& t) -> size_t {
    if (t == "float" || t == "float32") return 4;
    if (t == "double" || t == "float64") return 8;
    if (t == "uchar" || t == "uint8" || t == "char" || t == "int8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32") return 4;
    throw ParseError(path + ": unsupported property type " + t);
  };
  for (size_t i = 0; i < vertex_props.size(); ++i) {
    const int off = static_cast<int>(stride);
    const std::string& name = vertex_props[i];
    const std::string& type = vertex_types[i];
    if (name == "x" || name == "y" || name == "z") {
      if (type != "float" && type != "float32") {
        throw ParseError(path + ": position property must be float");
      }
      (name == "x" ? off_x : name == "y" ? off_y : off_z) = off;
    } else if (name == "red" || name == "green" || name == "blue") {
      if (type_size(type) != 1) {
        throw ParseError(path + ": color property must be uchar");
      }
      (name == "red" ? off_r : name == "green" ? off_g : off_b) = off;
    }
    stride += type_size(type);
  }
  if (off_x < 0 || off_y < 0 || off_z < 0) {
    throw ParseError(path + ": PLY lacks x,y,z vertex properties");
  }
  const bool has_colors = off_r >= 0 && off_g >= 0 && off_b >= 0;

  PointCloud cloud;
  cloud.positions.reserve(vertex_count);
  if (has_colors) cloud.colors.reserve(vertex_count);

  std::vector<uint8_t> record(stride);
  for (size_t i = 0; i < vertex_count; ++i) {
    in.read(reinterpret_cast<char*>(record.data()),
            static_cast<std::streamsize>(stride));
    if (static_cast<size_t>(in.gcount()) != stride) {
      throw ParseError(path + ": truncated PLY vertex data");
    }
    float xyz[3];
    std::memcpy(&xyz[0], record.data() + off_x, 4);
    std::memcpy(&xyz[1], record.data() + off_y, 4);
    std::memcpy(&xyz[2], record.data() + off_z, 4);
    cloud.positions.emplace_back(xyz[0], xyz[1], xyz[2]);
    if (has_colors) {
      cloud.colors.emplace_back(record[off_r] / 255.0, record[off_g] / 255.0,
                                record[off_b] / 255.0);
    }
  }
  return cloud;
}

} // namespace rfpc
