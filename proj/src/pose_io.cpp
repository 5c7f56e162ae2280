// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/pose_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "rfpc/errors.hpp"

namespace rfpc {

using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

std::string stem_of(const std::string& path) {
  const size_t slash = path.find_last_of("/\\");
  const size_t start = slash == std::string::npos ? 0 : slash + 1;
  const size_t dot = path.find_last_of('.');
  const size_t end = (dot == std::string::npos || dot < start) ? path.size() : dot;
  return path.substr(start, end - start);
}

std::vector<CameraPose> load_transforms_json(const std::string& path) {
  const json j = load_json_file(path);
  for (const char* key : {"fl_x", "fl_y", "cx", "cy", "w", "h"}) {
    if (!j.contains(key)) {
      throw ParseError(path + ": transforms json missing key " +
                       std::string(key));
    }
  }
  const double fx = j.at("fl_x").get<double>();
  const double fy = j.at("fl_y").get<double>();
  const double cx = j.at("cx").get<double>();
  const double cy = j.at("cy").get<double>();
  const int w = j.at("w").get<int>();
  const int h = j.at("h").get<int>();
  if (!j.contains("frames") || !j.at("frames").is_array()) {
    throw ParseError(path + ": transforms json missing frames array");
  }

  std::vector<CameraPose> poses;
  for (const json& frame : j.at("frames")) {
    if (!frame.contains("transform_matrix")) {
      throw ParseError(path + ": frame missing transform_matrix");
    }
    const json& tm = frame.at("transform_matrix");
    if (!tm.is_array() || tm.size() != 4) {
      throw ParseError(path + ": transform_matrix must be 4x4");
    }
    Mat4 m;
    for (int r = 0; r < 4; ++r) {
      const json& row = tm.at(r);
      if (!row.is_array() || row.size() != 4) {
        throw ParseError(path + ": transform_matrix must be 4x4");
      }
      for (int c = 0; c < 4; ++c) m(r, c) = row.at(c).get<double>();
    }
    std::string id = frame.contains("file_path")
                         ? stem_of(frame.at("file_path").get<std::string>())
                         : "frame_" + std::to_string(poses.size());
    poses.push_back(make_camera_pose(id, m.block<3, 1>(0, 3),
                                     m.block<3, 3>(0, 0), fx, fy, cx, cy, w,
                                     h));
  }
  if (poses.empty()) throw EmptySet(path + ": no camera poses");
  return poses;
}

std::vector<CameraPose> load_pose_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<CameraPose> poses;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string id;
    if (!std::getline(ls, id, ',')) {
      throw ParseError(path + ": line " + std::to_string(lineno));
    }
    double fields[18];
    for (int i = 0; i < 18; ++i) {
      std::string cell;
      if (!std::getline(ls, cell, ',')) {
        throw ParseError(path + ": line " + std::to_string(lineno) +
                         ": expected 19 comma-separated fields");
      }
      try {
        fields[i] = std::stod(cell);
      } catch (const std::exception&) {
        throw ParseError(path + ": line " + std::to_string(lineno) +
                         ": bad number '" + cell + "'");
      }
    }
    const Vec3 origin(fields[0], fields[1], fields[2]);
    Mat3 rot;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rot(r, c) = fields[3 + 3 * r + c];
    poses.push_back(make_camera_pose(
        id, origin, rot, fields[12], fields[13], fields[14], fields[15],
        static_cast<int>(fields[16]), static_cast<int>(fields[17])));
  }
  if (poses.empty()) throw EmptySet(path + ": no camera poses");
  return poses;
}

} // namespace

PoseFormat pose_format_from_path(const std::string& path) {
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    return PoseFormat::transforms_json;
  }
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    return PoseFormat::pose_csv;
  }
  throw ParseError(path + ": cannot infer pose format from extension");
}

std::vector<CameraPose> load_poses(const std::string& path, PoseFormat format) {
  switch (format) {
    case PoseFormat::transforms_json: return load_transforms_json(path);
    case PoseFormat::pose_csv: return load_pose_csv(path);
  }
  throw ParseError("unknown pose format");
}

std::vector<CameraPose> load_poses(const std::string& path) {
  return load_poses(path, pose_format_from_path(path));
}

void save_poses_csv(const std::vector<CameraPose>& poses,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << std::setprecision(17);
  for (const CameraPose& p : poses) {
    out << p.id;
    for (int i = 0; i < 3; ++i) out << ',' << p.origin[i];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out << ',' << p.rotation(r, c);
    out << ',' << p.fx << ',' << p.fy << ',' << p.cx << ',' << p.cy << ','
        << p.width << ',' << p.height << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

void save_poses_transforms_json(const std::vector<CameraPose>& poses,
                                const std::string& path) {
  if (poses.empty()) throw EmptySet("no poses to save");
  json j;
  j["fl_x"] = poses.front().fx;
  j["fl_y"] = poses.front().fy;
  j["cx"] = poses.front().cx;
  j["cy"] = poses.front().cy;
  j["w"] = poses.front().width;
  j["h"] = poses.front().height;
  j["frames"] = json::array();
  for (const CameraPose& p : poses) {
    json frame;
    frame["file_path"] = p.id;
    json tm = json::array();
    for (int r = 0; r < 3; ++r) {
      json row = json::array();
      for (int c = 0; c < 3; ++c) row.push_back(p.rotation(r, c));
      row.push_back(p.origin[r]);
      tm.push_back(row);
    }
    tm.push_back(json::array({0.0, 0.0, 0.0, 1.0}));
    frame["transform_matrix"] = tm;
    j["frames"].push_back(frame);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

std::vector<FocusArea> load_focus_areas(const std::string& path) {
  const json j = load_json_file(path);
  if (!j.is_array()) throw ParseError(path + ": expected a JSON array");
  std::vector<FocusArea> areas;
  for (const json& entry : j) {
    if (!entry.contains("center") || !entry.contains("radius")) {
      throw ParseError(path + ": area entry needs center and radius");
    }
    const json& c = entry.at("center");
    if (!c.is_array() || c.size() != 3) {
      throw ParseError(path + ": center must have 3 components");
    }
    FocusArea area;
    area.center = Vec3(c.at(0).get<double>(), c.at(1).get<double>(),
                       c.at(2).get<double>());
    area.radius = entry.at("radius").get<double>();
    if (entry.contains("member_camera_ids")) {
      for (const json& id : entry.at("member_camera_ids")) {
        area.member_camera_ids.push_back(id.get<std::string>());
      }
    }
    if (entry.contains("low_confidence")) {
      area.low_confidence = entry.at("low_confidence").get<bool>();
    }
    areas.push_back(std::move(area));
  }
  return areas;
}

void save_focus_areas(const std::vector<FocusArea>& areas,
                      const std::string& path) {
  json j = json::array();
  for (const FocusArea& area : areas) {
    json entry;
    entry["center"] = {area.center.x(), area.center.y(), area.center.z()};
    entry["radius"] = area.radius;
    if (!area.member_camera_ids.empty()) {
      entry["member_camera_ids"] = area.member_camera_ids;
    }
    if (area.low_confidence) entry["low_confidence"] = true;
    j.push_back(entry);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

} // namespace rfpc
