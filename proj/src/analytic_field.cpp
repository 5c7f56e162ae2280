// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/analytic_field.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rfpc/errors.hpp"

namespace rfpc {

using nlohmann::json;

bool AnalyticPart::inside(const Vec3& p) const {
  switch (shape) {
    case Shape::half_space:
      return normal.dot(p) <= offset;
    case Shape::ball:
      return (p - center).norm() <= radius;
    case Shape::box:
      return bounds.contains(p);
    case Shape::fog_slab: {
      const double s = normal.dot(p);
      return s >= lo && s <= hi;
    }
    case Shape::fog_frame: {
      if (!bounds.contains(p)) return false;
      const bool in_inner = p.x() >= inner_min.x() && p.x() <= inner_max.x() &&
                            p.y() >= inner_min.y() && p.y() <= inner_max.y();
      return !in_inner;
    }
  }
  return false;
}

Vec3 AnalyticPart::albedo_at(const Vec3& p) const {
  if (!checker) return albedo;
  const long long iu = static_cast<long long>(
      std::floor(p[checker->axis_u] / checker->block));
  const long long iv = static_cast<long long>(
      std::floor(p[checker->axis_v] / checker->block));
  return ((iu + iv) % 2 + 2) % 2 == 0 ? albedo : checker->color2;
}

double AnalyticPart::entry_distance(const Ray& ray) const {
  switch (shape) {
    case Shape::half_space: {
      const double s = normal.dot(ray.origin) - offset;
      if (s <= 0.0) return 0.0;
      const double d = normal.dot(ray.direction);
      if (d >= 0.0) return kInf;
      return s / -d;
    }
    case Shape::ball: {
      const Vec3 oc = ray.origin - center;
      const double c2 = oc.squaredNorm() - radius * radius;
      if (c2 <= 0.0) return 0.0;
      const double b = oc.dot(ray.direction);
      const double disc = b * b - c2;
      if (disc < 0.0) return kInf;
      const double t = -b - std::sqrt(disc);
      return t >= 0.0 ? t : kInf;
    }
    case Shape::box: {
      if (bounds.contains(ray.origin)) return 0.0;
      double t_enter = 0.0;
      double t_exit = kInf;
      for (int a = 0; a < 3; ++a) {
        const double o = ray.origin[a];
        const double d = ray.direction[a];
        if (d == 0.0) {
          if (o < bounds.min[a] || o > bounds.max[a]) return kInf;
          continue;
        }
        double t0 = (bounds.min[a] - o) / d;
        double t1 = (bounds.max[a] - o) / d;
        if (t0 > t1) std::swap(t0, t1);
        t_enter = std::max(t_enter, t0);
        t_exit = std::min(t_exit, t1);
      }
      return (t_enter <= t_exit) ? t_enter : kInf;
    }
    case Shape::fog_slab:
    case Shape::fog_frame:
      return kInf;
  }
  return kInf;
}

double AnalyticPart::exterior_distance(const Vec3& p) const {
  switch (shape) {
    case Shape::half_space:
      return std::max(0.0, normal.dot(p) - offset);
    case Shape::ball:
      return std::max(0.0, (p - center).norm() - radius);
    case Shape::box: {
      const Vec3 d = (bounds.min - p).cwiseMax(p - bounds.max).cwiseMax(0.0);
      return d.norm();
    }
    case Shape::fog_slab:
    case Shape::fog_frame:
      return kInf;
  }
  return kInf;
}

AnalyticField::AnalyticField(std::vector<AnalyticPart> parts,
                             double scene_scale)
    : parts_(std::move(parts)), scene_scale_(scene_scale) {
  if (parts_.empty()) throw EmptySet("analytic field needs at least one part");
  if (!(scene_scale_ > 0.0)) {
    throw BadRange("analytic field scene_scale must be positive");
  }
}

FieldSample AnalyticField::query(const Vec3& position, const Vec3&) const {
  for (const AnalyticPart& part : parts_) {
    if (part.is_solid() && part.inside(position)) {
      return {opaque_density(), part.albedo_at(position)};
    }
  }
  FieldSample sample;
  bool first_fog = true;
  for (const AnalyticPart& part : parts_) {
    if (!part.is_solid() && part.inside(position)) {
      sample.density += part.fog_density;
      if (first_fog) {
        sample.color = part.albedo_at(position);
        first_fog = false;
      }
    }
  }
  return sample;
}

double AnalyticField::analytic_depth(const Ray& ray) const {
  double best = kInf;
  for (const AnalyticPart& part : parts_) {
    if (part.is_solid()) best = std::min(best, part.entry_distance(ray));
  }
  return best;
}

double AnalyticField::surface_distance(const Vec3& p) const {
  double best = kInf;
  for (const AnalyticPart& part : parts_) {
    if (part.is_solid()) best = std::min(best, part.exterior_distance(p));
  }
  return best;
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected 3-vector");
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(),
              j.at(2).get<double>());
}

const char* shape_name(AnalyticPart::Shape s) {
  switch (s) {
    case AnalyticPart::Shape::half_space: return "half_space";
    case AnalyticPart::Shape::ball: return "ball";
    case AnalyticPart::Shape::box: return "box";
    case AnalyticPart::Shape::fog_slab: return "fog_slab";
    case AnalyticPart::Shape::fog_frame: return "fog_frame";
  }
  return "half_space";
}

AnalyticPart::Shape shape_from_name(const std::string& name) {
  if (name == "half_space") return AnalyticPart::Shape::half_space;
  if (name == "ball") return AnalyticPart::Shape::ball;
  if (name == "box") return AnalyticPart::Shape::box;
  if (name == "fog_slab") return AnalyticPart::Shape::fog_slab;
  if (name == "fog_frame") return AnalyticPart::Shape::fog_frame;
  throw ParseError("unknown analytic part shape: " + name);
}

} // namespace

AnalyticField load_analytic_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.contains("scene_scale") || !j.contains("parts")) {
    throw ParseError(path + ": field json needs scene_scale and parts");
  }
  std::vector<AnalyticPart> parts;
  for (const json& pj : j.at("parts")) {
    AnalyticPart part;
    part.shape = shape_from_name(pj.at("shape").get<std::string>());
    if (pj.contains("normal")) part.normal = vec3_from_json(pj.at("normal"));
    if (pj.contains("offset")) part.offset = pj.at("offset").get<double>();
    if (pj.contains("lo")) part.lo = pj.at("lo").get<double>();
    if (pj.contains("hi")) part.hi = pj.at("hi").get<double>();
    if (pj.contains("center")) part.center = vec3_from_json(pj.at("center"));
    if (pj.contains("radius")) part.radius = pj.at("radius").get<double>();
    if (pj.contains("min")) part.bounds.min = vec3_from_json(pj.at("min"));
    if (pj.contains("max")) part.bounds.max = vec3_from_json(pj.at("max"));
    if (pj.contains("inner_min")) {
      part.inner_min = Vec2(pj.at("inner_min").at(0).get<double>(),
                            pj.at("inner_min").at(1).get<double>());
      part.inner_max = Vec2(pj.at("inner_max").at(0).get<double>(),
                            pj.at("inner_max").at(1).get<double>());
    }
    if (pj.contains("fog_density")) {
      part.fog_density = pj.at("fog_density").get<double>();
    }
    if (pj.contains("albedo")) part.albedo = vec3_from_json(pj.at("albedo"));
    if (pj.contains("checker")) {
      const json& cj = pj.at("checker");
      CheckerSpec checker;
      checker.color2 = vec3_from_json(cj.at("color2"));
      checker.block = cj.at("block").get<double>();
      checker.axis_u = cj.at("axis_u").get<int>();
      checker.axis_v = cj.at("axis_v").get<int>();
      part.checker = checker;
    }
    parts.push_back(std::move(part));
  }
  return AnalyticField(std::move(parts), j.at("scene_scale").get<double>());
}

void save_analytic_field(const AnalyticField& field, const std::string& path) {
  json j;
  j["scene_scale"] = field.scene_scale();
  j["parts"] = json::array();
  for (const AnalyticPart& part : field.parts()) {
    json pj;
    pj["shape"] = shape_name(part.shape);
    switch (part.shape) {
      case AnalyticPart::Shape::half_space:
        pj["normal"] = vec3_to_json(part.normal);
        pj["offset"] = part.offset;
        break;
      case AnalyticPart::Shape::ball:
        pj["center"] = vec3_to_json(part.center);
        pj["radius"] = part.radius;
        break;
      case AnalyticPart::Shape::box:
        pj["min"] = vec3_to_json(part.bounds.min);
        pj["max"] = vec3_to_json(part.bounds.max);
        break;
      case AnalyticPart::Shape::fog_slab:
        pj["normal"] = vec3_to_json(part.normal);
        pj["lo"] = part.lo;
        pj["hi"] = part.hi;
        pj["fog_density"] = part.fog_density;
        break;
      case AnalyticPart::Shape::fog_frame:
        pj["min"] = vec3_to_json(part.bounds.min);
        pj["max"] = vec3_to_json(part.bounds.max);
        pj["inner_min"] = json::array({part.inner_min.x(), part.inner_min.y()});
        pj["inner_max"] = json::array({part.inner_max.x(), part.inner_max.y()});
        pj["fog_density"] = part.fog_density;
        break;
    }
    pj["albedo"] = vec3_to_json(part.albedo);
    if (part.checker) {
      pj["checker"] = {{"color2", vec3_to_json(part.checker->color2)},
                       {"block", part.checker->block},
                       {"axis_u", part.checker->axis_u},
                       {"axis_v", part.checker->axis_v}};
    }
    j["parts"].push_back(pj);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

} // namespace rfpc
