// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/hash_field.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "rfpc/contraction.hpp"
#include "rfpc/errors.hpp"
#include "rfpc/rng.hpp"
#include "rfpc/sh.hpp"

namespace rfpc {

namespace {

constexpr uint64_t kHashPrimeY = 2654435761ULL;
constexpr uint64_t kHashPrimeZ = 805459861ULL;

double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

} // namespace

ToyHashField::ToyHashField(const ToyFieldConfig& config, const Aabb& scene_box,
                           const std::vector<FocusArea>& areas)
    : ToyHashField(config, [&] {
        std::vector<Aabb> domains;
        domains.push_back(scene_box);
        for (const FocusArea& area : areas) domains.push_back(area.cube());
        return domains;
      }()) {}

ToyHashField::ToyHashField(const ToyFieldConfig& config,
                           std::vector<Aabb> domains)
    : config_(config), domains_(std::move(domains)) {
  if (domains_.empty()) throw ConfigError("toy field needs a scene box");
  for (const Aabb& d : domains_) {
    if (!(d.extent().minCoeff() > 0.0)) {
      throw DegenerateDomain("toy field branch domain has zero extent");
    }
  }
  if (config_.levels < 1 || config_.features < 1 || config_.table_size < 1 ||
      config_.head_width < 1 || config_.geo_features < 1) {
    throw ConfigError("toy field config values must be positive");
  }
  if ((config_.table_size & (config_.table_size - 1)) != 0) {
    throw ConfigError("toy field table_size must be a power of two");
  }

  const size_t per_branch = static_cast<size_t>(config_.levels) *
                            config_.table_size * config_.features;
  const size_t tables = per_branch * domains_.size();
  const int in_dim = feature_dim();
  const int width = config_.head_width;
  const int density_out = 1 + config_.geo_features;
  const int color_in = color_in_dim();

  density_w1_off_ = tables;
  density_b1_off_ = density_w1_off_ + static_cast<size_t>(in_dim) * width;
  density_w2_off_ = density_b1_off_ + width;
  density_b2_off_ = density_w2_off_ + static_cast<size_t>(width) * density_out;
  color_w1_off_ = density_b2_off_ + density_out;
  color_b1_off_ = color_w1_off_ + static_cast<size_t>(color_in) * width;
  color_w2_off_ = color_b1_off_ + width;
  color_b2_off_ = color_w2_off_ + static_cast<size_t>(width) * 3;
  params_.assign(color_b2_off_ + 3, 0.0);
  init_params();
}

int ToyHashField::color_in_dim() const {
  return config_.geo_features + sh_size(config_.sh_degree);
}

void ToyHashField::init_params() {
  Rng rng(config_.seed);
  const size_t tables = density_w1_off_;
  for (size_t i = 0; i < tables; ++i) {
    params_[i] = rng.next_range(-1e-4, 1e-4);
  }
  auto init_linear = [&](size_t w_off, size_t w_count, int fan_in) {
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (size_t i = 0; i < w_count; ++i) {
      params_[w_off + i] = rng.next_range(-s, s);
    }
  };
  const int width = config_.head_width;
  init_linear(density_w1_off_, density_b1_off_ - density_w1_off_,
              feature_dim());
  init_linear(density_w2_off_, density_b2_off_ - density_w2_off_, width);
  init_linear(color_w1_off_, color_b1_off_ - color_w1_off_, color_in_dim());
  init_linear(color_w2_off_, color_b2_off_ - color_w2_off_, width);
  // Biases stay zero.
}

double ToyHashField::level_resolution(int level) const {
  if (config_.levels == 1) return config_.res_min;
  const double b = std::exp(std::log(config_.res_max / config_.res_min) /
                            (config_.levels - 1));
  return std::round(config_.res_min * std::pow(b, level));
}

size_t ToyHashField::table_offset(int branch, int level) const {
  const size_t per_level =
      static_cast<size_t>(config_.table_size) * config_.features;
  return (static_cast<size_t>(branch) * config_.levels + level) * per_level;
}

std::vector<double> ToyHashField::encode_branch(int branch,
                                                const Vec3& p) const {
  std::vector<double> out(static_cast<size_t>(config_.levels) *
                          config_.features);
  const Vec3 contracted = contract(p, domains_[branch]);
  // Contraction codomain is the radius-2 ball; normalize to [0,1]^3.
  const Vec3 x01 = (contracted + Vec3::Constant(2.0)) / 4.0;
  const uint32_t mask = static_cast<uint32_t>(config_.table_size - 1);
  for (int l = 0; l < config_.levels; ++l) {
    const double res = level_resolution(l);
    const double gx = x01.x() * res;
    const double gy = x01.y() * res;
    const double gz = x01.z() * res;
    const uint64_t ix = static_cast<uint64_t>(std::floor(gx));
    const uint64_t iy = static_cast<uint64_t>(std::floor(gy));
    const uint64_t iz = static_cast<uint64_t>(std::floor(gz));
    const double fx = gx - std::floor(gx);
    const double fy = gy - std::floor(gy);
    const double fz = gz - std::floor(gz);
    const double* table = params_.data() + table_offset(branch, l);
    for (int corner = 0; corner < 8; ++corner) {
      const uint64_t cx = ix + (corner & 1);
      const uint64_t cy = iy + ((corner >> 1) & 1);
      const uint64_t cz = iz + ((corner >> 2) & 1);
      const uint32_t idx =
          static_cast<uint32_t>((cx ^ (cy * kHashPrimeY) ^ (cz * kHashPrimeZ)) &
                                mask);
      const double w = ((corner & 1) ? fx : 1.0 - fx) *
                       (((corner >> 1) & 1) ? fy : 1.0 - fy) *
                       (((corner >> 2) & 1) ? fz : 1.0 - fz);
      for (int f = 0; f < config_.features; ++f) {
        out[static_cast<size_t>(l) * config_.features + f] +=
            w * table[static_cast<size_t>(idx) * config_.features + f];
      }
    }
  }
  return out;
}

std::vector<double> ToyHashField::encode(const Vec3& p) const {
  std::vector<double> out;
  out.reserve(feature_dim());
  for (int b = 0; b < num_branches(); ++b) {
    const std::vector<double> part = encode_branch(b, p);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

ToyHashField::Forward ToyHashField::forward_density(const Vec3& p) const {
  Forward fwd;
  const int nb = num_branches();
  const int per_level = config_.features;
  fwd.corner_index.resize(static_cast<size_t>(nb) * config_.levels * 8);
  fwd.corner_weight.resize(fwd.corner_index.size());
  fwd.features.assign(feature_dim(), 0.0);

  const uint32_t mask = static_cast<uint32_t>(config_.table_size - 1);
  for (int b = 0; b < nb; ++b) {
    const Vec3 contracted = contract(p, domains_[b]);
    const Vec3 x01 = (contracted + Vec3::Constant(2.0)) / 4.0;
    for (int l = 0; l < config_.levels; ++l) {
      const double res = level_resolution(l);
      const double gx = x01.x() * res;
      const double gy = x01.y() * res;
      const double gz = x01.z() * res;
      const uint64_t ix = static_cast<uint64_t>(std::floor(gx));
      const uint64_t iy = static_cast<uint64_t>(std::floor(gy));
      const uint64_t iz = static_cast<uint64_t>(std::floor(gz));
      const double fx = gx - std::floor(gx);
      const double fy = gy - std::floor(gy);
      const double fz = gz - std::floor(gz);
      const double* table = params_.data() + table_offset(b, l);
      const size_t corner_base = (static_cast<size_t>(b) * config_.levels + l) * 8;
      const size_t feat_base =
          (static_cast<size_t>(b) * config_.levels + l) * per_level;
      for (int corner = 0; corner < 8; ++corner) {
        const uint64_t cx = ix + (corner & 1);
        const uint64_t cy = iy + ((corner >> 1) & 1);
        const uint64_t cz = iz + ((corner >> 2) & 1);
        const uint32_t idx = static_cast<uint32_t>(
            (cx ^ (cy * kHashPrimeY) ^ (cz * kHashPrimeZ)) & mask);
        const double w = ((corner & 1) ? fx : 1.0 - fx) *
                         (((corner >> 1) & 1) ? fy : 1.0 - fy) *
                         (((corner >> 2) & 1) ? fz : 1.0 - fz);
        fwd.corner_index[corner_base + corner] = idx;
        fwd.corner_weight[corner_base + corner] = w;
        for (int f = 0; f < per_level; ++f) {
          fwd.features[feat_base + f] +=
              w * table[static_cast<size_t>(idx) * per_level + f];
        }
      }
    }
  }

  const int in_dim = feature_dim();
  const int width = config_.head_width;
  const int density_out = 1 + config_.geo_features;
  fwd.z1.assign(width, 0.0);
  fwd.h1.assign(width, 0.0);
  const double* w1 = params_.data() + density_w1_off_;
  const double* b1 = params_.data() + density_b1_off_;
  for (int j = 0; j < width; ++j) {
    double acc = b1[j];
    const double* row = w1 + static_cast<size_t>(j) * in_dim;
    for (int i = 0; i < in_dim; ++i) acc += row[i] * fwd.features[i];
    fwd.z1[j] = acc;
    fwd.h1[j] = acc > 0.0 ? acc : 0.0;
  }
  fwd.head_out.assign(density_out, 0.0);
  const double* w2 = params_.data() + density_w2_off_;
  const double* b2 = params_.data() + density_b2_off_;
  for (int j = 0; j < density_out; ++j) {
    double acc = b2[j];
    const double* row = w2 + static_cast<size_t>(j) * width;
    for (int i = 0; i < width; ++i) acc += row[i] * fwd.h1[i];
    fwd.head_out[j] = acc;
  }
  fwd.sigma = softplus(fwd.head_out[0]);
  return fwd;
}

ToyHashField::Forward ToyHashField::forward(const Vec3& p,
                                            const Vec3& direction) const {
  Forward fwd = forward_density(p);
  fwd.sh = sh_encode(direction, config_.sh_degree);

  const int width = config_.head_width;
  const int geo = config_.geo_features;
  const int color_in = color_in_dim();
  fwd.z2.assign(width, 0.0);
  fwd.h2.assign(width, 0.0);
  const double* w1 = params_.data() + color_w1_off_;
  const double* b1 = params_.data() + color_b1_off_;
  for (int j = 0; j < width; ++j) {
    double acc = b1[j];
    const double* row = w1 + static_cast<size_t>(j) * color_in;
    for (int i = 0; i < geo; ++i) acc += row[i] * fwd.head_out[1 + i];
    for (int i = 0; i < static_cast<int>(fwd.sh.size()); ++i) {
      acc += row[geo + i] * fwd.sh[i];
    }
    fwd.z2[j] = acc;
    fwd.h2[j] = acc > 0.0 ? acc : 0.0;
  }
  const double* w2 = params_.data() + color_w2_off_;
  const double* b2 = params_.data() + color_b2_off_;
  for (int j = 0; j < 3; ++j) {
    double acc = b2[j];
    const double* row = w2 + static_cast<size_t>(j) * width;
    for (int i = 0; i < width; ++i) acc += row[i] * fwd.h2[i];
    fwd.color_logit[j] = acc;
    fwd.color[j] = sigmoid(acc);
  }
  return fwd;
}

FieldSample ToyHashField::query(const Vec3& position,
                                const Vec3& direction) const {
  const Forward fwd = forward(position, direction);
  return {fwd.sigma, fwd.color};
}

void ToyHashField::backward(const Forward& fwd, double d_sigma,
                            const Vec3& d_color, std::span<double> grad) const {
  const int in_dim = feature_dim();
  const int width = config_.head_width;
  const int geo = config_.geo_features;
  const int density_out = 1 + geo;
  const int color_in = color_in_dim();

  std::vector<double> d_head_out(density_out, 0.0);
  d_head_out[0] = d_sigma * sigmoid(fwd.head_out[0]); // softplus'

  const bool color_path = !fwd.h2.empty() &&
                          (d_color.x() != 0.0 || d_color.y() != 0.0 ||
                           d_color.z() != 0.0);
  if (color_path) {
    // Through sigmoid and the color head.
    Vec3 d_logit;
    for (int j = 0; j < 3; ++j) {
      const double s = fwd.color[j];
      d_logit[j] = d_color[j] * s * (1.0 - s);
    }
    const double* cw2 = params_.data() + color_w2_off_;
    std::vector<double> d_h2(width, 0.0);
    for (int j = 0; j < 3; ++j) {
      double* g_row = grad.data() + color_w2_off_ + static_cast<size_t>(j) * width;
      for (int i = 0; i < width; ++i) {
        g_row[i] += d_logit[j] * fwd.h2[i];
        d_h2[i] += d_logit[j] * cw2[static_cast<size_t>(j) * width + i];
      }
      grad[color_b2_off_ + j] += d_logit[j];
    }
    const double* cw1 = params_.data() + color_w1_off_;
    for (int j = 0; j < width; ++j) {
      const double d_z2 = fwd.z2[j] > 0.0 ? d_h2[j] : 0.0;
      if (d_z2 == 0.0) continue;
      double* g_row =
          grad.data() + color_w1_off_ + static_cast<size_t>(j) * color_in;
      for (int i = 0; i < geo; ++i) {
        g_row[i] += d_z2 * fwd.head_out[1 + i];
        d_head_out[1 + i] += d_z2 * cw1[static_cast<size_t>(j) * color_in + i];
      }
      for (int i = 0; i < static_cast<int>(fwd.sh.size()); ++i) {
        g_row[geo + i] += d_z2 * fwd.sh[i];
      }
      grad[color_b1_off_ + j] += d_z2;
    }
  }

  // Density head backward.
  const double* w2 = params_.data() + density_w2_off_;
  std::vector<double> d_h1(width, 0.0);
  for (int j = 0; j < density_out; ++j) {
    const double d = d_head_out[j];
    if (d == 0.0) continue;
    double* g_row = grad.data() + density_w2_off_ + static_cast<size_t>(j) * width;
    for (int i = 0; i < width; ++i) {
      g_row[i] += d * fwd.h1[i];
      d_h1[i] += d * w2[static_cast<size_t>(j) * width + i];
    }
    grad[density_b2_off_ + j] += d;
  }
  const double* w1 = params_.data() + density_w1_off_;
  std::vector<double> d_features(in_dim, 0.0);
  for (int j = 0; j < width; ++j) {
    const double d_z1 = fwd.z1[j] > 0.0 ? d_h1[j] : 0.0;
    if (d_z1 == 0.0) continue;
    double* g_row = grad.data() + density_w1_off_ + static_cast<size_t>(j) * in_dim;
    for (int i = 0; i < in_dim; ++i) {
      g_row[i] += d_z1 * fwd.features[i];
      d_features[i] += d_z1 * w1[static_cast<size_t>(j) * in_dim + i];
    }
    grad[density_b1_off_ + j] += d_z1;
  }

  // Hash tables: gradient is the trilinear weight times the feature grad.
  const int per_level = config_.features;
  for (int b = 0; b < num_branches(); ++b) {
    for (int l = 0; l < config_.levels; ++l) {
      const size_t corner_base = (static_cast<size_t>(b) * config_.levels + l) * 8;
      const size_t feat_base =
          (static_cast<size_t>(b) * config_.levels + l) * per_level;
      const size_t table_off = table_offset(b, l);
      for (int corner = 0; corner < 8; ++corner) {
        const double w = fwd.corner_weight[corner_base + corner];
        if (w == 0.0) continue;
        const size_t entry =
            table_off + static_cast<size_t>(
                            fwd.corner_index[corner_base + corner]) * per_level;
        for (int f = 0; f < per_level; ++f) {
          grad[entry + f] += w * d_features[feat_base + f];
        }
      }
    }
  }
}

namespace {
constexpr char kMagic[4] = {'R', 'F', 'P', 'C'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
} // namespace

void save_toy_field(const ToyHashField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  const ToyFieldConfig& c = field.config_;
  write_pod(out, static_cast<int32_t>(c.levels));
  write_pod(out, static_cast<int32_t>(c.features));
  write_pod(out, static_cast<int32_t>(c.table_size));
  write_pod(out, c.res_min);
  write_pod(out, c.res_max);
  write_pod(out, static_cast<int32_t>(c.head_width));
  write_pod(out, static_cast<int32_t>(c.geo_features));
  write_pod(out, static_cast<int32_t>(c.sh_degree));
  write_pod(out, c.seed);
  write_pod(out, static_cast<int32_t>(field.domains_.size()));
  for (const Aabb& d : field.domains_) {
    for (int i = 0; i < 3; ++i) write_pod(out, d.min[i]);
    for (int i = 0; i < 3; ++i) write_pod(out, d.max[i]);
  }
  write_pod(out, static_cast<uint64_t>(field.params_.size()));
  out.write(reinterpret_cast<const char*>(field.params_.data()),
            static_cast<std::streamsize>(field.params_.size() * sizeof(double)));
  if (!out) throw IoError("failed writing " + path);
}

ToyHashField load_toy_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw ParseError(path + ": not a field checkpoint");
  }
  const uint32_t version = read_pod<uint32_t>(in);
  if (version != kVersion) {
    throw ParseError(path + ": unsupported checkpoint version");
  }
  ToyFieldConfig c;
  c.levels = read_pod<int32_t>(in);
  c.features = read_pod<int32_t>(in);
  c.table_size = read_pod<int32_t>(in);
  c.res_min = read_pod<double>(in);
  c.res_max = read_pod<double>(in);
  c.head_width = read_pod<int32_t>(in);
  c.geo_features = read_pod<int32_t>(in);
  c.sh_degree = read_pod<int32_t>(in);
  c.seed = read_pod<uint64_t>(in);
  const int32_t n_domains = read_pod<int32_t>(in);
  if (!in || n_domains < 1 || n_domains > 64) {
    throw ParseError(path + ": bad checkpoint domain count");
  }
  std::vector<Aabb> domains(n_domains);
  for (Aabb& d : domains) {
    for (int i = 0; i < 3; ++i) d.min[i] = read_pod<double>(in);
    for (int i = 0; i < 3; ++i) d.max[i] = read_pod<double>(in);
  }
  ToyHashField field(c, std::move(domains));
  const uint64_t count = read_pod<uint64_t>(in);
  if (count != field.params_.size()) {
    throw ParseError(path + ": checkpoint parameter count mismatch");
  }
  in.read(reinterpret_cast<char*>(field.params_.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw ParseError(path + ": truncated checkpoint");
  return field;
}

} // namespace rfpc
