// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rfpc/field.hpp"
#include "rfpc/focus_area.hpp"
#include "rfpc/geometry.hpp"

namespace rfpc {

struct ToyFieldConfig {
  int levels = 8;
  int features = 2;
  int table_size = 1 << 14;
  double res_min = 16.0;
  double res_max = 256.0;
  int head_width = 64;
  int geo_features = 15;
  int sh_degree = 2;
  uint64_t seed = 1;
};

/// Trainable field: one contraction + hash encoding per branch (a global
/// scene-box branch plus one branch per focus area), features concatenated,
/// then a density head and a direction-conditioned color head.
class ToyHashField final : public RadianceField {
public:
  ToyHashField(const ToyFieldConfig& config, const Aabb& scene_box,
               const std::vector<FocusArea>& areas);

  FieldSample query(const Vec3& position, const Vec3& direction) const override;

  int num_branches() const { return static_cast<int>(domains_.size()); }
  const std::vector<Aabb>& domains() const { return domains_; }
  const ToyFieldConfig& config() const { return config_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  size_t param_count() const { return params_.size(); }

  int feature_dim() const {
    return num_branches() * config_.levels * config_.features;
  }
  int color_in_dim() const;

  /// Per-branch hash encoding of the contracted point (length levels*features).
  std::vector<double> encode_branch(int branch, const Vec3& p) const;
  /// Concatenation over branches in order (length feature_dim()).
  std::vector<double> encode(const Vec3& p) const;

  /// Forward pass with everything the backward pass needs.
  struct Forward {
    std::vector<uint32_t> corner_index; // [branch][level][8]
    std::vector<double> corner_weight;  // [branch][level][8]
    std::vector<double> features;       // feature_dim
    std::vector<double> h1;             // density hidden activations
    std::vector<double> z1;             // density hidden preactivations
    std::vector<double> head_out;       // 1 + geo_features
    double sigma = 0.0;
    std::vector<double> sh;             // sh basis
    std::vector<double> h2;             // color hidden activations
    std::vector<double> z2;             // color hidden preactivations
    Vec3 color_logit = Vec3::Zero();
    Vec3 color = Vec3::Zero();
  };
  Forward forward(const Vec3& p, const Vec3& direction) const;
  /// Density-only forward (color head skipped; sh/h2 left empty).
  Forward forward_density(const Vec3& p) const;

  /// Accumulates d(loss)/d(params) into grad given upstream d(loss)/d(sigma)
  /// and d(loss)/d(color) for the sample captured in fwd.
  void backward(const Forward& fwd, double d_sigma, const Vec3& d_color,
                std::span<double> grad) const;

private:
  friend void save_toy_field(const ToyHashField&, const std::string&);
  friend ToyHashField load_toy_field(const std::string&);

  ToyHashField(const ToyFieldConfig& config, std::vector<Aabb> domains);

  void init_params();
  double level_resolution(int level) const;

  // Flat parameter layout offsets.
  size_t table_offset(int branch, int level) const;
  size_t density_w1_off_, density_b1_off_, density_w2_off_, density_b2_off_;
  size_t color_w1_off_, color_b1_off_, color_w2_off_, color_b2_off_;

  ToyFieldConfig config_;
  std::vector<Aabb> domains_; // [0] = scene box, then focus-area cubes
  std::vector<double> params_;
};

void save_toy_field(const ToyHashField& field, const std::string& path);
ToyHashField load_toy_field(const std::string& path);

} // namespace rfpc
