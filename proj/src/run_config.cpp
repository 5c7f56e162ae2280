// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/run_config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rfpc/errors.hpp"

namespace rfpc {
namespace {

constexpr ConfigValueKind kInt = ConfigValueKind::integer;
constexpr ConfigValueKind kU64 = ConfigValueKind::unsigned64;
constexpr ConfigValueKind kNum = ConfigValueKind::number;
constexpr ConfigValueKind kText = ConfigValueKind::text;

const std::vector<ConfigKeySpec> kSchema = {
    // Focus-area localization.
    {"lrf.max_areas", kInt, "5"},
    {"lrf.neighbors", kInt, "20"},
    {"lrf.alpha_deg", kNum, "10"},
    {"lrf.min_cluster_size", kInt, "20"},
    // Surface-model collinearity term (filtering-side defaults).
    {"ism.tau", kNum, "4"},
    {"ism.gamma", kNum, "0.1"},
    {"ism.eps2", kNum, "0.0025"},
    {"ism.max_segment", kNum, "40"},
    // Depth denoising.
    {"sdd.eps3", kNum, "0.0025"},
    {"sdd.patch", kInt, "3"},
    // Color denoising.
    {"csd.eps4", kNum, "0.0025"},
    // Toy training. The depth gate is deliberately wider than ism.eps2;
    // mid-training depths are too noisy for the filtering threshold.
    {"train.poses", kText, ""},
    {"train.images", kText, ""},
    {"train.areas", kText, ""},
    {"train.iters", kInt, "2000"},
    {"train.batch_triplets", kInt, "32"},
    {"train.samples_per_ray", kInt, "128"},
    {"train.near", kNum, "0.05"},
    {"train.far", kNum, "100"},
    {"train.learning_rate", kNum, "0.01"},
    {"train.lambda_col", kNum, "0.1"},
    {"train.depth_gate", kNum, "0.1"},
    {"train.adam_beta1", kNum, "0.9"},
    {"train.adam_beta2", kNum, "0.999"},
    {"train.adam_eps", kNum, "1e-08"},
    {"train.edge_blur_sigma", kNum, "1.4"},
    {"train.edge_low", kNum, "0.1"},
    {"train.edge_high", kNum, "0.2"},
    {"train.scene_box_scale", kNum, "2"},
    {"train.seed", kU64, "0"},
    {"train.out", kText, "field.bin"},
    // Fixture generation.
    {"fixture.kind", kText, "single_orbit"},
    {"fixture.cameras", kInt, "0"},
    {"fixture.width", kInt, "64"},
    {"fixture.height", kInt, "64"},
    {"fixture.seed", kU64, "0"},
    {"fixture.out", kText, "fixture"},
    // Focus-area detection IO.
    {"detect.poses", kText, ""},
    {"detect.out", kText, "areas.json"},
    // Edge rendering.
    {"edges.image", kText, ""},
    {"edges.sigma", kNum, "1.4"},
    {"edges.low", kNum, "0.1"},
    {"edges.high", kNum, "0.2"},
    {"edges.out", kText, "edges.pgm"},
    // Point-cloud extraction.
    {"extract.field", kText, ""},
    {"extract.analytic", kText, ""},
    {"extract.poses", kText, ""},
    {"extract.points", kInt, "10000"},
    {"extract.samples_per_ray", kInt, "256"},
    {"extract.near", kNum, "0.05"},
    {"extract.far", kNum, "100"},
    {"extract.color_mode", kText, "csd"},
    {"extract.bounds", kText, ""},
    {"extract.max_attempts", kInt, "1000000"},
    {"extract.seed", kU64, "0"},
    {"extract.out", kText, "cloud.ply"},
    {"extract.stats", kText, "stats.json"},
    // Cloud evaluation.
    {"eval.ref", kText, ""},
    {"eval.test", kText, ""},
    {"eval.fscore_threshold", kNum, "0.05"},
    {"eval.out", kText, "report.json"},
    // Extraction benchmark.
    {"bench.points", kInt, "1500"},
    {"bench.out", kText, "bench.json"},
};

bool parse_integer(const std::string& text, long long* out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (errno != 0 || end != text.c_str() + text.size()) return false;
  if (out) *out = v;
  return true;
}

bool parse_unsigned(const std::string& text, uint64_t* out) {
  if (text.empty() || text[0] == '-' || text[0] == '+') return false;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (errno != 0 || end != text.c_str() + text.size()) return false;
  if (out) *out = v;
  return true;
}

bool parse_number(const std::string& text, double* out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end != text.c_str() + text.size()) return false;
  if (out) *out = v;
  return true;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void check_value(const ConfigKeySpec& spec, const std::string& value) {
  switch (spec.kind) {
  case ConfigValueKind::integer:
    if (!parse_integer(value, nullptr)) {
      throw ConfigError("config key " + std::string(spec.key) +
                        " expects an integer, got '" + value + "'");
    }
    return;
  case ConfigValueKind::unsigned64:
    if (!parse_unsigned(value, nullptr)) {
      throw ConfigError("config key " + std::string(spec.key) +
                        " expects a non-negative integer, got '" + value +
                        "'");
    }
    return;
  case ConfigValueKind::number:
    if (!parse_number(value, nullptr)) {
      throw ConfigError("config key " + std::string(spec.key) +
                        " expects a number, got '" + value + "'");
    }
    return;
  case ConfigValueKind::text:
    if (value.find('\n') != std::string::npos) {
      throw ConfigError("config key " + std::string(spec.key) +
                        " must be a single line");
    }
    return;
  }
}

} // namespace

RunConfig::RunConfig() {
  for (const ConfigKeySpec& spec : kSchema) {
    values_[spec.key] = spec.preset;
    assigned_[spec.key] = false;
  }
}

const std::vector<ConfigKeySpec>& RunConfig::schema() { return kSchema; }

bool RunConfig::known(const std::string& key) const {
  return values_.count(key) != 0;
}

bool RunConfig::is_set(const std::string& key) const {
  auto it = assigned_.find(key);
  if (it == assigned_.end()) throw ConfigError("unknown config key: " + key);
  return it->second;
}

const ConfigKeySpec& RunConfig::spec_for(const std::string& key) const {
  for (const ConfigKeySpec& spec : kSchema) {
    if (key == spec.key) return spec;
  }
  throw ConfigError("unknown config key: " + key);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const ConfigKeySpec& spec = spec_for(key);
  check_value(spec, value);
  values_[key] = value;
  assigned_[key] = true;
}

void RunConfig::set_integer(const std::string& key, long long value) {
  set(key, std::to_string(value));
}

void RunConfig::set_unsigned(const std::string& key, uint64_t value) {
  set(key, std::to_string(value));
}

void RunConfig::set_number(const std::string& key, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  set(key, buffer);
}

const std::string& RunConfig::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  return it->second;
}

long long RunConfig::integer(const std::string& key) const {
  long long v = 0;
  if (!parse_integer(text(key), &v)) {
    throw ConfigError("config key " + key + " does not hold an integer");
  }
  return v;
}

uint64_t RunConfig::unsigned64(const std::string& key) const {
  uint64_t v = 0;
  if (!parse_unsigned(text(key), &v)) {
    throw ConfigError("config key " + key +
                      " does not hold a non-negative integer");
  }
  return v;
}

double RunConfig::number(const std::string& key) const {
  double v = 0.0;
  if (!parse_number(text(key), &v)) {
    throw ConfigError("config key " + key + " does not hold a number");
  }
  return v;
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const size_t split = stripped.find_first_of(" \t");
    std::string key = stripped.substr(0, split);
    std::string value =
        split == std::string::npos ? "" : trim(stripped.substr(split + 1));
    try {
      set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
}

std::string RunConfig::serialize() const {
  std::ostringstream out;
  for (const ConfigKeySpec& spec : kSchema) {
    const std::string& value = values_.at(spec.key);
    out << spec.key;
    if (!value.empty()) out << ' ' << value;
    out << '\n';
  }
  return out.str();
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write config file: " + path);
  out << serialize();
  if (!out) throw IoError("failed writing config file: " + path);
}

} // namespace rfpc
