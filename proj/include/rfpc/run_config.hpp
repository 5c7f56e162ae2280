// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rfpc {

/// Value kinds a config key can hold; values are stored as text and checked
/// against the kind when set.
enum class ConfigValueKind { integer, unsigned64, number, text };

struct ConfigKeySpec {
  const char* key;
  ConfigValueKind kind;
  const char* preset; // default, as text
};

/// Flat key-value run configuration with a fixed schema. Keys use section
/// prefixes (lrf.*, ism.*, sdd.*, csd.*, train.*, ...); unknown keys are
/// rejected. The echo is plain `key value` lines in schema order, so a rerun
/// from an echoed file reproduces the exact same configuration.
class RunConfig {
public:
  RunConfig(); // every key at its preset

  static const std::vector<ConfigKeySpec>& schema();

  bool known(const std::string& key) const;
  /// True once a key has been assigned by set/load_file (presets are not).
  bool is_set(const std::string& key) const;

  /// Assigns a value after validating it against the key's kind.
  /// Throws ConfigError on unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  void set_integer(const std::string& key, long long value);
  void set_unsigned(const std::string& key, uint64_t value);
  void set_number(const std::string& key, double value);

  const std::string& text(const std::string& key) const;
  long long integer(const std::string& key) const;
  uint64_t unsigned64(const std::string& key) const;
  double number(const std::string& key) const;

  /// Parses `key value` lines; '#' starts a comment, blank lines are
  /// skipped, and a key alone on a line assigns the empty string.
  void load_file(const std::string& path);

  /// Full resolved configuration, one `key value` line per schema entry.
  std::string serialize() const;
  void save(const std::string& path) const;

private:
  const ConfigKeySpec& spec_for(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::map<std::string, bool> assigned_;
};

} // namespace rfpc
