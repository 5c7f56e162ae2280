// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>

#include "rfpc/geometry.hpp"

namespace rfpc {

struct FieldSample {
  double density = 0.0; // sigma, 1/meters, >= 0
  Vec3 color = Vec3::Zero();
};

/// A queryable radiance field. Implementations must be deterministic and
/// safe for concurrent read-only evaluation.
class RadianceField {
public:
  virtual ~RadianceField() = default;
  virtual FieldSample query(const Vec3& position, const Vec3& direction) const = 0;
};

/// Wrapper counting queries; used to compare extraction strategies.
class QueryCountingField : public RadianceField {
public:
  explicit QueryCountingField(const RadianceField& inner) : inner_(inner) {}

  FieldSample query(const Vec3& position, const Vec3& direction) const override {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_.query(position, direction);
  }

  uint64_t count() const { return count_.load(std::memory_order_relaxed); }
  void reset() { count_.store(0, std::memory_order_relaxed); }

private:
  const RadianceField& inner_;
  mutable std::atomic<uint64_t> count_{0};
};

} // namespace rfpc
