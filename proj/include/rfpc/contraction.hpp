// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rfpc/errors.hpp"
#include "rfpc/geometry.hpp"

namespace rfpc {

/// Maps the domain box to [-1,1]^3, then applies the radial contraction
/// q -> (2 - 1/|q|) * q/|q| outside the unit ball. Output norm < 2.
inline Vec3 contract(const Vec3& p, const Aabb& domain) {
  const Vec3 half = 0.5 * domain.extent();
  if (!(half.minCoeff() > 0.0)) {
    throw DegenerateDomain("contract: domain has non-positive extent");
  }
  const Vec3 q = (p - domain.center()).cwiseQuotient(half);
  const double norm = q.norm();
  if (norm <= 1.0) return q;
  return (2.0 - 1.0 / norm) * (q / norm);
}

} // namespace rfpc
