// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rfpc/geometry.hpp"

namespace rfpc {

/// Real spherical harmonic basis values up to the given degree (0..3),
/// (degree+1)^2 components in (l, m) order with m = -l..l.
std::vector<double> sh_encode(const Vec3& direction, int degree);

inline int sh_size(int degree) { return (degree + 1) * (degree + 1); }

} // namespace rfpc
