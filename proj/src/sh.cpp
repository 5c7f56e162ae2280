// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/sh.hpp"

#include <cmath>

#include "rfpc/errors.hpp"

namespace rfpc {

std::vector<double> sh_encode(const Vec3& direction, int degree) {
  if (degree < 0 || degree > 3) {
    throw BadRange("sh_encode: degree must be in [0, 3]");
  }
  if (std::abs(direction.norm() - 1.0) > 1e-6) {
    throw NonUnitDirection("sh_encode: direction must be unit length");
  }
  const double x = direction.x();
  const double y = direction.y();
  const double z = direction.z();

  std::vector<double> out(static_cast<size_t>(sh_size(degree)));
  out[0] = 0.28209479177387814;
  if (degree >= 1) {
    out[1] = 0.4886025119029199 * y;
    out[2] = 0.4886025119029199 * z;
    out[3] = 0.4886025119029199 * x;
  }
  if (degree >= 2) {
    out[4] = 1.0925484305920792 * x * y;
    out[5] = 1.0925484305920792 * y * z;
    out[6] = 0.31539156525252005 * (3.0 * z * z - 1.0);
    out[7] = 1.0925484305920792 * x * z;
    out[8] = 0.5462742152960396 * (x * x - y * y);
  }
  if (degree >= 3) {
    out[9] = 0.5900435899266435 * y * (3.0 * x * x - y * y);
    out[10] = 2.890611442640554 * x * y * z;
    out[11] = 0.4570457994644658 * y * (5.0 * z * z - 1.0);
    out[12] = 0.3731763325901154 * z * (5.0 * z * z - 3.0);
    out[13] = 0.4570457994644658 * x * (5.0 * z * z - 1.0);
    out[14] = 1.445305721320277 * z * (x * x - y * y);
    out[15] = 0.5900435899266435 * x * (x * x - 3.0 * y * y);
  }
  return out;
}

} // namespace rfpc
