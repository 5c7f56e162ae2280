// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rfpc/geometry.hpp"

namespace rfpc {

struct CollinearityParams {
  double tau = 4.0;         // tanh slope on the depth deviation
  double gamma = 0.1;       // color-similarity scale
  double eps2 = 0.0025;     // relative depth-deviation acceptance threshold
  double max_segment = 40.0; // pixel cap on triplet segments
};

/// Depth the middle ray would have if the three rendered points were
/// collinear: d0*d2*|u0 x u2| / (d0*|u0 x u1| + d2*|u1 x u2|).
/// Throws DegenerateDirections when the denominator falls below 1e-12.
double expected_midpoint_depth(double d0, double d2, const Vec3& u0,
                               const Vec3& u1, const Vec3& u2);

struct CollinearityTerms {
  double loss = 0.0;
  double d_loss_d0 = 0.0;
  double d_loss_d1 = 0.0;
  double d_loss_d2 = 0.0;
  double chi = 0.0;   // relative depth-deviation gate
  double omega = 0.0; // color-similarity weight
  double rho = 0.0;   // tanh of the scaled depth deviation
  double predicted_mid_depth = 0.0;
  bool degenerate = false;
};

/// chi * omega * rho with analytic partials with respect to the three depths.
/// chi and omega are treated as constants; gradients flow through rho and the
/// predicted midpoint depth only. Near-parallel directions yield a zero loss
/// with zero gradients instead of an error.
CollinearityTerms collinearity_loss(double d0, double d1, double d2,
                                    const Vec3& c0, const Vec3& c1,
                                    const Vec3& c2, const Vec3& u0,
                                    const Vec3& u1, const Vec3& u2,
                                    const CollinearityParams& params);

} // namespace rfpc
