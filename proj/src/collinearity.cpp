// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/collinearity.hpp"

#include <algorithm>
#include <cmath>

#include "rfpc/errors.hpp"

namespace rfpc {

namespace {
constexpr double kDenomFloor = 1e-12;
} // namespace

double expected_midpoint_depth(double d0, double d2, const Vec3& u0,
                               const Vec3& u1, const Vec3& u2) {
  const double chord = u0.cross(u2).norm();
  const double left = u0.cross(u1).norm();
  const double right = u1.cross(u2).norm();
  const double denom = d0 * left + d2 * right;
  if (!(denom > kDenomFloor)) {
    throw DegenerateDirections("rays too close to parallel for a midpoint depth");
  }
  return d0 * d2 * chord / denom;
}

CollinearityTerms collinearity_loss(double d0, double d1, double d2,
                                    const Vec3& c0, const Vec3& c1,
                                    const Vec3& c2, const Vec3& u0,
                                    const Vec3& u1, const Vec3& u2,
                                    const CollinearityParams& params) {
  if (!(params.tau > 0.0) || !(params.gamma > 0.0) || !(params.eps2 > 0.0)) {
    throw BadRange("collinearity parameters must be positive");
  }
  CollinearityTerms out;
  const double chord = u0.cross(u2).norm();
  const double left = u0.cross(u1).norm();
  const double right = u1.cross(u2).norm();
  const double denom = d0 * left + d2 * right;
  if (!(denom > kDenomFloor)) {
    out.degenerate = true;
    return out;
  }
  const double predicted = d0 * d2 * chord / denom;
  out.predicted_mid_depth = predicted;

  const double deviation = d1 - predicted;
  const double magnitude = std::abs(deviation);
  const double min_depth = std::min({d0, d1, d2});
  out.chi = magnitude <= params.eps2 * min_depth ? 1.0 : 0.0;
  const double color_term =
      (c1 - c0).squaredNorm() + (c2 - c1).squaredNorm();
  out.omega = std::exp(-color_term / (2.0 * params.gamma * params.gamma));
  out.rho = std::tanh(params.tau * magnitude);
  out.loss = out.chi * out.omega * out.rho;

  // d|deviation| uses subgradient 0 at deviation == 0.
  const double sign = deviation > 0.0 ? 1.0 : (deviation < 0.0 ? -1.0 : 0.0);
  const double sech_sq = 1.0 - out.rho * out.rho;
  const double upstream = out.chi * out.omega * params.tau * sech_sq * sign;
  const double d_pred_d0 = chord * right * d2 * d2 / (denom * denom);
  const double d_pred_d2 = chord * left * d0 * d0 / (denom * denom);
  out.d_loss_d1 = upstream;
  out.d_loss_d0 = -upstream * d_pred_d0;
  out.d_loss_d2 = -upstream * d_pred_d2;
  return out;
}

} // namespace rfpc
