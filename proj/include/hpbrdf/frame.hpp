// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "hpbrdf/error.hpp"
#include "hpbrdf/mueller.hpp"
#include "hpbrdf/types.hpp"

namespace hpbrdf {

/// Right-handed orthonormal Stokes reference frame attached to a ray:
/// x_axis x y_axis = propagation.
struct PolarizationFrame {
  Vec3 propagation = Vec3::UnitZ();
  Vec3 x_axis = Vec3::UnitX();
  Vec3 y_axis = Vec3::UnitY();

  bool is_orthonormal(double tol = 1e-9) const {
    return std::abs(propagation.norm() - 1) <= tol && std::abs(x_axis.norm() - 1) <= tol &&
           std::abs(y_axis.norm() - 1) <= tol && std::abs(propagation.dot(x_axis)) <= tol &&
           std::abs(propagation.dot(y_axis)) <= tol && std::abs(x_axis.dot(y_axis)) <= tol &&
           (x_axis.cross(y_axis) - propagation).norm() <= tol;
  }
};

/// Frame for `propagation` whose x axis is `reference` projected onto the
/// transverse plane. Falls back to `fallback`, then to any perpendicular
/// axis, when the reference is (nearly) parallel to the ray.
inline PolarizationFrame make_frame(const Vec3& propagation, const Vec3& reference,
                                    const Vec3& fallback = Vec3::UnitX()) {
  PolarizationFrame f;
  f.propagation = propagation.normalized();
  const auto transverse = [&](const Vec3& r) { return Vec3(r - r.dot(f.propagation) * f.propagation); };
  Vec3 x = transverse(reference);
  if (x.norm() < 1e-9) x = transverse(fallback);
  if (x.norm() < 1e-9) x = f.propagation.unitOrthogonal();
  f.x_axis = x.normalized();
  f.y_axis = f.propagation.cross(f.x_axis);
  return f;
}

/// Signed angle from `from.x_axis` to `to.x_axis` about the shared propagation.
inline double frame_angle(const PolarizationFrame& from, const PolarizationFrame& to) {
  if ((from.propagation - to.propagation).norm() > 1e-6) {
    throw Error(ErrorCode::MismatchedPropagation, "frame_transfer: frames do not share a ray");
  }
  const double sin_psi = from.x_axis.cross(to.x_axis).dot(from.propagation);
  const double cos_psi = from.x_axis.dot(to.x_axis);
  return std::atan2(sin_psi, cos_psi);
}

/// Mueller matrix re-expressing Stokes vectors given in `from` in `to`.
inline Muellerd frame_transfer(const PolarizationFrame& from, const PolarizationFrame& to) {
  return frame_rotation(frame_angle(from, to));
}

}  // namespace hpbrdf
