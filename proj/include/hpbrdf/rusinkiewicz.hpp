// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>

#include "hpbrdf/frame.hpp"
#include "hpbrdf/types.hpp"

namespace hpbrdf {

/// Surface tangent space (tangent, bitangent, normal), right-handed.
struct TangentFrame {
  Vec3 tangent = Vec3::UnitX();
  Vec3 bitangent = Vec3::UnitY();
  Vec3 normal = Vec3::UnitZ();

  /// Arbitrary but deterministic tangent space around `normal`.
  static TangentFrame from_normal(const Vec3& normal);

  Vec3 to_local(const Vec3& v) const { return {v.dot(tangent), v.dot(bitangent), v.dot(normal)}; }
  Vec3 to_world(const Vec3& v) const { return v.x() * tangent + v.y() * bitangent + v.z() * normal; }
};

/// Half/difference angle parameterization of an isotropic direction pair.
struct RusinkiewiczCoord {
  double phi_d = 0.0;    // [0, 2*pi)
  double theta_d = 0.0;  // [0, pi/2]
  double theta_h = 0.0;  // [0, pi/2]
};

/// omega_i and omega_o point away from the surface. Throws BelowHorizon
/// or DegenerateHalfVector.
RusinkiewiczCoord to_rusinkiewicz(const Vec3& omega_i, const Vec3& omega_o, const TangentFrame& frame);

/// Azimuth of the half vector, needed to undo the canonical phi_h = 0 choice.
double half_vector_azimuth(const Vec3& omega_i, const Vec3& omega_o, const TangentFrame& frame);

/// Canonical (phi_h = 0) direction pair for `coord`.
std::pair<Vec3, Vec3> from_rusinkiewicz(const RusinkiewiczCoord& coord, const TangentFrame& frame);

/// Stokes frames the hpBRDF Mueller matrices are expressed in: the incident
/// frame propagates along -omega_i, the outgoing one along omega_o; both x
/// axes are perpendicular to their plane of incidence (n x omega). The
/// construction only depends on (n, omega_i, omega_o), so it is invariant
/// under rotations about the normal.
struct IncidentOutgoingFrames {
  PolarizationFrame incident;
  PolarizationFrame outgoing;
};

IncidentOutgoingFrames hpbrdf_frames(const Vec3& omega_i, const Vec3& omega_o, const TangentFrame& frame);

}  // namespace hpbrdf
