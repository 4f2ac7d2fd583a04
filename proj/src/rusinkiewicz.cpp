// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include "hpbrdf/rusinkiewicz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hpbrdf/error.hpp"

namespace hpbrdf {

namespace {

constexpr double kHorizonTol = 1e-12;

Vec3 rotate_z(const Vec3& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()};
}

Vec3 rotate_y(const Vec3& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() + s * v.z(), v.y(), -s * v.x() + c * v.z()};
}

double safe_acos(double x) { return std::acos(std::clamp(x, -1.0, 1.0)); }

}  // namespace

TangentFrame TangentFrame::from_normal(const Vec3& normal) {
  TangentFrame f;
  f.normal = normal.normalized();
  // Prefer world x as the tangent so that flat geometry gets an intuitive frame.
  Vec3 ref = std::abs(f.normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  f.tangent = (ref - ref.dot(f.normal) * f.normal).normalized();
  f.bitangent = f.normal.cross(f.tangent);
  return f;
}

RusinkiewiczCoord to_rusinkiewicz(const Vec3& omega_i, const Vec3& omega_o, const TangentFrame& frame) {
  const Vec3 wi = frame.to_local(omega_i.normalized());
  const Vec3 wo = frame.to_local(omega_o.normalized());
  if (wi.z() < -kHorizonTol || wo.z() < -kHorizonTol) {
    throw Error(ErrorCode::BelowHorizon, "to_rusinkiewicz: direction below the surface");
  }
  Vec3 h = wi + wo;
  if (h.norm() < 1e-12) {
    throw Error(ErrorCode::DegenerateHalfVector, "to_rusinkiewicz: omega_i = -omega_o");
  }
  h.normalize();

  RusinkiewiczCoord c;
  c.theta_h = safe_acos(h.z());
  const double phi_h = std::hypot(h.x(), h.y()) > 1e-15 ? std::atan2(h.y(), h.x()) : 0.0;

  const Vec3 d = rotate_y(rotate_z(wi, -phi_h), -c.theta_h);
  c.theta_d = std::min(safe_acos(d.z()), std::numbers::pi / 2);
  if (std::hypot(d.x(), d.y()) > 1e-15) {
    double phi = std::atan2(d.y(), d.x());
    if (phi < 0) phi += 2 * std::numbers::pi;
    if (phi >= 2 * std::numbers::pi) phi = 0.0;
    c.phi_d = phi;
  }
  return c;
}

double half_vector_azimuth(const Vec3& omega_i, const Vec3& omega_o, const TangentFrame& frame) {
  const Vec3 h = frame.to_local(omega_i.normalized() + omega_o.normalized());
  return std::hypot(h.x(), h.y()) > 1e-15 ? std::atan2(h.y(), h.x()) : 0.0;
}

std::pair<Vec3, Vec3> from_rusinkiewicz(const RusinkiewiczCoord& coord, const TangentFrame& frame) {
  const double sd = std::sin(coord.theta_d);
  const Vec3 d(sd * std::cos(coord.phi_d), sd * std::sin(coord.phi_d), std::cos(coord.theta_d));
  const Vec3 h(std::sin(coord.theta_h), 0.0, std::cos(coord.theta_h));
  const Vec3 wi = rotate_y(d, coord.theta_h);
  const Vec3 wo = 2.0 * wi.dot(h) * h - wi;
  return {frame.to_world(wi), frame.to_world(wo)};
}

IncidentOutgoingFrames hpbrdf_frames(const Vec3& omega_i, const Vec3& omega_o, const TangentFrame& frame) {
  const Vec3& n = frame.normal;
  const Vec3 wi = omega_i.normalized();
  const Vec3 wo = omega_o.normalized();
  const auto reference = [&](const Vec3& primary, const Vec3& secondary) -> Vec3 {
    const Vec3 a = n.cross(primary);
    if (a.norm() > 1e-9) return a;
    const Vec3 b = n.cross(secondary);
    if (b.norm() > 1e-9) return b;
    return frame.tangent;
  };
  IncidentOutgoingFrames f;
  f.incident = make_frame(-wi, reference(wi, wo), frame.tangent);
  f.outgoing = make_frame(wo, reference(wo, wi), frame.tangent);
  return f;
}

}  // namespace hpbrdf
