// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Helpers shared by the unit tests and the acceptance binary.

#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "hpbrdf/mueller.hpp"
#include "hpbrdf/types.hpp"

namespace hpbrdf::testing {

inline constexpr double kPi = std::numbers::pi;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

/// Uniform direction in the upper hemisphere about +z.
inline Vec3 random_upper(std::mt19937_64& rng, double min_z = 0.0) {
  const double z = uniform(rng, min_z, 1.0);
  const double phi = uniform(rng, 0.0, 2.0 * kPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

inline Muellerd embed_rotation(const Mat3& r) {
  Muellerd m = Muellerd::Identity();
  m.bottomRightCorner<3, 3>() = r;
  return m;
}

/// Elliptical retarder: a random proper rotation of the Poincare sphere.
inline Muellerd random_retarder(std::mt19937_64& rng) {
  const double angle = uniform(rng, 0.0, kPi);
  return embed_rotation(Eigen::AngleAxisd(angle, random_unit(rng)).toRotationMatrix());
}

/// Homogeneous diattenuator with diattenuation below `max_d`.
inline Muellerd random_diattenuator(std::mt19937_64& rng, double max_d = 0.95) {
  const double d = uniform(rng, 0.0, max_d);
  const Vec3 u = random_unit(rng);
  const double root = std::sqrt(1.0 - d * d);
  Muellerd m = Muellerd::Zero();
  m(0, 0) = 1.0;
  m.block<1, 3>(0, 1) = d * u.transpose();
  m.block<3, 1>(1, 0) = d * u;
  m.bottomRightCorner<3, 3>() = root * Mat3::Identity() + (1.0 - root) * u * u.transpose();
  return m;
}

/// Depolarizer with a symmetric positive-definite block and small polarizance.
inline Muellerd random_depolarizer(std::mt19937_64& rng) {
  const Mat3 q = Eigen::AngleAxisd(uniform(rng, 0.0, kPi), random_unit(rng)).toRotationMatrix();
  const Eigen::Vector3d lam(uniform(rng, 0.2, 0.9), uniform(rng, 0.2, 0.9), uniform(rng, 0.2, 0.9));
  Muellerd m = Muellerd::Identity();
  m.bottomRightCorner<3, 3>() = q * lam.asDiagonal() * q.transpose();
  m.block<3, 1>(1, 0) = uniform(rng, 0.0, 0.1) * random_unit(rng);
  return m;
}

/// Physical Mueller matrix built from ideal elements.
inline Muellerd random_physical(std::mt19937_64& rng) {
  const double gain = uniform(rng, 0.1, 2.0);
  const double depol = uniform(rng, 0.0, 1.0);
  Muellerd d = Muellerd::Identity();
  d.bottomRightCorner<3, 3>() *= depol;
  return gain * d * random_retarder(rng) * random_diattenuator(rng);
}

/// Brute-force physicality: M must map every pure state (and the
/// unpolarized state) into the forward light cone. By linearity the pure
/// states on a dense Fibonacci sphere cover the cone; the worst sample is
/// then refined by a local search.
inline bool brute_force_physical(const Muellerd& m, int samples = 4000, double tol = 1e-9) {
  const double scale = std::max(1.0, m.norm());
  auto margin = [&](const Vec3& dir) {
    const Stokesd s(1.0, dir.x(), dir.y(), dir.z());
    const Stokesd out = m * s;
    return out(0) - out.tail<3>().norm();
  };
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  double worst = margin(Vec3::Zero());
  Vec3 worst_dir = Vec3::UnitZ();
  for (int i = 0; i < samples; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / samples;
    const double r = std::sqrt(1.0 - z * z);
    const Vec3 dir(r * std::cos(golden * i), r * std::sin(golden * i), z);
    const double v = margin(dir);
    if (v < worst) {
      worst = v;
      worst_dir = dir;
    }
  }
  double step = 0.05;
  for (int it = 0; it < 200 && step > 1e-9; ++it) {
    bool improved = false;
    for (int a = 0; a < 3; ++a) {
      for (double sign : {-1.0, 1.0}) {
        Vec3 d = worst_dir;
        d(a) += sign * step;
        d.normalize();
        const double v = margin(d);
        if (v < worst) {
          worst = v;
          worst_dir = d;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return worst >= -tol * scale;
}

inline std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hpbrdf_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace hpbrdf::testing
