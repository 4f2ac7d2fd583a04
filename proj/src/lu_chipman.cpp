// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "hpbrdf/analysis.hpp"
#include "hpbrdf/binary_io.hpp"
#include "hpbrdf/error.hpp"
#include "hpbrdf/parallel.hpp"

namespace hpbrdf {

namespace {

double clamp_unit(double v, bool* out_of_range) {
  if (out_of_range) *out_of_range = v > 1.0 || v < 0.0 || !std::isfinite(v);
  return std::clamp(v, 0.0, 1.0);
}

Muellerd embed(const Mat3& m) {
  Muellerd out = Muellerd::Identity();
  out.bottomRightCorner<3, 3>() = m;
  return out;
}

/// Rotation taking unit vector a onto unit vector b.
Mat3 rotation_between(const Vec3& a, const Vec3& b) {
  const Vec3 axis = a.cross(b);
  const double s = axis.norm();
  const double c = a.dot(b);
  if (s < 1e-12) {
    if (c > 0) return Mat3::Identity();
    Vec3 perp = a.unitOrthogonal();
    return Eigen::AngleAxisd(std::numbers::pi, perp).toRotationMatrix();
  }
  return Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
}

}  // namespace

double diattenuation(const Muellerd& m, bool* out_of_range) {
  if (!(m(0, 0) > 0)) throw Error(ErrorCode::ZeroIntensity, "diattenuation needs m00 > 0");
  return clamp_unit(m.block<1, 3>(0, 1).norm() / m(0, 0), out_of_range);
}

double polarizance(const Muellerd& m, bool* out_of_range) {
  if (!(m(0, 0) > 0)) throw Error(ErrorCode::ZeroIntensity, "polarizance needs m00 > 0");
  return clamp_unit(m.block<3, 1>(1, 0).norm() / m(0, 0), out_of_range);
}

double retardance_scalar(const Muellerd& retarder) {
  return std::acos(std::clamp(retarder.trace() / 2.0 - 1.0, -1.0, 1.0));
}

double preservation(const Muellerd& depolarizer) {
  return std::abs(depolarizer.bottomRightCorner<3, 3>().trace()) / 3.0;
}

LuChipmanFactors lu_chipman(const Muellerd& m_in) {
  const double m00 = m_in(0, 0);
  if (!(m00 > 0)) throw Error(ErrorCode::ZeroIntensity, "lu_chipman needs m00 > 0");
  if (!m_in.allFinite()) throw Error(ErrorCode::NonFinite, "lu_chipman: non-finite input");
  const Muellerd m = m_in / m00;

  LuChipmanFactors f;
  const Vec3 d_vec = m.block<1, 3>(0, 1).transpose();
  const Vec3 p_vec = m.block<3, 1>(1, 0);
  const double d = d_vec.norm();
  f.diattenuation = std::min(d, 1.0);
  f.polarizance = std::min(p_vec.norm(), 1.0);

  // Diattenuator.
  const double root = std::sqrt(std::max(0.0, 1.0 - d * d));
  Mat3 m_d = root * Mat3::Identity();
  if (d > 0) {
    const Vec3 u = d_vec / d;
    m_d += (1.0 - root) * u * u.transpose();
  }
  Muellerd md = Muellerd::Zero();
  md(0, 0) = 1.0;
  md.block<1, 3>(0, 1) = d_vec.transpose();
  md.block<3, 1>(1, 0) = d_vec;
  md.bottomRightCorner<3, 3>() = m_d;
  f.diattenuator = m00 * md;

  if (d >= 1.0 - kSingularDiattenuationEps) {
    f.singular_diattenuator = true;
    const double p = p_vec.norm();
    f.retarder = embed(p > 0 ? rotation_between(d_vec / d, p_vec / p) : Mat3::Identity());
    f.depolarizer = Muellerd::Identity();
    f.depolarizer.bottomRightCorner<3, 3>() = std::min(p, 1.0) * Mat3::Identity();
    f.retardance = retardance_scalar(f.retarder);
    f.preservation = preservation(f.depolarizer);
    return f;
  }

  const Muellerd m_prime = m * md.inverse();
  const Vec3 p_delta = m_prime.block<3, 1>(1, 0);
  const Mat3 mp = m_prime.bottomRightCorner<3, 3>();
  const Mat3 mmt = mp * mp.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(mmt);
  Eigen::Vector3d lam = eig.eigenvalues().cwiseMax(0.0);
  const double scale = std::max(lam.maxCoeff(), std::numeric_limits<double>::min());

  Mat3 m_delta;
  Mat3 m_r;
  if (lam.minCoeff() <= 1e-12 * scale) {
    f.degenerate_depolarizer = true;
    Eigen::JacobiSVD<Mat3> svd(mp, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0) u.col(2) = -u.col(2);
    m_r = u * v.transpose();
    m_delta = mp * m_r.transpose();
  } else {
    const Eigen::Vector3d s = lam.cwiseSqrt();
    const double sign = mp.determinant() < 0 ? -1.0 : 1.0;
    const Mat3 lhs = mmt + (s(0) * s(1) + s(1) * s(2) + s(2) * s(0)) * Mat3::Identity();
    const Mat3 rhs = (s(0) + s(1) + s(2)) * mmt + s(0) * s(1) * s(2) * Mat3::Identity();
    m_delta = sign * lhs.inverse() * rhs;
    m_r = m_delta.inverse() * mp;
  }

  f.depolarizer = Muellerd::Identity();
  f.depolarizer.block<3, 1>(1, 0) = p_delta;
  f.depolarizer.bottomRightCorner<3, 3>() = m_delta;
  f.retarder = embed(m_r);
  f.retardance = retardance_scalar(f.retarder);
  f.preservation = preservation(f.depolarizer);
  return f;
}

ScalarMaps scalar_maps(std::span<const float> matrices, std::span<const std::uint8_t> valid, int width, int height,
                       int bands) {
  const std::size_t slots = std::size_t(width) * height * bands;
  if (matrices.size() != slots * 16 || (!valid.empty() && valid.size() != slots)) {
    throw Error(ErrorCode::DimMismatch, "scalar_maps: buffer sizes do not match the shape");
  }
  ScalarMaps out;
  out.width = width;
  out.height = height;
  out.bands = bands;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  out.diattenuation.assign(slots, nan);
  out.polarizance.assign(slots, nan);
  out.retardance.assign(slots, nan);
  out.preservation.assign(slots, nan);
  parallel_for(0, static_cast<std::int64_t>(slots), [&](std::int64_t i) {
    if (!valid.empty() && !valid[i]) return;
    Muellerd m;
    for (int e = 0; e < 16; ++e) m(e / 4, e % 4) = matrices[16 * std::size_t(i) + e];
    if (!(m(0, 0) > 0) || !m.allFinite()) return;
    const LuChipmanFactors f = lu_chipman(m);
    out.diattenuation[i] = static_cast<float>(diattenuation(m));
    out.polarizance[i] = static_cast<float>(polarizance(m));
    out.retardance[i] = static_cast<float>(f.retardance);
    out.preservation[i] = static_cast<float>(f.preservation);
  });
  return out;
}

ScalarMaps scalar_maps(const MuellerImage& image) {
  return scalar_maps(image.data, image.valid, image.width, image.height, image.wavelengths.count);
}

void write_scalar_maps(const std::string& prefix, const ScalarMaps& maps, const WavelengthGrid& wavelengths) {
  const std::pair<const char*, const std::vector<float>*> planes[] = {
      {"diattenuation", &maps.diattenuation},
      {"polarizance", &maps.polarizance},
      {"retardance", &maps.retardance},
      {"preservation", &maps.preservation},
  };
  nlohmann::json meta;
  meta["width"] = maps.width;
  meta["height"] = maps.height;
  meta["bands"] = maps.bands;
  meta["wavelengths_nm"] = wavelengths.wavelengths();
  meta["layout"] = "float32 little-endian [band][y][x], NaN = invalid";
  for (const auto& [name, plane] : planes) {
    const std::string path = prefix + "_" + name + ".f32";
    BinaryWriter w(path);
    w.put_array<float>(*plane);
    w.finish();
    meta["files"][name] = path;
  }
  std::ofstream side(prefix + ".json");
  side << meta.dump(2) << "\n";
  if (!side) throw Error(ErrorCode::Io, "cannot write " + prefix + ".json");
}

}  // namespace hpbrdf
