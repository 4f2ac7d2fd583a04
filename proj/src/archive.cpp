// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

// Measurement archive (.hpma), little-endian:
//   "HPMA" u32 version=1
//   u32 positions, width, height, n_arm, n_band, n_theta, n_theta_p
//   f64 lambda_start_nm, f64 lambda_step_nm
//   f64[n_theta] illum QWP angles, f64[n_theta_p] analyzer QWP angles,
//   f64[n_arm] light arm angles (radians)
//   f32 intensities[position][arm][band][theta][theta_p][y][x]
//   u8 occlusion-free mask[position][y][x]

#include <cstdint>

#include "hpbrdf/acquisition.hpp"
#include "hpbrdf/binary_io.hpp"

namespace hpbrdf {

namespace {
constexpr std::uint32_t kArchiveVersion = 1;
}

void write_archive(const std::string& path, const CaptureArchive& ar) {
  BinaryWriter w(path);
  w.magic("HPMA");
  w.put<std::uint32_t>(kArchiveVersion);
  for (std::size_t v : {std::size_t(ar.positions), std::size_t(ar.width), std::size_t(ar.height),
                        ar.arm_angles.size(), std::size_t(ar.wavelengths.count), ar.illum_angles.size(),
                        ar.analyzer_angles.size()}) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(v));
  }
  w.put<double>(ar.wavelengths.start_nm);
  w.put<double>(ar.wavelengths.step_nm);
  w.put_array<double>(ar.illum_angles);
  w.put_array<double>(ar.analyzer_angles);
  w.put_array<double>(ar.arm_angles);
  w.put_array<float>(ar.intensities);
  w.put_array<std::uint8_t>(ar.masks);
  w.finish();
}

CaptureArchive read_archive(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic("HPMA");
  if (r.get<std::uint32_t>() != kArchiveVersion) throw Error(ErrorCode::DimMismatch, path + ": unsupported version");
  CaptureArchive ar;
  ar.positions = static_cast<int>(r.get<std::uint32_t>());
  ar.width = static_cast<int>(r.get<std::uint32_t>());
  ar.height = static_cast<int>(r.get<std::uint32_t>());
  const auto n_arm = r.get<std::uint32_t>();
  const auto n_band = r.get<std::uint32_t>();
  const auto n_t = r.get<std::uint32_t>();
  const auto n_tp = r.get<std::uint32_t>();
  ar.wavelengths.start_nm = r.get<double>();
  ar.wavelengths.step_nm = r.get<double>();
  ar.wavelengths.count = static_cast<int>(n_band);
  ar.illum_angles.resize(n_t);
  ar.analyzer_angles.resize(n_tp);
  ar.arm_angles.resize(n_arm);
  r.get_array<double>(ar.illum_angles);
  r.get_array<double>(ar.analyzer_angles);
  r.get_array<double>(ar.arm_angles);
  ar.intensities.resize(std::size_t(ar.positions) * n_arm * n_band * n_t * n_tp * ar.pixel_count());
  r.get_array<float>(ar.intensities);
  ar.masks.resize(std::size_t(ar.positions) * ar.pixel_count());
  r.get_array<std::uint8_t>(ar.masks);
  return ar;
}

}  // namespace hpbrdf
