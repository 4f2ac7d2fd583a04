// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Linear least-squares recovery of a Mueller matrix from DRR intensities.
/// Each measurement is linear in the 16 unknowns: f_k = g * a_k^T M b_k
/// with b_k = C_ei R(theta) LP s and a_k^T = row 0 of LP R(theta') C_rc.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hpbrdf/acquisition.hpp"
#include "hpbrdf/types.hpp"
#include "hpbrdf/wavelength.hpp"

namespace hpbrdf {

/// Singular values below this fraction of the largest are truncated.
inline constexpr double kPinvCutoff = 1e-10;

struct DesignMatrix {
  /// (|Theta| * |Theta'|) x 16; row k = vec(a_k b_k^T) (row-major vec),
  /// illumination angle outer, analyzer angle inner.
  Eigen::MatrixXd rows;
  Eigen::MatrixXd pseudo_inverse;  // 16 x rows
  Eigen::VectorXd singular_values;
  int rank = 0;

  /// sigma_min / sigma_max.
  double conditioning() const;
};

/// Throws InsufficientMeasurements with fewer than 16 rows.
DesignMatrix build_design_matrix(const AcquisitionConfig& config, int band, const PixelChain& chain = {});

struct MuellerSolution {
  Muellerd m = Muellerd::Zero();
  double rms_residual = 0.0;
};

/// Least-squares solve; throws RankDeficient (effective rank in the message)
/// or NonFinite.
MuellerSolution solve_mueller(std::span<const double> measurements, const DesignMatrix& design);

/// Mueller matrices for one light arm angle, [band][y][x][16] row-major,
/// expressed in the hpBRDF incident/outgoing frames of each pixel.
struct MuellerImage {
  int width = 0;
  int height = 0;
  WavelengthGrid wavelengths;
  double arm_angle = 0.0;
  std::vector<float> data;
  std::vector<std::uint8_t> valid;     // [band][pixel]
  std::vector<std::uint8_t> physical;  // [band][pixel], Givens-Kostinski
  std::vector<float> residual;         // [band][pixel], not serialized

  std::size_t pixel_count() const { return std::size_t(width) * height; }
  std::size_t slot(int band, int x, int y) const { return (std::size_t(band) * height + y) * width + x; }
  Muellerd matrix(int band, int x, int y) const;
  void set_matrix(int band, int x, int y, const Muellerd& m);
};

struct ReconstructionStats {
  std::size_t solved = 0;
  std::size_t invalid = 0;
  std::size_t physical = 0;
  double physical_fraction() const { return solved ? double(physical) / double(solved) : 0.0; }
};

struct ReconstructionResult {
  std::vector<MuellerImage> images;  // one per light arm angle
  ReconstructionStats stats;
};

/// Per-pixel solves over the occlusion-free union of measurements. Pixels
/// that miss the sphere, are unlit, or have no usable measurements are
/// flagged invalid; a pixel failure never aborts the image.
ReconstructionResult reconstruct_image(const CaptureArchive& archive, const SphereScene& scene,
                                       const AcquisitionConfig& config);

void write_mueller_image(const std::string& path, const MuellerImage& image);
MuellerImage read_mueller_image(const std::string& path);

}  // namespace hpbrdf
