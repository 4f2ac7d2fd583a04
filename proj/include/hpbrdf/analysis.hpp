// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Lu-Chipman polar decomposition, scalar polarimetric maps and PCA over
/// table slices.

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hpbrdf/reconstruction.hpp"
#include "hpbrdf/table.hpp"
#include "hpbrdf/types.hpp"

namespace hpbrdf {

/// M = M_delta * M_R * M_D.
struct LuChipmanFactors {
  Muellerd depolarizer = Muellerd::Identity();
  Muellerd retarder = Muellerd::Identity();
  Muellerd diattenuator = Muellerd::Identity();
  double diattenuation = 0.0;
  double polarizance = 0.0;
  double retardance = 0.0;
  double preservation = 1.0;
  /// D >= 1 - eps: M_R maps D^ onto P^ and M_delta = diag(1, |P|, |P|, |P|);
  /// the product is then not guaranteed to reproduce the input.
  bool singular_diattenuator = false;
  /// m' m'^T rank-deficient: m_R is the nearest rotation to m'.
  bool degenerate_depolarizer = false;
};

inline constexpr double kSingularDiattenuationEps = 1e-9;

/// Throws ZeroIntensity unless m00 > 0.
LuChipmanFactors lu_chipman(const Muellerd& m);

/// |(m01, m02, m03)| / m00 clamped to [0, 1]; `out_of_range` reports clamping.
double diattenuation(const Muellerd& m, bool* out_of_range = nullptr);
/// |(m10, m20, m30)| / m00 clamped to [0, 1].
double polarizance(const Muellerd& m, bool* out_of_range = nullptr);
/// arccos(tr(M_R) / 2 - 1), in [0, pi].
double retardance_scalar(const Muellerd& retarder);
/// |tr(m_delta)| / 3 over the lower-right 3x3 block.
double preservation(const Muellerd& depolarizer);

/// Planes [band][pixel]; NaN where the input is invalid or m00 <= 0.
struct ScalarMaps {
  int width = 0;
  int height = 0;
  int bands = 0;
  std::vector<float> diattenuation;
  std::vector<float> polarizance;
  std::vector<float> retardance;
  std::vector<float> preservation;
};

/// Element-wise over 16-float row-major matrices; `valid` may be empty.
ScalarMaps scalar_maps(std::span<const float> matrices, std::span<const std::uint8_t> valid, int width, int height,
                       int bands);
ScalarMaps scalar_maps(const MuellerImage& image);

/// Writes <prefix>_<scalar>.f32 (raw little-endian [band][y][x]) and a
/// <prefix>.json sidecar with the shape and wavelengths.
void write_scalar_maps(const std::string& prefix, const ScalarMaps& maps, const WavelengthGrid& wavelengths);

enum class TableAxis { Lambda, PhiD, ThetaD, ThetaH };

TableAxis parse_table_axis(const std::string& name);
std::string table_axis_name(TableAxis axis);

/// Two axes span the feature grid; the other two axes and the Mueller
/// channel index enumerate samples. Channels are m00 followed by the 15
/// entries divided by m00. The repeated phi_d node is skipped.
struct PcaSliceSpec {
  TableAxis first = TableAxis::ThetaD;
  TableAxis second = TableAxis::ThetaH;
};

/// Samples (rows) x features (columns).
Eigen::MatrixXd pca_samples(const HpbrdfTable& table, const PcaSliceSpec& spec);

struct PcaResult {
  Eigen::VectorXd mean;                // features
  Eigen::MatrixXd components;          // features x k, orthonormal columns
  Eigen::VectorXd explained_variance;  // k, non-increasing
  Eigen::VectorXd explained_ratio;     // k, fraction of total variance
  double total_variance = 0.0;
  Eigen::Index samples = 0;
};

/// Throws InsufficientSamples with fewer than two samples or when
/// n_components exceeds the available rank bound.
PcaResult pca(const Eigen::MatrixXd& samples, int n_components);

/// Mean squared residual of projecting `samples` onto the first k components.
double pca_reconstruction_error(const PcaResult& result, const Eigen::MatrixXd& samples, int k);

}  // namespace hpbrdf
