// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Tabulated hpBRDF P(lambda, phi_d, theta_d, theta_h) in R^{4x4}.
///
/// Angular bins are grid nodes: phi_d node k sits at k * 2pi / (n_phi - 1),
/// so the last node repeats phi_d = 0 (= 2pi); theta nodes sit at
/// k * (pi/2) / (n_theta - 1). Storage order is lambda outermost, then
/// phi_d, theta_d, theta_h, then the row-major 4x4 matrix.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hpbrdf/binary_io.hpp"
#include "hpbrdf/reconstruction.hpp"
#include "hpbrdf/rusinkiewicz.hpp"
#include "hpbrdf/types.hpp"
#include "hpbrdf/wavelength.hpp"

namespace hpbrdf {

struct TableDims {
  int n_lambda = 68;
  int n_phi_d = 361;
  int n_theta_d = 91;
  int n_theta_h = 91;

  static TableDims full() { return {68, 361, 91, 91}; }
  static TableDims desk() { return {16, 90, 23, 23}; }
  /// Parses "68x361x91x91".
  static TableDims parse(const std::string& text);
  std::string to_string() const;

  std::size_t bins() const { return std::size_t(n_lambda) * n_phi_d * n_theta_d * n_theta_h; }
  std::size_t angular_bins() const { return std::size_t(n_phi_d) * n_theta_d * n_theta_h; }
  /// float32 4x4 data plane, in bytes.
  std::size_t payload_bytes() const { return bins() * 16 * sizeof(float); }

  bool operator==(const TableDims&) const = default;
};

/// Continuous bin-index coordinates of a direction pair.
struct BinCoord {
  double phi = 0.0;
  double theta_d = 0.0;
  double theta_h = 0.0;
};

class HpbrdfTable {
 public:
  HpbrdfTable() = default;
  HpbrdfTable(TableDims dims, WavelengthGrid wavelengths);

  const TableDims& dims() const { return dims_; }
  const WavelengthGrid& wavelengths() const { return wavelengths_; }

  std::size_t bin(int band, int phi, int theta_d, int theta_h) const {
    return ((std::size_t(band) * dims_.n_phi_d + phi) * dims_.n_theta_d + theta_d) * dims_.n_theta_h + theta_h;
  }

  double phi_d_at(int node) const;
  double theta_d_at(int node) const;
  double theta_h_at(int node) const;
  BinCoord bin_coord(const RusinkiewiczCoord& c) const;

  Muellerd matrix(std::size_t bin) const;
  void set_matrix(std::size_t bin, const Muellerd& m);

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }
  std::vector<float>& weight() { return weight_; }
  const std::vector<float>& weight() const { return weight_; }
  std::vector<std::uint8_t>& mask() { return mask_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  std::size_t filled_bins() const;

 private:
  TableDims dims_;
  WavelengthGrid wavelengths_;
  std::vector<float> data_;           // bins * 16
  std::vector<float> weight_;         // bins
  std::vector<std::uint8_t> mask_;    // bins
};

/// Splat accumulator. Each sample lands on the 3x3x3 node neighbourhood of
/// its nearest angular node with separable tent weights (radius 1.5 bins),
/// normalized to sum to one; phi_d wraps, theta nodes outside the grid are
/// dropped before normalization.
class TableAccumulator {
 public:
  TableAccumulator(TableDims dims, WavelengthGrid wavelengths);

  const TableDims& dims() const { return dims_; }

  /// Adds one Mueller matrix already expressed in the hpBRDF frames.
  void add(int band, const RusinkiewiczCoord& coord, const Muellerd& m);

  /// Splats every valid pixel of a reconstructed image, with the geometry
  /// recovered from the scene. Image band first_band + b feeds table band b,
  /// so a band slice of a table can be accumulated on its own. Returns the
  /// number of accepted pixels.
  std::size_t add_image(const MuellerImage& image, const SphereScene& scene, int first_band = 0);

  std::size_t accepted() const { return accepted_; }
  std::size_t skipped() const { return skipped_; }
  double total_weight() const;

  /// Weighted means where weight > 0; the repeated phi_d node copies node 0.
  HpbrdfTable finalize() const;

 private:
  bool splat(int band, const RusinkiewiczCoord& coord, const Muellerd& m);

  TableDims dims_;
  WavelengthGrid wavelengths_;
  std::vector<double> sum_;     // bins * 16
  std::vector<double> weight_;  // bins
  std::size_t accepted_ = 0;
  std::size_t skipped_ = 0;
};

/// Normalized-convolution inpainting of empty bins with a separable
/// Gaussian (sigma in bins for phi_d, theta_d, theta_h, truncated at
/// 3 sigma). Sigma doubles until every bin is filled. Occupied bins are left
/// untouched; a band without samples copies its nearest populated band.
/// Throws EmptyTable when nothing is occupied.
HpbrdfTable inpaint(const HpbrdfTable& table, const std::array<double, 3>& sigma_bins = {2.0, 2.0, 2.0});

enum class LookupMode { Nearest, Trilinear };

/// Mueller matrix in the hpbrdf_frames of (omega_i, omega_o). Trilinear mode
/// interpolates angles over filled nodes and wavelength linearly; nearest
/// mode throws UnfilledBin on an empty bin.
Muellerd lookup(const HpbrdfTable& table, double wavelength_nm, const Vec3& omega_i, const Vec3& omega_o,
                const TangentFrame& frame, LookupMode mode);

Muellerd lookup(const HpbrdfTable& table, double wavelength_nm, const RusinkiewiczCoord& coord, LookupMode mode);

struct TableHeader {
  TableDims dims;
  WavelengthGrid wavelengths;
  std::size_t payload_bytes() const { return dims.payload_bytes(); }
};

/// "HPBT" u32 version, u32 n_lambda, n_phi_d, n_theta_d, n_theta_h,
/// f64 start_nm, f64 step_nm, then float32 data [bins][16], float32
/// weight [bins] and the mask as packed bits (LSB first), little-endian.
void write_table(const std::string& path, const HpbrdfTable& table);
HpbrdfTable read_table(const std::string& path);

/// Reads only the header; checks the file length against the dims.
TableHeader read_table_header(const std::string& path);

struct TableFileInfo {
  TableHeader header;
  std::uintmax_t file_bytes = 0;
  std::uintmax_t expected_bytes = 0;  // implied by the dims
};

/// Header and sizes without touching the payload or checking the length.
TableFileInfo inspect_table_file(const std::string& path);

/// Bands [first, first + count) of a table file as a table of `count` bands.
HpbrdfTable read_table_bands(const std::string& path, int first, int count);

/// Writes a table file in band blocks so that only one block and the packed
/// mask need to be in memory. The result is byte-identical to write_table.
class TableFileWriter {
 public:
  TableFileWriter(const std::string& path, const TableHeader& header);
  /// `bands` holds consecutive bands starting at `first`.
  void write_bands(int first, const HpbrdfTable& bands);
  /// Writes the mask plane; throws unless every band was written.
  void finish();

 private:
  BinaryWriter out_;
  TableHeader header_;
  std::vector<std::uint8_t> packed_mask_;
  std::vector<std::uint8_t> written_;
};

}  // namespace hpbrdf
