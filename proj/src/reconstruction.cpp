// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include "hpbrdf/reconstruction.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "hpbrdf/binary_io.hpp"
#include "hpbrdf/error.hpp"
#include "hpbrdf/mueller.hpp"
#include "hpbrdf/parallel.hpp"

namespace hpbrdf {

double DesignMatrix::conditioning() const {
  if (singular_values.size() == 0 || singular_values(0) == 0) return 0.0;
  return singular_values(singular_values.size() - 1) / singular_values(0);
}

DesignMatrix build_design_matrix(const AcquisitionConfig& config, int band, const PixelChain& chain) {
  const auto n_t = config.illum_qwp_angles.size();
  const auto n_tp = config.analyzer_qwp_angles.size();
  if (n_t * n_tp < 16) {
    throw Error(ErrorCode::InsufficientMeasurements,
                "design matrix needs >= 16 measurements, got " + std::to_string(n_t * n_tp));
  }
  DesignMatrix d;
  d.rows.resize(static_cast<Eigen::Index>(n_t * n_tp), 16);
  Eigen::Index k = 0;
  for (double theta : config.illum_qwp_angles) {
    const Stokesd b = chain.c_ei * emitted_stokes(config, theta, band);
    for (double theta_p : config.analyzer_qwp_angles) {
      const Stokesd a = chain.c_rc.transpose() * analyzer_row(config, theta_p, band);
      const Muellerd outer = chain.geometry_factor * a * b.transpose();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) d.rows(k, 4 * i + j) = outer(i, j);
      ++k;
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
  d.singular_values = svd.singularValues();
  const double cutoff = kPinvCutoff * d.singular_values(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(d.singular_values.size());
  for (Eigen::Index i = 0; i < d.singular_values.size(); ++i) {
    if (d.singular_values(i) > cutoff) {
      inv(i) = 1.0 / d.singular_values(i);
      ++d.rank;
    }
  }
  d.pseudo_inverse = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return d;
}

MuellerSolution solve_mueller(std::span<const double> measurements, const DesignMatrix& design) {
  if (design.rank < 16) {
    throw Error(ErrorCode::RankDeficient, "design matrix has effective rank " + std::to_string(design.rank));
  }
  if (static_cast<Eigen::Index>(measurements.size()) != design.rows.rows()) {
    throw Error(ErrorCode::DimMismatch, "measurement count does not match the design matrix");
  }
  const Eigen::Map<const Eigen::VectorXd> f(measurements.data(), static_cast<Eigen::Index>(measurements.size()));
  if (!f.allFinite()) throw Error(ErrorCode::NonFinite, "solve_mueller: non-finite measurement");
  const Eigen::VectorXd x = design.pseudo_inverse * f;
  MuellerSolution s;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s.m(i, j) = x(4 * i + j);
  s.rms_residual = std::sqrt((design.rows * x - f).squaredNorm() / double(f.size()));
  return s;
}

Muellerd MuellerImage::matrix(int band, int x, int y) const {
  const float* p = data.data() + 16 * slot(band, x, y);
  Muellerd m;
  for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = p[i];
  return m;
}

void MuellerImage::set_matrix(int band, int x, int y, const Muellerd& m) {
  float* p = data.data() + 16 * slot(band, x, y);
  for (int i = 0; i < 16; ++i) p[i] = static_cast<float>(m(i / 4, i % 4));
}

ReconstructionResult reconstruct_image(const CaptureArchive& ar, const SphereScene& scene,
                                       const AcquisitionConfig& config) {
  if (ar.width != scene.camera.width || ar.height != scene.camera.height ||
      ar.wavelengths.count != config.wavelengths.count ||
      ar.illum_angles.size() != config.illum_qwp_angles.size() ||
      ar.analyzer_angles.size() != config.analyzer_qwp_angles.size()) {
    throw Error(ErrorCode::DimMismatch, "archive does not match the acquisition config");
  }
  AcquisitionConfig cfg = config;
  cfg.illum_qwp_angles = ar.illum_angles;
  cfg.analyzer_qwp_angles = ar.analyzer_angles;

  const int n_band = ar.wavelengths.count;
  const int n_rows = cfg.measurements_per_band();

  // With C_ei and C_rc pulled out, the design only depends on the band:
  // solve for M_lab = C_rc M C_ei and rotate back per pixel.
  std::vector<DesignMatrix> designs;
  designs.reserve(n_band);
  for (int b = 0; b < n_band; ++b) designs.push_back(build_design_matrix(cfg, b));

  ReconstructionResult result;
  const bool per_band_geometry = !scene.camera.view_offsets.empty();
  for (std::size_t arm = 0; arm < ar.arm_angles.size(); ++arm) {
    MuellerImage img;
    img.width = ar.width;
    img.height = ar.height;
    img.wavelengths = ar.wavelengths;
    img.arm_angle = ar.arm_angles[arm];
    img.data.assign(std::size_t(n_band) * img.pixel_count() * 16, 0.0f);
    img.valid.assign(std::size_t(n_band) * img.pixel_count(), 0);
    img.physical.assign(img.valid.size(), 0);
    img.residual.assign(img.valid.size(), 0.0f);

    parallel_for(0, ar.height, [&](std::int64_t yy) {
      const int y = static_cast<int>(yy);
      std::vector<double> f(n_rows);
      for (int x = 0; x < ar.width; ++x) {
        int positions = 0;
        for (int p = 0; p < ar.positions; ++p) positions += ar.masks[(std::size_t(p) * ar.height + y) * ar.width + x];
        std::optional<PixelGeometry> geom;
        for (int b = 0; b < n_band; ++b) {
          if (b == 0 || per_band_geometry) geom = sphere_pixel_geometry(scene, x, y, img.arm_angle, b);
          if (!geom || positions == 0 || designs[b].rank < 16) continue;
          const PixelChain& chain = geom->chain;
          std::fill(f.begin(), f.end(), 0.0);
          for (int p = 0; p < ar.positions; ++p) {
            if (!ar.masks[(std::size_t(p) * ar.height + y) * ar.width + x]) continue;
            int k = 0;
            for (std::size_t t = 0; t < ar.illum_angles.size(); ++t)
              for (std::size_t tp = 0; tp < ar.analyzer_angles.size(); ++tp)
                f[k++] += ar.intensities[ar.index(p, static_cast<int>(arm), b, static_cast<int>(t),
                                                  static_cast<int>(tp), y, x)];
          }
          // Duplicate rows from several positions reduce to their mean.
          const double scale = 1.0 / (positions * chain.geometry_factor);
          for (double& v : f) v *= scale;
          MuellerSolution lab;
          try {
            lab = solve_mueller(f, designs[b]);
          } catch (const Error&) {
            continue;
          }
          const Muellerd m = chain.c_rc.transpose() * lab.m * chain.c_ei.transpose();
          const std::size_t s = img.slot(b, x, y);
          img.set_matrix(b, x, y, m);
          img.valid[s] = 1;
          img.residual[s] = static_cast<float>(lab.rms_residual * chain.geometry_factor);
          try {
            img.physical[s] = is_physical_gk(m).physical ? 1 : 0;
          } catch (const Error&) {
            img.physical[s] = 0;
          }
        }
      }
    });

    for (std::size_t s = 0; s < img.valid.size(); ++s) {
      if (img.valid[s]) {
        ++result.stats.solved;
        result.stats.physical += img.physical[s];
      } else {
        ++result.stats.invalid;
      }
    }
    result.images.push_back(std::move(img));
  }
  return result;
}

// Mueller image (.hpmi), little-endian:
//   "HPMI" u32 version=1, u32 width, height, n_band
//   f64 lambda_start_nm, f64 lambda_step_nm, f64 arm_angle (radians)
//   f32 data[band][y][x][16] (row-major 4x4)
//   packed bits valid[band][y][x], packed bits physical[band][y][x] (LSB first)

namespace {

constexpr std::uint32_t kImageVersion = 1;

std::vector<std::uint8_t> pack_bits(const std::vector<std::uint8_t>& flags) {
  std::vector<std::uint8_t> out((flags.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (flags[i]) out[i / 8] |= std::uint8_t(1u << (i % 8));
  return out;
}

std::vector<std::uint8_t> unpack_bits(const std::vector<std::uint8_t>& packed, std::size_t n) {
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (packed[i / 8] >> (i % 8)) & 1u;
  return out;
}

}  // namespace

void write_mueller_image(const std::string& path, const MuellerImage& img) {
  BinaryWriter w(path);
  w.magic("HPMI");
  w.put<std::uint32_t>(kImageVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(img.width));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(img.height));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(img.wavelengths.count));
  w.put<double>(img.wavelengths.start_nm);
  w.put<double>(img.wavelengths.step_nm);
  w.put<double>(img.arm_angle);
  w.put_array<float>(img.data);
  w.put_array<std::uint8_t>(pack_bits(img.valid));
  w.put_array<std::uint8_t>(pack_bits(img.physical));
  w.finish();
}

MuellerImage read_mueller_image(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic("HPMI");
  if (r.get<std::uint32_t>() != kImageVersion) throw Error(ErrorCode::DimMismatch, path + ": unsupported version");
  MuellerImage img;
  img.width = static_cast<int>(r.get<std::uint32_t>());
  img.height = static_cast<int>(r.get<std::uint32_t>());
  img.wavelengths.count = static_cast<int>(r.get<std::uint32_t>());
  img.wavelengths.start_nm = r.get<double>();
  img.wavelengths.step_nm = r.get<double>();
  img.arm_angle = r.get<double>();
  const std::size_t slots = std::size_t(img.wavelengths.count) * img.pixel_count();
  img.data.resize(slots * 16);
  r.get_array<float>(img.data);
  std::vector<std::uint8_t> packed((slots + 7) / 8);
  r.get_array<std::uint8_t>(packed);
  img.valid = unpack_bits(packed, slots);
  r.get_array<std::uint8_t>(packed);
  img.physical = unpack_bits(packed, slots);
  img.residual.assign(slots, 0.0f);
  return img;
}

}  // namespace hpbrdf
