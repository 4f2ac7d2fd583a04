// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Direct-illumination spectral polarimetric rendering of a sphere under a
/// point light, with either the analytic material or a tabulated hpBRDF.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hpbrdf/acquisition.hpp"
#include "hpbrdf/analytic_pbrdf.hpp"
#include "hpbrdf/reconstruction.hpp"
#include "hpbrdf/table.hpp"

namespace hpbrdf {

struct RenderScene {
  SphereScene sphere;
  /// Light position on the arm, as in the capture rig.
  double light_arm_angle = 0.0;
  WavelengthGrid wavelengths = WavelengthGrid::desk();
  std::vector<double> light_spectrum;  // per band; empty means 1
  /// Linear polarizer in front of the light (light-frame angle); none when unset.
  std::optional<double> light_polarizer_angle;

  double light_radiance(int band) const { return light_spectrum.empty() ? 1.0 : light_spectrum.at(band); }
  Stokesd light_stokes(int band) const;

  static RenderScene from_json(const nlohmann::json& j);
  static RenderScene load(const std::string& path);
  nlohmann::json to_json() const;
};

/// A material evaluates hpBRDF Mueller matrices in the hpbrdf_frames.
class Material {
 public:
  static Material analytic(const AnalyticPbrdf& pbrdf);
  static Material tabulated(const HpbrdfTable& table, LookupMode mode);

  /// Zero when a tabulated lookup finds no data.
  Muellerd eval(const Vec3& omega_i, const Vec3& omega_o, const TangentFrame& frame, double wavelength_nm) const;

 private:
  const AnalyticPbrdf* analytic_ = nullptr;
  const HpbrdfTable* table_ = nullptr;
  LookupMode mode_ = LookupMode::Trilinear;
};

/// Camera-frame Stokes vectors per band and pixel.
struct SpectralStokesImage {
  int width = 0;
  int height = 0;
  WavelengthGrid wavelengths;
  std::vector<double> stokes;      // [band][y][x][4]
  std::vector<std::uint8_t> hit;   // [y][x]

  std::size_t pixel_count() const { return std::size_t(width) * height; }
  std::size_t slot(int band, int x, int y) const { return (std::size_t(band) * height + y) * width + x; }
  Stokesd at(int band, int x, int y) const;
  /// s0 planes [band][pixel].
  std::vector<double> intensity() const;
};

SpectralStokesImage render_direct(const RenderScene& scene, const Material& material);

/// Per-pixel material Mueller matrices (hpBRDF frames); valid where the
/// sphere is hit and lit.
MuellerImage render_mueller_image(const RenderScene& scene, const Material& material);

/// [band][pixel] intensities behind an ideal polarizer at `angle` from the
/// camera frame x axis.
std::vector<double> apply_polarizer(const SpectralStokesImage& image, double angle);

/// Degree of polarization per pixel for one band, or of the band-summed
/// Stokes vector when band < 0. Zero where s0 = 0.
std::vector<double> dop_map(const SpectralStokesImage& image, int band = -1);

/// Angle of linear polarization 0.5 * atan2(s2, s1) in [0, pi), measured
/// from the camera x axis.
std::vector<double> aolp_map(const SpectralStokesImage& image, int band = -1);

}  // namespace hpbrdf
