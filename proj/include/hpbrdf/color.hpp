// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hpbrdf/types.hpp"
#include "hpbrdf/wavelength.hpp"

namespace hpbrdf {

/// Bands below this wavelength feed the colour preview; the rest are NIR.
inline constexpr double kNirStartNm = 714.0;

inline bool is_visible_band(double nm) { return nm < kNirStartNm; }

/// CIE 1931 2-degree colour-matching functions, 5 nm table from 380 to
/// 780 nm, linearly interpolated; zero outside the table.
Vec3 cie1931_xyz(double wavelength_nm);

/// XYZ (D65) to linear sRGB.
Mat3 xyz_to_linear_srgb();

struct Rgb8Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // [y][x][3]
};

/// Radiance planes [band][pixel] to gamma-encoded 8-bit sRGB. Bands are
/// integrated against the CMFs at their centres and white-balanced so an
/// equal-energy spectrum of unit radiance maps to R = G = B = 1 before
/// `exposure`. Grids too sparse to produce a positive white fall back to
/// the continuous equal-energy white. Throws NoVisibleBands.
Rgb8Image to_srgb(std::span<const double> radiance, int width, int height, const WavelengthGrid& wavelengths,
                  double gamma = 2.2, double exposure = 1.0);

/// Linear, white-balanced RGB of a single spectrum sampled on `wavelengths`.
Vec3 spectrum_to_linear_rgb(std::span<const double> spectrum, const WavelengthGrid& wavelengths);

/// Mean radiance over NIR bands per pixel; empty when the grid has none.
std::vector<double> nir_channel(std::span<const double> radiance, int width, int height,
                                const WavelengthGrid& wavelengths);

}  // namespace hpbrdf
