// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include "hpbrdf/color.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hpbrdf/error.hpp"

namespace hpbrdf {

namespace {

constexpr double kCmfStartNm = 380.0;
constexpr double kCmfStepNm = 5.0;

// x-bar, y-bar, z-bar
constexpr std::array<std::array<double, 3>, 81> kCie1931 = {{
    {0.001368, 0.000039, 0.006450},
    {0.002236, 0.000064, 0.010550},
    {0.004243, 0.000120, 0.020050},
    {0.007650, 0.000217, 0.036210},
    {0.014310, 0.000396, 0.067850},  // 400
    {0.023190, 0.000640, 0.110200},
    {0.043510, 0.001210, 0.207400},
    {0.077630, 0.002180, 0.371300},
    {0.134380, 0.004000, 0.645600},
    {0.214770, 0.007300, 1.039050},
    {0.283900, 0.011600, 1.385600},
    {0.328500, 0.016840, 1.622960},
    {0.348280, 0.023000, 1.747060},
    {0.348060, 0.029800, 1.782600},
    {0.336200, 0.038000, 1.772110},  // 450
    {0.318700, 0.048000, 1.744100},
    {0.290800, 0.060000, 1.669200},
    {0.251100, 0.073900, 1.528100},
    {0.195360, 0.090980, 1.287640},
    {0.142100, 0.112600, 1.041900},
    {0.095640, 0.139020, 0.812950},
    {0.057950, 0.169300, 0.616200},
    {0.032010, 0.208020, 0.465180},
    {0.014700, 0.258600, 0.353300},
    {0.004900, 0.323000, 0.272000},  // 500
    {0.002400, 0.407300, 0.212300},
    {0.009300, 0.503000, 0.158200},
    {0.029100, 0.608200, 0.111700},
    {0.063270, 0.710000, 0.078250},
    {0.109600, 0.793200, 0.057250},
    {0.165500, 0.862000, 0.042160},
    {0.225750, 0.914850, 0.029840},
    {0.290400, 0.954000, 0.020300},
    {0.359700, 0.980300, 0.013400},
    {0.433450, 0.994950, 0.008750},  // 550
    {0.512050, 1.000000, 0.005750},
    {0.594500, 0.995000, 0.003900},
    {0.678400, 0.978600, 0.002750},
    {0.762100, 0.952000, 0.002100},
    {0.842500, 0.915400, 0.001800},
    {0.916300, 0.870000, 0.001650},
    {0.978600, 0.816300, 0.001400},
    {1.026300, 0.757000, 0.001100},
    {1.056700, 0.694900, 0.001000},
    {1.062200, 0.631000, 0.000800},  // 600
    {1.045600, 0.566800, 0.000600},
    {1.002600, 0.503000, 0.000340},
    {0.938400, 0.441200, 0.000240},
    {0.854450, 0.381000, 0.000190},
    {0.751400, 0.321000, 0.000100},
    {0.642400, 0.265000, 0.000050},
    {0.541900, 0.217000, 0.000030},
    {0.447900, 0.175000, 0.000020},
    {0.360800, 0.138200, 0.000010},
    {0.283500, 0.107000, -0.000000},  // 650
    {0.218700, 0.081600, 0.000000},
    {0.164900, 0.061000, 0.000000},
    {0.121200, 0.044580, 0.000000},
    {0.087400, 0.032000, 0.000000},
    {0.063600, 0.023200, 0.000000},
    {0.046770, 0.017000, 0.000000},
    {0.032900, 0.011920, 0.000000},
    {0.022700, 0.008210, 0.000000},
    {0.015840, 0.005723, 0.000000},
    {0.011359, 0.004102, 0.000000},  // 700
    {0.008111, 0.002929, 0.000000},
    {0.005790, 0.002091, 0.000000},
    {0.004109, 0.001484, 0.000000},
    {0.002899, 0.001047, 0.000000},
    {0.002049, 0.000740, 0.000000},
    {0.001440, 0.000520, 0.000000},
    {0.001000, 0.000361, 0.000000},
    {0.000690, 0.000249, 0.000000},
    {0.000476, 0.000172, 0.000000},
    {0.000332, 0.000120, 0.000000},  // 750
    {0.000235, 0.000085, 0.000000},
    {0.000166, 0.000060, 0.000000},
    {0.000117, 0.000042, 0.000000},
    {0.000083, 0.000030, 0.000000},
    {0.000059, 0.000021, 0.000000},
    {0.000042, 0.000015, 0.000000},
}};

Vec3 white_rgb(const WavelengthGrid& g) {
  Vec3 xyz = Vec3::Zero();
  int visible = 0;
  for (int b = 0; b < g.count; ++b) {
    if (!is_visible_band(g.wavelength(b))) continue;
    xyz += cie1931_xyz(g.wavelength(b));
    ++visible;
  }
  if (visible == 0 || !(xyz.y() > 0)) {
    throw Error(ErrorCode::NoVisibleBands, "no visible bands below 714 nm to build a colour image");
  }
  const Vec3 rgb = xyz_to_linear_srgb() * xyz;
  if ((rgb.array() > 0).all()) return rgb;
  // Too few bands to span the gamut: balance against the continuous
  // equal-energy white at the same luminance.
  Vec3 dense = Vec3::Zero();
  for (const auto& row : kCie1931) dense += Vec3(row[0], row[1], row[2]);
  return xyz_to_linear_srgb() * dense * (xyz.y() / dense.y());
}

}  // namespace

Vec3 cie1931_xyz(double nm) {
  const double t = (nm - kCmfStartNm) / kCmfStepNm;
  if (t < 0 || t > double(kCie1931.size() - 1)) return Vec3::Zero();
  const std::size_t i = std::min(static_cast<std::size_t>(t), kCie1931.size() - 2);
  const double f = t - double(i);
  Vec3 out;
  for (int c = 0; c < 3; ++c) out(c) = (1 - f) * kCie1931[i][c] + f * kCie1931[i + 1][c];
  return out;
}

Mat3 xyz_to_linear_srgb() {
  Mat3 m;
  m << 3.2404542, -1.5371385, -0.4985314,
       -0.9692660, 1.8760108, 0.0415560,
       0.0556434, -0.2040259, 1.0572252;
  return m;
}

Vec3 spectrum_to_linear_rgb(std::span<const double> spectrum, const WavelengthGrid& g) {
  if (spectrum.size() != std::size_t(g.count)) throw Error(ErrorCode::DimMismatch, "spectrum length != band count");
  const Vec3 white = white_rgb(g);
  Vec3 xyz = Vec3::Zero();
  for (int b = 0; b < g.count; ++b)
    if (is_visible_band(g.wavelength(b))) xyz += spectrum[b] * cie1931_xyz(g.wavelength(b));
  return (xyz_to_linear_srgb() * xyz).cwiseQuotient(white);
}

Rgb8Image to_srgb(std::span<const double> radiance, int width, int height, const WavelengthGrid& g, double gamma,
                  double exposure) {
  const std::size_t pixels = std::size_t(width) * height;
  if (radiance.size() != pixels * g.count) throw Error(ErrorCode::DimMismatch, "radiance planes do not match the grid");
  const Vec3 white = white_rgb(g);
  const Mat3 to_rgb = xyz_to_linear_srgb();
  std::vector<Vec3> cmf(g.count);
  for (int b = 0; b < g.count; ++b)
    cmf[b] = is_visible_band(g.wavelength(b)) ? cie1931_xyz(g.wavelength(b)) : Vec3::Zero();

  Rgb8Image out{width, height, std::vector<std::uint8_t>(pixels * 3)};
  for (std::size_t p = 0; p < pixels; ++p) {
    Vec3 xyz = Vec3::Zero();
    for (int b = 0; b < g.count; ++b) xyz += radiance[std::size_t(b) * pixels + p] * cmf[b];
    const Vec3 lin = exposure * (to_rgb * xyz).cwiseQuotient(white);
    for (int c = 0; c < 3; ++c) {
      const double v = std::pow(std::clamp(lin(c), 0.0, 1.0), 1.0 / gamma);
      out.rgb[3 * p + c] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
  }
  return out;
}

std::vector<double> nir_channel(std::span<const double> radiance, int width, int height, const WavelengthGrid& g) {
  const std::size_t pixels = std::size_t(width) * height;
  if (radiance.size() != pixels * g.count) throw Error(ErrorCode::DimMismatch, "radiance planes do not match the grid");
  std::vector<double> out;
  int nir = 0;
  for (int b = 0; b < g.count; ++b) {
    if (is_visible_band(g.wavelength(b))) continue;
    if (out.empty()) out.assign(pixels, 0.0);
    for (std::size_t p = 0; p < pixels; ++p) out[p] += radiance[std::size_t(b) * pixels + p];
    ++nir;
  }
  for (double& v : out) v /= nir;
  return out;
}

}  // namespace hpbrdf
