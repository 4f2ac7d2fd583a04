// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "hpbrdf/error.hpp"
#include "hpbrdf/parallel.hpp"
#include "hpbrdf/table.hpp"

namespace hpbrdf {

namespace {

constexpr int kChannels = 17;  // 16 mask-weighted entries + the mask itself

std::vector<double> gaussian_taps(double sigma, int& radius) {
  radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k) taps[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
  return taps;
}

/// In-place separable pass along one axis of a [n0][n1][n2][kChannels] grid.
void convolve_axis(std::vector<double>& grid, const std::array<int, 3>& n, int axis, double sigma, bool periodic) {
  int radius = 0;
  const std::vector<double> taps = gaussian_taps(sigma, radius);
  const int len = n[axis];
  std::array<std::size_t, 3> stride{std::size_t(n[1]) * n[2] * kChannels, std::size_t(n[2]) * kChannels,
                                    std::size_t(kChannels)};
  const std::size_t step = stride[axis];
  std::vector<double> line(std::size_t(len) * kChannels);
  std::vector<double> out(line.size());

  std::array<int, 2> others{};
  int o = 0;
  for (int a = 0; a < 3; ++a)
    if (a != axis) others[o++] = a;

  for (int i = 0; i < n[others[0]]; ++i) {
    for (int j = 0; j < n[others[1]]; ++j) {
      const std::size_t base = i * stride[others[0]] + j * stride[others[1]];
      for (int k = 0; k < len; ++k)
        std::copy_n(grid.begin() + base + k * step, kChannels, line.begin() + std::size_t(k) * kChannels);
      std::fill(out.begin(), out.end(), 0.0);
      for (int k = 0; k < len; ++k) {
        double* dst = out.data() + std::size_t(k) * kChannels;
        for (int t = -radius; t <= radius; ++t) {
          int src = k + t;
          if (periodic) {
            src = ((src % len) + len) % len;
          } else if (src < 0 || src >= len) {
            continue;
          }
          const double w = taps[t + radius];
          const double* s = line.data() + std::size_t(src) * kChannels;
          for (int c = 0; c < kChannels; ++c) dst[c] += w * s[c];
        }
      }
      for (int k = 0; k < len; ++k)
        std::copy_n(out.begin() + std::size_t(k) * kChannels, kChannels, grid.begin() + base + k * step);
    }
  }
}

/// Fills the empty bins of one band; returns false if the band has no samples.
bool inpaint_band(HpbrdfTable& t, const HpbrdfTable& src, int band, const std::array<double, 3>& sigma) {
  const TableDims& d = t.dims();
  const std::array<int, 3> n{d.n_phi_d - 1, d.n_theta_d, d.n_theta_h};
  const std::size_t cells = std::size_t(n[0]) * n[1] * n[2];

  std::vector<double> seed(cells * kChannels, 0.0);
  std::vector<std::uint8_t> filled(cells, 0);
  std::size_t occupied = 0;
  for (int p = 0; p < n[0]; ++p) {
    for (int a = 0; a < n[1]; ++a) {
      for (int h = 0; h < n[2]; ++h) {
        const std::size_t cell = (std::size_t(p) * n[1] + a) * n[2] + h;
        const std::size_t bin = t.bin(band, p, a, h);
        if (!src.mask()[bin]) continue;
        filled[cell] = 1;
        ++occupied;
        double* s = seed.data() + cell * kChannels;
        for (int e = 0; e < 16; ++e) s[e] = src.data()[16 * bin + e];
        s[16] = 1.0;
      }
    }
  }
  if (occupied == 0) return false;

  std::array<double, 3> s = sigma;
  const int longest = *std::max_element(n.begin(), n.end());
  while (occupied < cells) {
    std::vector<double> grid = seed;
    for (int axis = 0; axis < 3; ++axis) convolve_axis(grid, n, axis, s[axis], axis == 0);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      if (filled[cell]) continue;
      const double* g = grid.data() + cell * kChannels;
      if (!(g[16] > 1e-12)) continue;
      const int p = static_cast<int>(cell / (std::size_t(n[1]) * n[2]));
      const int a = static_cast<int>((cell / n[2]) % n[1]);
      const int h = static_cast<int>(cell % n[2]);
      const std::size_t bin = t.bin(band, p, a, h);
      for (int e = 0; e < 16; ++e) t.data()[16 * bin + e] = static_cast<float>(g[e] / g[16]);
      t.mask()[bin] = 1;
      filled[cell] = 1;
      ++occupied;
    }
    for (double& v : s) v *= 2.0;
    if (s[0] > 8.0 * longest && s[1] > 8.0 * longest && s[2] > 8.0 * longest && occupied < cells) {
      throw Error(ErrorCode::NumericalFailure, "inpainting did not converge");
    }
  }

  // phi_d = 2pi repeats phi_d = 0 where it was empty.
  for (int a = 0; a < n[1]; ++a) {
    for (int h = 0; h < n[2]; ++h) {
      const std::size_t first = t.bin(band, 0, a, h);
      const std::size_t last = t.bin(band, d.n_phi_d - 1, a, h);
      if (src.mask()[last]) continue;
      t.mask()[last] = t.mask()[first];
      std::copy_n(t.data().begin() + 16 * first, 16, t.data().begin() + 16 * last);
    }
  }
  return true;
}

}  // namespace

HpbrdfTable inpaint(const HpbrdfTable& table, const std::array<double, 3>& sigma_bins) {
  for (double s : sigma_bins) {
    if (!(s > 0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidConfig, "inpaint sigma must be positive");
  }
  if (table.filled_bins() == 0) throw Error(ErrorCode::EmptyTable, "table has no occupied bins");
  HpbrdfTable out = table;
  if (table.filled_bins() == table.dims().bins()) return out;

  const int n_band = table.dims().n_lambda;
  std::vector<std::uint8_t> populated(n_band, 0);
  parallel_for(0, n_band, [&](std::int64_t b) {
    populated[b] = inpaint_band(out, table, static_cast<int>(b), sigma_bins) ? 1 : 0;
  });

  const std::size_t per_band = table.dims().angular_bins();
  for (int b = 0; b < n_band; ++b) {
    if (populated[b]) continue;
    int nearest = -1;
    for (int k = 0; k < n_band; ++k) {
      if (populated[k] && (nearest < 0 || std::abs(k - b) < std::abs(nearest - b))) nearest = k;
    }
    std::copy_n(out.data().begin() + 16 * per_band * nearest, 16 * per_band, out.data().begin() + 16 * per_band * b);
    std::fill_n(out.mask().begin() + per_band * b, per_band, std::uint8_t(1));
  }
  return out;
}

}  // namespace hpbrdf
