// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace hpbrdf {

/// Uniform spectral sampling: start_nm + i * step_nm for i in [0, count).
struct WavelengthGrid {
  double start_nm = 414.0;
  double step_nm = 8.0;
  int count = 68;

  /// 68 bands, 414..950 nm at 8 nm.
  static WavelengthGrid full() { return {414.0, 8.0, 68}; }
  /// 16 bands, 414..894 nm at 32 nm.
  static WavelengthGrid desk() { return {414.0, 32.0, 16}; }

  double wavelength(int i) const { return start_nm + step_nm * i; }
  double end_nm() const { return wavelength(count - 1); }
  /// Bands [first, first + n) as a grid of their own.
  WavelengthGrid slice(int first, int n) const { return {wavelength(first), step_nm, n}; }

  int nearest_index(double nm) const {
    const double t = (nm - start_nm) / step_nm;
    return std::clamp(static_cast<int>(std::lround(t)), 0, count - 1);
  }

  std::vector<double> wavelengths() const {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = wavelength(i);
    return out;
  }

  bool operator==(const WavelengthGrid&) const = default;
};

}  // namespace hpbrdf
