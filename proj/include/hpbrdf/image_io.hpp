// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hpbrdf {

/// Float image with rows stored top to bottom, channels interleaved.
struct FloatImage {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 or 3
  std::vector<float> pixels;
};

/// Portable float map ("Pf" / "PF"), little-endian; PFM stores rows bottom
/// to top, which is handled here.
void write_pfm(const std::string& path, const FloatImage& image);
FloatImage read_pfm(const std::string& path);

/// 8-bit PNG, 1 (gray) or 3 (RGB) channels, rows top to bottom.
void write_png(const std::string& path, int width, int height, int channels, std::span<const std::uint8_t> pixels);

/// Maps [lo, hi] linearly onto 0..255; NaN maps to 0.
std::vector<std::uint8_t> to_gray8(std::span<const double> values, double lo, double hi);

}  // namespace hpbrdf
