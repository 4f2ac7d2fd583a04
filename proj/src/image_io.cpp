// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include "hpbrdf/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "hpbrdf/binary_io.hpp"
#include "hpbrdf/error.hpp"

namespace hpbrdf {

void write_pfm(const std::string& path, const FloatImage& img) {
  if (img.channels != 1 && img.channels != 3) throw Error(ErrorCode::DimMismatch, "PFM needs 1 or 3 channels");
  const std::size_t row = std::size_t(img.width) * img.channels;
  if (img.pixels.size() != row * img.height) throw Error(ErrorCode::DimMismatch, "PFM pixel count mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out << (img.channels == 3 ? "PF" : "Pf") << "\n" << img.width << " " << img.height << "\n-1.0\n";
  for (int y = img.height - 1; y >= 0; --y) {
    for (std::size_t i = 0; i < row; ++i) {
      const float v = detail::to_little(img.pixels[std::size_t(y) * row + i]);
      out.write(reinterpret_cast<const char*>(&v), sizeof(float));
    }
  }
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

FloatImage read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::string magic;
  double scale = 0.0;
  FloatImage img;
  in >> magic >> img.width >> img.height >> scale;
  if (!in || (magic != "Pf" && magic != "PF")) throw Error(ErrorCode::BadMagic, path + ": not a PFM file");
  if (scale >= 0) throw Error(ErrorCode::DimMismatch, path + ": big-endian PFM is not supported");
  in.get();
  img.channels = magic == "PF" ? 3 : 1;
  const std::size_t row = std::size_t(img.width) * img.channels;
  img.pixels.resize(row * img.height);
  for (int y = img.height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(img.pixels.data() + std::size_t(y) * row),
            static_cast<std::streamsize>(row * sizeof(float)));
    if (!in) throw Error(ErrorCode::TruncatedFile, path + ": unexpected end of file");
  }
  for (float& v : img.pixels) v = detail::to_little(v);
  return img;
}

void write_png(const std::string& path, int width, int height, int channels, std::span<const std::uint8_t> pixels) {
  if (channels != 1 && channels != 3) throw Error(ErrorCode::DimMismatch, "PNG needs 1 or 3 channels");
  if (pixels.size() != std::size_t(width) * height * channels) throw Error(ErrorCode::DimMismatch, "PNG size mismatch");
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::Io, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::Io, "PNG encoding failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(pixels.data() + std::size_t(y) * width * channels));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::vector<std::uint8_t> to_gray8(std::span<const double> values, double lo, double hi) {
  std::vector<std::uint8_t> out(values.size(), 0);
  const double span = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || span <= 0) continue;
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp((values[i] - lo) / span, 0.0, 1.0)));
  }
  return out;
}

}  // namespace hpbrdf
