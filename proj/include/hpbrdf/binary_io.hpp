// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Little-endian stream helpers shared by the binary file formats.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

#include "hpbrdf/error.hpp"

namespace hpbrdf {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace detail {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

}  // namespace detail

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  }

  void magic(std::string_view m) { out_.write(m.data(), static_cast<std::streamsize>(m.size())); }

  template <typename T>
  void put(T v) {
    static_assert(std::is_arithmetic_v<T>);
    const T le = detail::to_little(v);
    out_.write(reinterpret_cast<const char*>(&le), sizeof(T));
  }

  template <typename T>
  void put_array(std::span<const T> values) {
    if constexpr (std::endian::native == std::endian::little) {
      out_.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    } else {
      for (T v : values) put(v);
    }
  }

  void seek(std::uint64_t offset) { out_.seekp(static_cast<std::streamoff>(offset)); }
  void finish() {
    out_.flush();
    if (!out_) throw Error(ErrorCode::Io, "write failed: " + path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw Error(ErrorCode::Io, "cannot open " + path);
  }

  /// Throws BadMagic unless the next bytes equal `m`.
  void expect_magic(std::string_view m) {
    std::string got(m.size(), '\0');
    in_.read(got.data(), static_cast<std::streamsize>(m.size()));
    if (!in_ || got != m) throw Error(ErrorCode::BadMagic, path_ + ": expected magic '" + std::string(m) + "'");
  }

  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw Error(ErrorCode::TruncatedFile, path_ + ": unexpected end of file");
    return detail::to_little(v);
  }

  template <typename T>
  void get_array(std::span<T> values) {
    in_.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    if (!in_) throw Error(ErrorCode::TruncatedFile, path_ + ": unexpected end of file");
    if constexpr (std::endian::native == std::endian::big) {
      for (T& v : values) v = detail::to_little(v);
    }
  }

  /// Reads one byte if any remain.
  bool try_get(char& c) { return static_cast<bool>(in_.get(c)); }
  void seek(std::uint64_t offset) {
    in_.seekg(static_cast<std::streamoff>(offset));
    if (!in_) throw Error(ErrorCode::TruncatedFile, path_ + ": seek past the end of file");
  }

  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
};

}  // namespace hpbrdf
