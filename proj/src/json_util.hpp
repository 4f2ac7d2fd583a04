// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpbrdf/error.hpp"
#include "hpbrdf/types.hpp"

namespace hpbrdf::json_util {

inline Vec3 vec3(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw Error(ErrorCode::InvalidConfig, "expected a 3-vector");
  return {v[0], v[1], v[2]};
}

inline nlohmann::json to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

/// A scalar broadcasts over all bands.
inline std::vector<double> per_band(const nlohmann::json& j, int count) {
  if (j.is_number()) return std::vector<double>(count, j.get<double>());
  auto v = j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != count) {
    throw Error(ErrorCode::InvalidConfig, "per-band list length does not match the wavelength grid");
  }
  return v;
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys, const char* where) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, std::string(where) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw Error(ErrorCode::InvalidConfig, std::string(where) + ": unknown key '" + key + "'");
  }
}

inline nlohmann::json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
  }
}

}  // namespace hpbrdf::json_util
