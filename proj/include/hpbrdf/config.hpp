// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Pipeline configuration file (JSON). Every section is optional and
/// unknown keys are rejected. Schema:
///
///   paths:       { material: str, output_dir: str }
///   acquisition: see AcquisitionConfig::from_json
///   scene:       see SphereScene::from_json
///   table:       { bins: "68x361x91x91" }
///   inpaint:     { sigma: [phi_d, theta_d, theta_h] }   (bins)
///   render:      see RenderScene::from_json
///   train:       { layers: "4x256", activation: "tanh" | "silu",
///                  encoding_frequencies, batch_size, step_size,
///                  iterations, seed }

#pragma once

#include <array>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "hpbrdf/acquisition.hpp"
#include "hpbrdf/mlp.hpp"
#include "hpbrdf/renderer.hpp"
#include "hpbrdf/table.hpp"

namespace hpbrdf {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "HPBRDF_CONFIG";

struct PipelineConfig {
  std::string material_path;
  std::string output_dir = ".";
  AcquisitionConfig acquisition = AcquisitionConfig::defaults();
  SphereScene scene;
  TableDims table = TableDims::full();
  std::array<double, 3> inpaint_sigma{2.0, 2.0, 2.0};
  RenderScene render;
  MlpArchitecture architecture;
  TrainConfig train;

  /// Reference-rig values: 68 bands from 414 nm, 4 x 6 QWP angles,
  /// 361 x 91 x 91 angular bins.
  static PipelineConfig defaults() { return {}; }
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::string& path);
  nlohmann::json to_json() const;
};

}  // namespace hpbrdf
