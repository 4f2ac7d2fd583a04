// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include "hpbrdf/config.hpp"

#include <nlohmann/json.hpp>

#include "hpbrdf/error.hpp"
#include "json_util.hpp"

namespace hpbrdf {

namespace {

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "silu") return Activation::Silu;
  throw Error(ErrorCode::InvalidConfig, "train: unknown activation '" + name + "'");
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  using json_util::reject_unknown;
  reject_unknown(j, {"paths", "acquisition", "scene", "table", "inpaint", "render", "train"}, "config");
  PipelineConfig c;
  try {
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      reject_unknown(p, {"material", "output_dir"}, "config.paths");
      c.material_path = p.value("material", c.material_path);
      c.output_dir = p.value("output_dir", c.output_dir);
    }
    if (j.contains("acquisition")) c.acquisition = AcquisitionConfig::from_json(j.at("acquisition"), c.acquisition);
    if (j.contains("scene")) c.scene = SphereScene::from_json(j.at("scene"), c.scene);
    if (j.contains("table")) {
      const auto& t = j.at("table");
      reject_unknown(t, {"bins"}, "config.table");
      if (t.contains("bins")) c.table = TableDims::parse(t.at("bins").get<std::string>());
    }
    if (j.contains("inpaint")) {
      const auto& p = j.at("inpaint");
      reject_unknown(p, {"sigma"}, "config.inpaint");
      if (p.contains("sigma")) {
        const auto s = p.at("sigma").get<std::vector<double>>();
        if (s.size() != 3) throw Error(ErrorCode::InvalidConfig, "config.inpaint.sigma needs three values");
        c.inpaint_sigma = {s[0], s[1], s[2]};
      }
    }
    if (j.contains("render")) c.render = RenderScene::from_json(j.at("render"));
    if (j.contains("train")) {
      const auto& t = j.at("train");
      reject_unknown(t,
                     {"layers", "activation", "encoding_frequencies", "batch_size", "step_size", "iterations", "seed"},
                     "config.train");
      if (t.contains("layers")) {
        const auto a = MlpArchitecture::parse(t.at("layers").get<std::string>());
        c.architecture.hidden_layers = a.hidden_layers;
        c.architecture.hidden_width = a.hidden_width;
      }
      if (t.contains("activation")) c.architecture.activation = parse_activation(t.at("activation").get<std::string>());
      c.architecture.encoding_frequencies = t.value("encoding_frequencies", c.architecture.encoding_frequencies);
      c.train.batch_size = t.value("batch_size", c.train.batch_size);
      c.train.step_size = t.value("step_size", c.train.step_size);
      c.train.iterations = t.value("iterations", c.train.iterations);
      c.train.seed = t.value("seed", c.train.seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  if (c.table.n_lambda != c.acquisition.wavelengths.count) {
    throw Error(ErrorCode::InvalidConfig, "config: table.bins wavelength count differs from the acquisition grid");
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) { return from_json(json_util::load_file(path)); }

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j;
  j["paths"] = {{"material", material_path}, {"output_dir", output_dir}};
  j["acquisition"] = acquisition.to_json();
  j["scene"] = scene.to_json();
  j["table"] = {{"bins", table.to_string()}};
  j["inpaint"] = {{"sigma", {inpaint_sigma[0], inpaint_sigma[1], inpaint_sigma[2]}}};
  j["render"] = render.to_json();
  j["train"] = {{"layers", std::to_string(architecture.hidden_layers) + "x" + std::to_string(architecture.hidden_width)},
                {"activation", architecture.activation == Activation::Tanh ? "tanh" : "silu"},
                {"encoding_frequencies", architecture.encoding_frequencies},
                {"batch_size", train.batch_size},
                {"step_size", train.step_size},
                {"iterations", train.iterations},
                {"seed", train.seed}};
  return j;
}

}  // namespace hpbrdf
