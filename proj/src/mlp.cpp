// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include "hpbrdf/mlp.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "hpbrdf/binary_io.hpp"
#include "hpbrdf/error.hpp"

namespace hpbrdf {

namespace {

constexpr std::uint32_t kModelVersion = 1;
constexpr std::size_t kModelHeaderBytes = 4 + 4 + 4 * 4 + 8 + 8 + 4 + 8;

struct Sample {
  std::array<double, 4> input;
  std::size_t bin;
};

std::vector<Sample> training_samples(const HpbrdfTable& t) {
  const TableDims& d = t.dims();
  std::vector<Sample> out;
  for (int b = 0; b < d.n_lambda; ++b)
    for (int p = 0; p < d.n_phi_d - 1; ++p)
      for (int a = 0; a < d.n_theta_d; ++a)
        for (int h = 0; h < d.n_theta_h; ++h) {
          const std::size_t bin = t.bin(b, p, a, h);
          if (!t.mask()[bin]) continue;
          out.push_back({{t.wavelengths().wavelength(b), t.phi_d_at(p), t.theta_d_at(a), t.theta_h_at(h)}, bin});
        }
  if (out.empty()) throw Error(ErrorCode::EmptyTable, "table has no filled bins to train on");
  return out;
}

}  // namespace

MlpArchitecture MlpArchitecture::parse(const std::string& text) {
  MlpArchitecture a;
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    a.hidden_layers = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    a.hidden_width = std::stoi(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "bad layer spec '" + text + "', expected e.g. 4x256");
  }
  if (a.hidden_layers < 1 || a.hidden_width < 1) throw Error(ErrorCode::InvalidConfig, "layer spec must be positive");
  return a;
}

std::size_t MlpArchitecture::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < layer_count(); ++l) n += std::size_t(layer_outputs(l)) * layer_inputs(l) + layer_outputs(l);
  return n;
}

MlpModel<float> make_model(const MlpArchitecture& arch, const HpbrdfTable& table, std::uint64_t seed) {
  const WavelengthGrid& g = table.wavelengths();
  auto model = MlpModel<float>::initialized(arch, g.start_nm, g.end_nm(), seed);
  double sum = 0.0;
  std::size_t n = 0;
  Eigen::Matrix<double, 16, 1> mean = Eigen::Matrix<double, 16, 1>::Zero();
  for (std::size_t bin = 0; bin < table.mask().size(); ++bin) {
    if (!table.mask()[bin]) continue;
    for (int e = 0; e < 16; ++e) {
      const double v = table.data()[16 * bin + e];
      sum += v * v;
      mean(e) += v;
    }
    n += 16;
  }
  const double rms = n ? std::sqrt(sum / double(n)) : 1.0;
  const double scale = rms > 0 ? rms : 1.0;
  model.set_output_scale(static_cast<float>(scale));
  // The model starts at the per-entry table mean.
  model.weight(arch.hidden_layers).setZero();
  if (n) model.bias(arch.hidden_layers) = (mean * (16.0 / double(n)) / scale).cast<float>();
  return model;
}

TrainResult train(MlpModel<float> model, const HpbrdfTable& table, const TrainConfig& cfg) {
  if (cfg.batch_size < 1 || cfg.iterations < 0 || !(cfg.step_size > 0)) {
    throw Error(ErrorCode::InvalidConfig, "train: batch size, iterations and step size must be positive");
  }
  const std::vector<Sample> samples = training_samples(table);
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n_params = model.parameters().size();
  std::vector<double> m1(n_params, 0.0);
  std::vector<double> m2(n_params, 0.0);
  TrainResult result;
  result.loss_history.reserve(cfg.iterations);

  using Matrix = MlpModel<float>::Matrix;
  std::vector<std::array<double, 4>> inputs(cfg.batch_size);
  Matrix target(16, cfg.batch_size);
  MlpModel<float>::Cache cache;
  double b1t = 1.0;
  double b2t = 1.0;
  for (int step = 0; step < cfg.iterations; ++step) {
    for (int c = 0; c < cfg.batch_size; ++c) {
      const Sample& s = samples[rng() % samples.size()];
      inputs[c] = s.input;
      for (int e = 0; e < 16; ++e) target(e, c) = table.data()[16 * s.bin + e];
    }
    const Matrix y = model.forward(model.encode(inputs), &cache);
    const Matrix diff = y - target;
    const double loss = double(diff.squaredNorm()) / double(diff.size());
    if (!std::isfinite(loss)) throw Error(ErrorCode::DivergedLoss, "loss became non-finite at step " + std::to_string(step));
    result.loss_history.push_back(loss);

    const Matrix grad_out = diff * (2.0f / float(diff.size()));
    const std::vector<float> grad = model.backward(cache, grad_out);
    b1t *= cfg.beta1;
    b2t *= cfg.beta2;
    auto& p = model.parameters();
    for (std::size_t i = 0; i < n_params; ++i) {
      const double g = grad[i];
      m1[i] = cfg.beta1 * m1[i] + (1 - cfg.beta1) * g;
      m2[i] = cfg.beta2 * m2[i] + (1 - cfg.beta2) * g * g;
      const double mh = m1[i] / (1 - b1t);
      const double vh = m2[i] / (1 - b2t);
      p[i] -= static_cast<float>(cfg.step_size * mh / (std::sqrt(vh) + cfg.epsilon));
    }
  }
  result.model = std::move(model);
  return result;
}

double evaluate_mse(const MlpModel<float>& model, const HpbrdfTable& table) {
  const std::vector<Sample> samples = training_samples(table);
  constexpr std::size_t kChunk = 4096;
  double sum = 0.0;
  std::vector<std::array<double, 4>> inputs;
  for (std::size_t start = 0; start < samples.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, samples.size() - start);
    inputs.resize(n);
    for (std::size_t c = 0; c < n; ++c) inputs[c] = samples[start + c].input;
    const auto y = model.forward(model.encode(inputs));
    for (std::size_t c = 0; c < n; ++c)
      for (int e = 0; e < 16; ++e) {
        const double d = double(y(e, Eigen::Index(c))) - table.data()[16 * samples[start + c].bin + e];
        sum += d * d;
      }
  }
  return sum / double(samples.size() * 16);
}

std::size_t serialized_model_bytes(const MlpArchitecture& arch) {
  return kModelHeaderBytes + arch.parameter_count() * sizeof(float);
}

void write_model(const std::string& path, const MlpModel<float>& model) {
  const MlpArchitecture& a = model.architecture();
  BinaryWriter w(path);
  w.magic("HPNN");
  w.put<std::uint32_t>(kModelVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(a.hidden_layers));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(a.hidden_width));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(a.activation));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(a.encoding_frequencies));
  w.put<double>(model.lambda_min());
  w.put<double>(model.lambda_max());
  w.put<float>(model.output_scale());
  w.put<std::uint64_t>(model.parameters().size());
  w.put_array<float>(model.parameters());
  w.finish();
}

MlpModel<float> read_model(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic("HPNN");
  if (r.get<std::uint32_t>() != kModelVersion) throw Error(ErrorCode::DimMismatch, path + ": unsupported version");
  MlpArchitecture a;
  a.hidden_layers = static_cast<int>(r.get<std::uint32_t>());
  a.hidden_width = static_cast<int>(r.get<std::uint32_t>());
  const auto act = r.get<std::uint32_t>();
  if (act > 1) throw Error(ErrorCode::DimMismatch, path + ": unknown activation");
  a.activation = static_cast<Activation>(act);
  a.encoding_frequencies = static_cast<int>(r.get<std::uint32_t>());
  const double lo = r.get<double>();
  const double hi = r.get<double>();
  MlpModel<float> m(a, lo, hi);
  m.set_output_scale(r.get<float>());
  if (r.get<std::uint64_t>() != a.parameter_count()) {
    throw Error(ErrorCode::DimMismatch, path + ": parameter count does not match the architecture");
  }
  r.get_array<float>(m.parameters());
  return m;
}

}  // namespace hpbrdf
