// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Implicit neural hpBRDF: a fully-connected network mapping
/// (lambda, phi_d, theta_d, theta_h) to the 16 Mueller entries, with
/// hand-written forward and reverse passes.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hpbrdf/random.hpp"
#include "hpbrdf/table.hpp"

namespace hpbrdf {

enum class Activation : std::uint32_t { Tanh = 0, Silu = 1 };

struct MlpArchitecture {
  int hidden_layers = 4;
  int hidden_width = 256;
  Activation activation = Activation::Tanh;
  /// Sinusoidal encoding frequencies per angular input (0 disables it).
  int encoding_frequencies = 4;

  static constexpr int kRawInputs = 4;
  static constexpr int kOutputs = 16;

  /// Parses "4x256" (hidden layers x width).
  static MlpArchitecture parse(const std::string& text);

  int input_dim() const { return kRawInputs + 3 * 2 * encoding_frequencies; }
  int layer_count() const { return hidden_layers + 1; }
  int layer_inputs(int layer) const { return layer == 0 ? input_dim() : hidden_width; }
  int layer_outputs(int layer) const { return layer == hidden_layers ? kOutputs : hidden_width; }
  std::size_t parameter_count() const;
};

/// Maps raw inputs to [-1, 1]: lambda over [lambda_min, lambda_max],
/// phi_d over [0, 2pi], theta over [0, pi/2]; the angular coordinates then
/// get sin/cos(2^k pi u) features.
template <typename Scalar>
void encode_input(const MlpArchitecture& arch, double lambda_min, double lambda_max, double lambda_nm, double phi_d,
                  double theta_d, double theta_h, Scalar* out) {
  const double span = lambda_max > lambda_min ? lambda_max - lambda_min : 1.0;
  const double u[4] = {2.0 * (lambda_nm - lambda_min) / span - 1.0, phi_d / std::numbers::pi - 1.0,
                       theta_d / (std::numbers::pi / 4) - 1.0, theta_h / (std::numbers::pi / 4) - 1.0};
  int k = 0;
  for (double v : u) out[k++] = static_cast<Scalar>(v);
  for (int a = 1; a < 4; ++a) {
    double f = std::numbers::pi;
    for (int q = 0; q < arch.encoding_frequencies; ++q, f *= 2.0) {
      out[k++] = static_cast<Scalar>(std::sin(f * u[a]));
      out[k++] = static_cast<Scalar>(std::cos(f * u[a]));
    }
  }
}

template <typename Scalar>
class MlpModel {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Per-layer pre-activations and activations of one forward pass.
  struct Cache {
    std::vector<Matrix> activations;  // a_0 = input, ..., a_L = output
    std::vector<Matrix> pre;          // z_1..z_L
  };

  MlpModel() = default;
  MlpModel(MlpArchitecture arch, double lambda_min, double lambda_max)
      : arch_(arch), lambda_min_(lambda_min), lambda_max_(lambda_max), params_(arch.parameter_count(), Scalar(0)) {}

  /// Xavier-normal weights, zero biases.
  static MlpModel initialized(MlpArchitecture arch, double lambda_min, double lambda_max, std::uint64_t seed) {
    MlpModel m(arch, lambda_min, lambda_max);
    const CounterNormal normal(seed);
    for (int l = 0; l < arch.layer_count(); ++l) {
      const double scale = std::sqrt(2.0 / (arch.layer_inputs(l) + arch.layer_outputs(l)));
      auto w = m.weight(l);
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i)
          w(i, j) = static_cast<Scalar>(scale * normal({std::uint64_t(l), std::uint64_t(i), std::uint64_t(j)}));
    }
    return m;
  }

  const MlpArchitecture& architecture() const { return arch_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  Scalar output_scale() const { return output_scale_; }
  void set_output_scale(Scalar s) { output_scale_ = s; }

  std::vector<Scalar>& parameters() { return params_; }
  const std::vector<Scalar>& parameters() const { return params_; }

  Eigen::Map<Matrix> weight(int l) { return {params_.data() + offset(l), rows(l), cols(l)}; }
  Eigen::Map<const Matrix> weight(int l) const { return {params_.data() + offset(l), rows(l), cols(l)}; }
  Eigen::Map<Vector> bias(int l) { return {params_.data() + offset(l) + rows(l) * cols(l), rows(l)}; }
  Eigen::Map<const Vector> bias(int l) const { return {params_.data() + offset(l) + rows(l) * cols(l), rows(l)}; }

  /// Encoded inputs, one column per sample.
  Matrix encode(const std::vector<std::array<double, 4>>& inputs) const {
    Matrix x(arch_.input_dim(), static_cast<Eigen::Index>(inputs.size()));
    for (std::size_t c = 0; c < inputs.size(); ++c) {
      const auto& in = inputs[c];
      encode_input(arch_, lambda_min_, lambda_max_, in[0], in[1], in[2], in[3], x.col(Eigen::Index(c)).data());
    }
    return x;
  }

  /// Outputs (16 x batch) for encoded inputs (input_dim x batch).
  Matrix forward(const Matrix& x, Cache* cache = nullptr) const {
    Matrix a = x;
    if (cache) {
      cache->activations.assign(1, x);
      cache->pre.clear();
    }
    for (int l = 0; l < arch_.layer_count(); ++l) {
      Matrix z = weight(l) * a;
      z.colwise() += bias(l);
      const bool hidden = l < arch_.hidden_layers;
      if (cache) cache->pre.push_back(z);
      a = hidden ? activate(z) : Matrix(z * output_scale_);
      if (cache) cache->activations.push_back(a);
    }
    return a;
  }

  Eigen::Matrix<Scalar, 16, 1> predict(double lambda_nm, double phi_d, double theta_d, double theta_h) const {
    Matrix x(arch_.input_dim(), 1);
    encode_input(arch_, lambda_min_, lambda_max_, lambda_nm, phi_d, theta_d, theta_h, x.data());
    return forward(x);
  }

  /// Parameter gradient of sum(output_grad .* output), flat in parameters() order.
  std::vector<Scalar> backward(const Cache& cache, const Matrix& output_grad) const {
    std::vector<Scalar> grad(params_.size(), Scalar(0));
    Matrix delta = output_grad * output_scale_;
    for (int l = arch_.layer_count() - 1; l >= 0; --l) {
      Eigen::Map<Matrix> gw(grad.data() + offset(l), rows(l), cols(l));
      Eigen::Map<Vector> gb(grad.data() + offset(l) + rows(l) * cols(l), rows(l));
      gw.noalias() = delta * cache.activations[l].transpose();
      gb = delta.rowwise().sum();
      if (l > 0) {
        Matrix back = weight(l).transpose() * delta;
        delta = back.cwiseProduct(activate_derivative(cache.pre[l - 1]));
      }
    }
    return grad;
  }

  template <typename Other>
  MlpModel<Other> cast() const {
    MlpModel<Other> m(arch_, lambda_min_, lambda_max_);
    for (std::size_t i = 0; i < params_.size(); ++i) m.parameters()[i] = static_cast<Other>(params_[i]);
    m.set_output_scale(static_cast<Other>(output_scale_));
    return m;
  }

 private:
  Eigen::Index rows(int l) const { return arch_.layer_outputs(l); }
  Eigen::Index cols(int l) const { return arch_.layer_inputs(l); }
  std::size_t offset(int l) const {
    std::size_t o = 0;
    for (int k = 0; k < l; ++k) o += std::size_t(rows(k)) * cols(k) + rows(k);
    return o;
  }

  Matrix activate(const Matrix& z) const {
    if (arch_.activation == Activation::Tanh) return z.array().tanh().matrix();
    return (z.array() / (Scalar(1) + (-z.array()).exp())).matrix();
  }

  Matrix activate_derivative(const Matrix& z) const {
    if (arch_.activation == Activation::Tanh) return (Scalar(1) - z.array().tanh().square()).matrix();
    const auto sig = (Scalar(1) / (Scalar(1) + (-z.array()).exp())).eval();
    return (sig * (Scalar(1) + z.array() * (Scalar(1) - sig))).matrix();
  }

  MlpArchitecture arch_;
  double lambda_min_ = 414.0;
  double lambda_max_ = 950.0;
  Scalar output_scale_ = Scalar(1);
  std::vector<Scalar> params_;
};

struct TrainConfig {
  int batch_size = 4096;
  double step_size = 1e-3;
  int iterations = 200000;
  std::uint64_t seed = 7;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainResult {
  MlpModel<float> model;
  std::vector<double> loss_history;  // batch MSE per step
};

/// Adam on batch MSE over uniformly drawn filled bins. Deterministic for a
/// given seed. Throws EmptyTable or DivergedLoss.
TrainResult train(MlpModel<float> model, const HpbrdfTable& table, const TrainConfig& config);

/// Model with Xavier hidden layers and the output scale set to the RMS of
/// the table. Output weights start at zero and output biases at the
/// per-entry table mean.
MlpModel<float> make_model(const MlpArchitecture& arch, const HpbrdfTable& table, std::uint64_t seed);

/// MSE over all filled bins with phi_d < 2pi.
double evaluate_mse(const MlpModel<float>& model, const HpbrdfTable& table);

/// "HPNN" u32 version, u32 hidden_layers, hidden_width, activation,
/// encoding_frequencies, f64 lambda_min, lambda_max, f32 output_scale,
/// u64 parameter count, f32 parameters.
void write_model(const std::string& path, const MlpModel<float>& model);
MlpModel<float> read_model(const std::string& path);
std::size_t serialized_model_bytes(const MlpArchitecture& arch);

}  // namespace hpbrdf
