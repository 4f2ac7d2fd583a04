// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <random>

#include "hpbrdf/mlp.hpp"
#include "support.hpp"

using namespace hpbrdf;
using hpbrdf::testing::kPi;

namespace {

using ModelD = MlpModel<double>;

std::array<double, 4> random_input(std::mt19937_64& rng) {
  return {testing::uniform(rng, 414, 894), testing::uniform(rng, 0, 2 * kPi), testing::uniform(rng, 0, kPi / 2),
          testing::uniform(rng, 0, kPi / 2)};
}

HpbrdfTable constant_table(float value) {
  HpbrdfTable t(TableDims{2, 9, 5, 5}, WavelengthGrid{500, 100, 2});
  std::fill(t.data().begin(), t.data().end(), value);
  std::fill(t.mask().begin(), t.mask().end(), std::uint8_t(1));
  return t;
}

}  // namespace

TEST_CASE("architecture arithmetic") {
  const MlpArchitecture def;
  CHECK(def.input_dim() == 28);
  CHECK(def.parameter_count() == 28 * 256 + 256 + 3 * (256 * 256 + 256) + 256 * 16 + 16);
  CHECK(def.parameter_count() == 208912);
  CHECK(serialized_model_bytes(def) == 52 + 4 * 208912);
  CHECK(TableDims::full().payload_bytes() / serialized_model_bytes(def) >= 10000);
  const MlpArchitecture small = MlpArchitecture::parse("2x64");
  CHECK(small.hidden_layers == 2);
  CHECK(small.hidden_width == 64);
  CHECK_THROWS_AS(MlpArchitecture::parse("4by256"), Error);
  CHECK_THROWS_AS(MlpArchitecture::parse("0x16"), Error);
}

TEST_CASE("input encoding maps the table box to [-1, 1]") {
  const MlpArchitecture arch;
  std::vector<double> lo(arch.input_dim()), hi(arch.input_dim());
  encode_input(arch, 414.0, 894.0, 414.0, 0.0, 0.0, 0.0, lo.data());
  encode_input(arch, 414.0, 894.0, 894.0, 2 * kPi, kPi / 2, kPi / 2, hi.data());
  for (int k = 0; k < 4; ++k) {
    CHECK(lo[k] == doctest::Approx(-1.0));
    CHECK(hi[k] == doctest::Approx(1.0));
  }
  for (int k = 4; k < arch.input_dim(); ++k) CHECK(std::abs(lo[k]) <= 1.0);
}

TEST_CASE("zero model outputs zero") {
  const ModelD m(MlpArchitecture{}, 414, 894);
  std::mt19937_64 rng(41);
  const auto y = m.forward(m.encode({random_input(rng), random_input(rng)}));
  CHECK(y.norm() == 0.0);
}

TEST_CASE("closed-form output layer reproduces an affine target") {
  MlpArchitecture arch;
  arch.hidden_layers = 1;
  arch.hidden_width = 32;
  ModelD m = ModelD::initialized(arch, 414, 894, 3);
  std::mt19937_64 rng(42);
  std::vector<std::array<double, 4>> inputs;
  for (int i = 0; i < 200; ++i) inputs.push_back(random_input(rng));
  const auto x = m.encode(inputs);
  ModelD::Cache cache;
  m.forward(x, &cache);
  const Eigen::MatrixXd h = cache.activations[1];
  // Target is affine in the hidden features; least squares recovers it.
  const Eigen::MatrixXd w_true = Eigen::MatrixXd::NullaryExpr(16, 32, [&] { return testing::uniform(rng, -1, 1); });
  const Eigen::VectorXd b_true = Eigen::VectorXd::NullaryExpr(16, [&] { return testing::uniform(rng, -1, 1); });
  const Eigen::MatrixXd target = (w_true * h).colwise() + b_true;
  Eigen::MatrixXd design(h.cols(), 33);
  design << h.transpose(), Eigen::VectorXd::Ones(h.cols());
  const Eigen::MatrixXd sol = design.colPivHouseholderQr().solve(target.transpose());
  m.weight(1) = sol.topRows(32).transpose();
  m.bias(1) = sol.row(32).transpose();
  CHECK((m.forward(x) - target).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("gradient check against central differences") {
  std::mt19937_64 rng(43);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    MlpArchitecture arch;
    arch.hidden_layers = 1 + trial % 3;
    arch.hidden_width = 6;
    arch.encoding_frequencies = trial % 2 ? 2 : 0;
    arch.activation = trial % 2 ? Activation::Silu : Activation::Tanh;
    ModelD m = ModelD::initialized(arch, 414, 894, trial);
    for (double& p : m.parameters()) p += 0.1 * testing::uniform(rng, -1, 1);
    m.set_output_scale(testing::uniform(rng, 0.5, 2.0));
    const auto x = m.encode({random_input(rng), random_input(rng)});
    const Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(16, 2, [&] { return testing::uniform(rng, -1, 1); });
    ModelD::Cache cache;
    m.forward(x, &cache);
    const std::vector<double> grad = m.backward(cache, g);
    const double eps = 1e-4;
    for (int probe = 0; probe < 20; ++probe) {
      const std::size_t i = rng() % m.parameters().size();
      const double saved = m.parameters()[i];
      m.parameters()[i] = saved + eps;
      const double up = (g.array() * m.forward(x).array()).sum();
      m.parameters()[i] = saved - eps;
      const double down = (g.array() * m.forward(x).array()).sum();
      m.parameters()[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      const double err = std::abs(numeric - grad[i]) / std::max(1e-6, std::abs(numeric) + std::abs(grad[i]));
      worst = std::max(worst, err);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("gradient is linear in the output gradient and zero for a constant loss") {
  std::mt19937_64 rng(44);
  MlpArchitecture arch;
  arch.hidden_layers = 2;
  arch.hidden_width = 8;
  const ModelD m = ModelD::initialized(arch, 414, 894, 5);
  const auto x = m.encode({random_input(rng)});
  ModelD::Cache cache;
  m.forward(x, &cache);
  const std::vector<double> zero = m.backward(cache, Eigen::MatrixXd::Zero(16, 1));
  for (double v : zero) CHECK(v == 0.0);
  const Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(16, 1, [&] { return testing::uniform(rng, -1, 1); });
  const std::vector<double> a = m.backward(cache, g);
  const std::vector<double> b = m.backward(cache, 2.5 * g);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(2.5 * a[i]).epsilon(1e-12));
}

TEST_CASE("float and double forward agree") {
  std::mt19937_64 rng(45);
  const auto md = ModelD::initialized(MlpArchitecture{}, 414, 894, 9);
  const MlpModel<float> mf = md.cast<float>();
  const auto in = random_input(rng);
  const auto yd = md.predict(in[0], in[1], in[2], in[3]);
  const auto yf = mf.predict(in[0], in[1], in[2], in[3]);
  CHECK((yd - yf.cast<double>()).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("training on a constant table converges") {
  const HpbrdfTable t = constant_table(0.25f);
  MlpArchitecture arch;
  arch.hidden_layers = 2;
  arch.hidden_width = 16;
  TrainConfig cfg;
  cfg.batch_size = 64;
  cfg.iterations = 1000;
  cfg.step_size = 3e-3;
  const TrainResult r = train(make_model(arch, t, 1), t, cfg);
  REQUIRE(r.loss_history.size() == 1000);
  CHECK(r.loss_history.back() < 1e-8);
  CHECK(evaluate_mse(r.model, t) < 1e-8);
}

TEST_CASE("training from a random output layer reduces the loss") {
  const HpbrdfTable t = constant_table(0.25f);
  MlpArchitecture arch;
  arch.hidden_layers = 2;
  arch.hidden_width = 16;
  auto model = MlpModel<float>::initialized(arch, 500, 600, 1);
  model.set_output_scale(0.25f);
  const double before = evaluate_mse(model, t);
  TrainConfig cfg;
  cfg.batch_size = 64;
  cfg.iterations = 1000;
  cfg.step_size = 1e-2;
  const TrainResult r = train(model, t, cfg);
  CHECK(before > 1e-2);
  CHECK(evaluate_mse(r.model, t) < 1e-4 * before);
}

TEST_CASE("training is deterministic") {
  const HpbrdfTable t = constant_table(0.5f);
  MlpArchitecture arch;
  arch.hidden_layers = 1;
  arch.hidden_width = 8;
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.iterations = 50;
  const TrainResult a = train(make_model(arch, t, 2), t, cfg);
  const TrainResult b = train(make_model(arch, t, 2), t, cfg);
  CHECK(a.loss_history == b.loss_history);
  CHECK(a.model.parameters() == b.model.parameters());
}

TEST_CASE("training errors") {
  const HpbrdfTable empty(TableDims{1, 3, 2, 2}, WavelengthGrid{500, 10, 1});
  MlpArchitecture arch;
  arch.hidden_width = 4;
  CHECK_THROWS_AS(train(MlpModel<float>(arch, 500, 500), empty, TrainConfig{}), Error);
  HpbrdfTable bad = constant_table(1.0f);
  bad.data()[0] = std::nanf("");
  TrainConfig cfg;
  cfg.batch_size = 4096;
  cfg.iterations = 5;
  try {
    train(make_model(arch, constant_table(1.0f), 1), bad, cfg);
    FAIL("expected DivergedLoss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivergedLoss);
  }
}

TEST_CASE("model file round trip") {
  MlpArchitecture arch;
  arch.hidden_layers = 2;
  arch.hidden_width = 12;
  arch.activation = Activation::Silu;
  MlpModel<float> m = MlpModel<float>::initialized(arch, 414, 894, 4);
  m.set_output_scale(0.3f);
  const std::string path = testing::temp_path("model.hpnn");
  write_model(path, m);
  CHECK(std::filesystem::file_size(path) == serialized_model_bytes(arch));
  const MlpModel<float> back = read_model(path);
  CHECK(back.parameters() == m.parameters());
  CHECK(back.output_scale() == 0.3f);
  CHECK(back.architecture().activation == Activation::Silu);
  CHECK(back.lambda_max() == 894.0);
  std::filesystem::resize_file(path, 30);
  CHECK_THROWS_AS(read_model(path), Error);
}
