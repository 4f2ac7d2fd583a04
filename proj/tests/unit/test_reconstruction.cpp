// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <vector>

#include "hpbrdf/reconstruction.hpp"
#include "support.hpp"

using namespace hpbrdf;
using hpbrdf::testing::kPi;

namespace {

std::vector<double> measure(const Muellerd& m, const AcquisitionConfig& c, int band, const PixelChain& chain = {}) {
  std::vector<double> f;
  for (double t : c.illum_qwp_angles)
    for (double tp : c.analyzer_qwp_angles) f.push_back(simulate_pixel(m, chain, c, t, tp, band));
  return f;
}

}  // namespace

TEST_CASE("default design matrix rank and conditioning") {
  const AcquisitionConfig c = AcquisitionConfig::defaults();
  const DesignMatrix d = build_design_matrix(c, 0);
  CHECK(d.rows.rows() == 24);
  CHECK(d.rows.cols() == 16);
  CHECK(d.rank == 16);
  // tests/oracles/drr_design.py
  CHECK(d.conditioning() == doctest::Approx(0.07632976988106291).epsilon(1e-10));
}

TEST_CASE("design rows reproduce simulate_pixel") {
  const AcquisitionConfig c = AcquisitionConfig::defaults(WavelengthGrid::desk());
  std::mt19937_64 rng(13);
  PixelChain chain;
  chain.c_ei = frame_rotation(0.4);
  chain.c_rc = frame_rotation(-1.1);
  chain.geometry_factor = 0.7;
  const DesignMatrix d = build_design_matrix(c, 3, chain);
  for (const Muellerd& m : {Muellerd(Muellerd::Identity()), testing::random_physical(rng)}) {
    const std::vector<double> f = measure(m, c, 3, chain);
    Eigen::Matrix<double, 16, 1> v;
    for (int e = 0; e < 16; ++e) v(e) = m(e / 4, e % 4);
    const Eigen::VectorXd pred = d.rows * v;
    for (int k = 0; k < 24; ++k) CHECK(std::abs(pred(k) - f[k]) < 1e-12);
  }
}

TEST_CASE("truncated analyzer set is rank deficient") {
  AcquisitionConfig c = AcquisitionConfig::defaults();
  c.analyzer_qwp_angles = {0.0};
  CHECK_THROWS_AS(build_design_matrix(c, 0), Error);
  c.illum_qwp_angles = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6};
  const DesignMatrix d = build_design_matrix(c, 0);
  CHECK(d.rank == 4);
  CHECK_THROWS_AS(solve_mueller(std::vector<double>(16, 1.0), d), Error);
  try {
    solve_mueller(std::vector<double>(16, 1.0), d);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("noiseless identity recovery") {
  const AcquisitionConfig c = AcquisitionConfig::defaults();
  const DesignMatrix d = build_design_matrix(c, 10);
  const MuellerSolution s = solve_mueller(measure(Muellerd::Identity(), c, 10), d);
  CHECK((s.m - Muellerd::Identity()).norm() < 1e-9);
  CHECK(s.rms_residual < 1e-10);
}

TEST_CASE("noiseless random physical recovery") {
  const AcquisitionConfig c = AcquisitionConfig::defaults(WavelengthGrid::desk());
  std::mt19937_64 rng(14);
  PixelChain chain;
  chain.c_ei = frame_rotation(0.2);
  chain.c_rc = frame_rotation(0.9);
  const DesignMatrix d = build_design_matrix(c, 5, chain);
  for (int i = 0; i < 500; ++i) {
    const Muellerd m = testing::random_physical(rng);
    const MuellerSolution s = solve_mueller(measure(m, c, 5, chain), d);
    CHECK((s.m - m).norm() / m.norm() < 1e-8);
  }
}

TEST_CASE("zero measurements and linearity") {
  const AcquisitionConfig c = AcquisitionConfig::defaults();
  const DesignMatrix d = build_design_matrix(c, 0);
  const MuellerSolution z = solve_mueller(std::vector<double>(24, 0.0), d);
  CHECK(z.m.norm() == 0.0);
  CHECK(z.rms_residual == 0.0);

  std::mt19937_64 rng(15);
  std::vector<double> f(24);
  for (double& v : f) v = testing::uniform(rng, 0, 1);
  const MuellerSolution a = solve_mueller(f, d);
  for (double& v : f) v *= 3.0;
  const MuellerSolution b = solve_mueller(f, d);
  CHECK((b.m - 3.0 * a.m).norm() < 1e-12 * b.m.norm());
}

TEST_CASE("solve rejects bad input") {
  const DesignMatrix d = build_design_matrix(AcquisitionConfig::defaults(), 0);
  std::vector<double> f(24, 0.1);
  f[3] = std::nan("");
  CHECK_THROWS_AS(solve_mueller(f, d), Error);
  CHECK_THROWS_AS(solve_mueller(std::vector<double>(23, 0.0), d), Error);
}

TEST_CASE("light scale cancels between simulation and design") {
  AcquisitionConfig c = AcquisitionConfig::defaults(WavelengthGrid::desk());
  std::mt19937_64 rng(16);
  const Muellerd m = testing::random_physical(rng);
  const Muellerd a = solve_mueller(measure(m, c, 2), build_design_matrix(c, 2)).m;
  for (double& l : c.light_spectrum) l = 7.5;
  const Muellerd b = solve_mueller(measure(m, c, 2), build_design_matrix(c, 2)).m;
  CHECK((a - b).norm() < 1e-10);
}

TEST_CASE("sphere reconstruction closed loop") {
  const AnalyticPbrdf mat(SpectralIor(1.5, 0.0), 0.5, 1.0, 0.1);
  AcquisitionConfig c = AcquisitionConfig::defaults({450.0, 100.0, 3});
  c.light_arm_angles = {radians(50.0), radians(120.0)};
  c.occlusion = true;
  SphereScene scene;
  scene.camera.width = 32;
  scene.camera.height = 32;
  const CaptureArchive ar = simulate_sphere_capture(mat, scene, c);
  const ReconstructionResult r = reconstruct_image(ar, scene, c);
  REQUIRE(r.images.size() == 2);
  CHECK(r.stats.solved > 0);
  CHECK(r.stats.physical_fraction() >= 0.999);
  double worst = 0;
  for (std::size_t arm = 0; arm < 2; ++arm) {
    const MuellerImage& img = r.images[arm];
    for (int b = 0; b < 3; ++b) {
      for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
          const auto g = sphere_pixel_geometry(scene, x, y, c.light_arm_angles[arm], b);
          CHECK(bool(img.valid[img.slot(b, x, y)]) == g.has_value());
          if (!g) continue;
          const Muellerd truth = eval_analytic(mat, g->omega_i, g->omega_o, g->tangent, c.wavelengths.wavelength(b));
          worst = std::max(worst, (img.matrix(b, x, y) - truth).norm() / truth(0, 0));
        }
      }
    }
  }
  // float32 archive precision bounds the closed loop.
  CHECK(worst < 1e-5);
}

TEST_CASE("fully occluded pixel is invalid") {
  const AnalyticPbrdf mat(SpectralIor(1.5, 0.0), 0.5, 1.0, 0.1);
  AcquisitionConfig c = AcquisitionConfig::defaults({500.0, 100.0, 1});
  c.light_arm_angles = {radians(40.0)};
  c.occlusion = true;
  SphereScene scene;
  scene.camera.width = 16;
  scene.camera.height = 16;
  CaptureArchive ar = simulate_sphere_capture(mat, scene, c);
  ar.masks[8 * 16 + 8] = 0;
  ar.masks[ar.pixel_count() + 8 * 16 + 8] = 0;
  const ReconstructionResult r = reconstruct_image(ar, scene, c);
  CHECK_FALSE(r.images[0].valid[r.images[0].slot(0, 8, 8)]);
  CHECK(r.images[0].valid[r.images[0].slot(0, 7, 8)]);
}

TEST_CASE("Mueller image round trip") {
  MuellerImage img;
  img.width = 3;
  img.height = 2;
  img.wavelengths = {500.0, 10.0, 2};
  img.arm_angle = 0.7;
  img.data.resize(2 * 6 * 16);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = 0.25f * float(i);
  img.valid = {1, 0, 1, 1, 0, 1, 1, 1, 1, 0, 0, 1};
  img.physical = {1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1};
  const std::string path = testing::temp_path("image.hpmi");
  write_mueller_image(path, img);
  const MuellerImage back = read_mueller_image(path);
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.arm_angle == 0.7);
  CHECK(back.wavelengths == img.wavelengths);
  CHECK(back.data == img.data);
  CHECK(back.valid == img.valid);
  CHECK(back.physical == img.physical);
}
