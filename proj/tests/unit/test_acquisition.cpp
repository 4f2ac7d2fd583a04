// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "hpbrdf/acquisition.hpp"
#include "support.hpp"

using namespace hpbrdf;
using hpbrdf::testing::kPi;

namespace {

AcquisitionConfig small_config(int bands = 2) {
  AcquisitionConfig c = AcquisitionConfig::defaults({500.0, 100.0, bands});
  c.light_arm_angles = {radians(60.0)};
  return c;
}

SphereScene small_scene(int size = 16) {
  SphereScene s;
  s.camera.width = size;
  s.camera.height = size;
  return s;
}

}  // namespace

TEST_CASE("default acquisition matches the reference rig") {
  const AcquisitionConfig c = AcquisitionConfig::defaults();
  CHECK(c.illum_qwp_angles.size() == 4);
  CHECK(c.analyzer_qwp_angles.size() == 6);
  CHECK(c.measurements_per_band() == 24);
  CHECK(c.light_arm_angles.size() == 25);
  CHECK(degrees(c.light_arm_angles.front()) == doctest::Approx(40.0));
  CHECK(degrees(c.light_arm_angles.back()) == doctest::Approx(160.0));
  CHECK(degrees(c.illum_qwp_angles[1]) == doctest::Approx(-45.0));
  CHECK(c.wavelengths.count == 68);
  CHECK(c.wavelengths.end_nm() == doctest::Approx(950.0));
}

TEST_CASE("emitted Stokes vector") {
  AcquisitionConfig c = small_config();
  c.light_spectrum = {2.0, 0.0};
  const Stokesd aligned = emitted_stokes(c, 0.0, 0);
  CHECK((aligned - Stokesd(1, 1, 0, 0)).norm() < 1e-15);
  const Stokesd circular = emitted_stokes(c, kPi / 4, 0);
  CHECK(std::abs(circular(3)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(emitted_stokes(c, 0.3, 1).norm() == 0.0);
}

TEST_CASE("simulate_pixel through aligned elements") {
  AcquisitionConfig c = small_config();
  c.light_spectrum = {3.0, 3.0};
  const PixelChain chain;
  CHECK(simulate_pixel(Muellerd::Identity(), chain, c, 0.0, 0.0, 0) == doctest::Approx(1.5).epsilon(1e-14));
  PixelChain scaled;
  scaled.geometry_factor = 0.25;
  CHECK(simulate_pixel(Muellerd::Identity(), scaled, c, 0.0, 0.0, 0) == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(simulate_pixel(Muellerd::Zero(), chain, c, 0.3, 0.9, 0) == 0.0);
}

TEST_CASE("depolarizer response does not depend on the illumination QWP") {
  const AcquisitionConfig c = small_config();
  const Muellerd depol = depolarizer_mueller(1.0);
  for (double tp : c.analyzer_qwp_angles) {
    const double ref = simulate_pixel(depol, {}, c, c.illum_qwp_angles[0], tp, 0);
    for (double t : c.illum_qwp_angles) {
      CHECK(std::abs(simulate_pixel(depol, {}, c, t, tp, 0) - ref) < 1e-12);
    }
  }
}

TEST_CASE("crossed polarizers without retarders block identity") {
  AcquisitionConfig c = small_config();
  c.illum_retardance = {0.0, 0.0};
  c.analyzer_retardance = {0.0, 0.0};
  c.analyzer_polarizer_angle = kPi / 2;
  for (double t : c.illum_qwp_angles)
    for (double tp : c.analyzer_qwp_angles) CHECK(std::abs(simulate_pixel(Muellerd::Identity(), {}, c, t, tp, 0)) < 1e-15);
}

TEST_CASE("physical matrices give non-negative intensities") {
  std::mt19937_64 rng(12);
  const AcquisitionConfig c = small_config();
  for (int i = 0; i < 300; ++i) {
    const Muellerd m = testing::random_physical(rng);
    PixelChain chain;
    chain.c_ei = frame_rotation(testing::uniform(rng, 0, kPi));
    chain.c_rc = frame_rotation(testing::uniform(rng, 0, kPi));
    for (double t : c.illum_qwp_angles)
      for (double tp : c.analyzer_qwp_angles) CHECK(simulate_pixel(m, chain, c, t, tp, 1) >= -1e-12);
  }
}

TEST_CASE("sphere capture shape and linearity") {
  const AnalyticPbrdf mat(SpectralIor(1.5, 0.0), 0.3, 1.0, 0.1);
  AcquisitionConfig c = small_config();
  const SphereScene scene = small_scene();
  const CaptureArchive a = simulate_sphere_capture(mat, scene, c);
  CHECK(a.intensities.size() == std::size_t(1) * 1 * 2 * 24 * 16 * 16);
  CHECK(a.illum_angles.size() * a.analyzer_angles.size() == 24);
  for (float f : a.intensities) CHECK(f >= 0.0f);

  c.light_spectrum = {2.0, 2.0};
  const CaptureArchive b = simulate_sphere_capture(mat, scene, c);
  for (std::size_t i = 0; i < a.intensities.size(); ++i) CHECK(b.intensities[i] == 2.0f * a.intensities[i]);

  const AnalyticPbrdf black(SpectralIor(1.5, 0.0), 0.0, 0.0);
  const CaptureArchive z = simulate_sphere_capture(black, scene, small_config());
  for (float f : z.intensities) CHECK(f == 0.0f);
}

TEST_CASE("highlight is brighter than the diffuse surround") {
  const AnalyticPbrdf mat(SpectralIor(1.5, 0.0), 0.2, 1.0, 0.05);
  AcquisitionConfig c = small_config(1);
  c.light_arm_angles = {0.2};
  const SphereScene scene = small_scene(32);
  const CaptureArchive a = simulate_sphere_capture(mat, scene, c);
  // The mirror normal bisects the camera and light directions.
  const Vec3 h = (Vec3(std::sin(0.2), 0, std::cos(0.2)) + Vec3::UnitZ()).normalized();
  float peak = 0, rim = 0;
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      const auto g = sphere_pixel_geometry(scene, x, y, 0.2);
      if (!g) continue;
      const float f = a.intensities[a.index(0, 0, 0, 0, 0, y, x)];
      if (g->tangent.normal.dot(h) > 0.999) peak = std::max(peak, f);
      if (g->tangent.normal.dot(h) < 0.9) rim = std::max(rim, f);
    }
  }
  CHECK(peak > 2 * rim);
}

TEST_CASE("noise is deterministic per seed") {
  const AnalyticPbrdf mat(SpectralIor(1.5, 0.0), 0.3, 1.0, 0.1);
  AcquisitionConfig c = small_config();
  c.noise_rel = 0.01;
  c.seed = 99;
  const SphereScene scene = small_scene();
  const CaptureArchive a = simulate_sphere_capture(mat, scene, c);
  const CaptureArchive b = simulate_sphere_capture(mat, scene, c);
  CHECK(a.intensities == b.intensities);
  c.seed = 100;
  CHECK(simulate_sphere_capture(mat, scene, c).intensities != a.intensities);
}

TEST_CASE("occlusion masks cover the frame") {
  for (int x = 0; x < 100; ++x) CHECK((occlusion_free(0, x, 100) || occlusion_free(1, x, 100)));
  CHECK_FALSE(occlusion_free(0, 90, 100));
  CHECK_FALSE(occlusion_free(1, 10, 100));
}

TEST_CASE("capture archive round trip") {
  const AnalyticPbrdf mat(SpectralIor(1.5, 0.0), 0.3, 1.0, 0.1);
  AcquisitionConfig c = small_config();
  c.occlusion = true;
  const CaptureArchive a = simulate_sphere_capture(mat, small_scene(), c);
  const std::string path = testing::temp_path("capture.hpma");
  write_archive(path, a);
  const CaptureArchive b = read_archive(path);
  CHECK(b.positions == 2);
  CHECK(b.intensities == a.intensities);
  CHECK(b.masks == a.masks);
  CHECK(b.arm_angles == a.arm_angles);
  CHECK(b.illum_angles == a.illum_angles);
  CHECK(b.wavelengths == a.wavelengths);
}

TEST_CASE("acquisition json") {
  const AcquisitionConfig base = AcquisitionConfig::defaults(WavelengthGrid::desk());
  const auto j = nlohmann::json::parse(R"({"noise_rel": 0.001, "light_arm_angles_deg": [30, 90]})");
  const AcquisitionConfig c = AcquisitionConfig::from_json(j, base);
  CHECK(c.noise_rel == 0.001);
  CHECK(c.light_arm_angles.size() == 2);
  const AcquisitionConfig again = AcquisitionConfig::from_json(c.to_json(), AcquisitionConfig::defaults());
  CHECK(again.wavelengths == c.wavelengths);
  CHECK(again.illum_qwp_angles.size() == 4);
  CHECK_THROWS_AS(AcquisitionConfig::from_json(nlohmann::json::parse(R"({"noise": 1})"), base), Error);
}
