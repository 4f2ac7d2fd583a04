// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "hpbrdf/color.hpp"
#include "hpbrdf/image_io.hpp"
#include "hpbrdf/renderer.hpp"
#include "support.hpp"

using namespace hpbrdf;
using hpbrdf::testing::kPi;

namespace {

RenderScene small_scene(int size = 24) {
  RenderScene s;
  s.sphere.camera.width = size;
  s.sphere.camera.height = size;
  s.wavelengths = {450.0, 100.0, 3};
  s.light_arm_angle = radians(45.0);
  return s;
}

SpectralStokesImage single_pixel(const Stokesd& s) {
  SpectralStokesImage img;
  img.width = img.height = 1;
  img.wavelengths = {500, 10, 1};
  img.stokes = {s(0), s(1), s(2), s(3)};
  img.hit = {1};
  return img;
}

}  // namespace

TEST_CASE("diffuse sphere under unpolarized light stays unpolarized") {
  const AnalyticPbrdf mat(SpectralIor(1.5, 0.0), 0.8, 0.0);
  const SpectralStokesImage img = render_direct(small_scene(), Material::analytic(mat));
  int hits = 0;
  for (std::size_t i = 0; i < img.stokes.size(); i += 4) {
    CHECK(img.stokes[i] >= 0.0);
    CHECK(img.stokes[i + 1] == 0.0);
    CHECK(img.stokes[i + 2] == 0.0);
    CHECK(img.stokes[i + 3] == 0.0);
    hits += img.stokes[i] > 0;
  }
  CHECK(hits > 0);
}

TEST_CASE("rendered Stokes vectors are admissible and linear in the light") {
  const AnalyticPbrdf mat(SpectralIor(0.2, 3.4), 0.2, 1.0, 0.2);
  RenderScene scene = small_scene();
  scene.light_polarizer_angle = 0.3;
  const SpectralStokesImage a = render_direct(scene, Material::analytic(mat));
  for (std::size_t i = 0; i < a.stokes.size(); i += 4) {
    const Stokesd s(a.stokes[i], a.stokes[i + 1], a.stokes[i + 2], a.stokes[i + 3]);
    CHECK(is_admissible(s, 1e-9));
  }
  scene.light_spectrum = {2.0, 2.0, 2.0};
  const SpectralStokesImage b = render_direct(scene, Material::analytic(mat));
  for (std::size_t i = 0; i < a.stokes.size(); ++i) CHECK(b.stokes[i] == doctest::Approx(2.0 * a.stokes[i]));
}

TEST_CASE("polarizer in front of unpolarized and polarized pixels") {
  const SpectralStokesImage unpol = single_pixel({2, 0, 0, 0});
  for (double a : {0.0, 0.5, 2.0}) CHECK(apply_polarizer(unpol, a)[0] == doctest::Approx(1.0));
  const SpectralStokesImage pol = single_pixel({1, 1, 0, 0});
  CHECK(apply_polarizer(pol, 0.0)[0] == doctest::Approx(1.0));
  CHECK(std::abs(apply_polarizer(pol, kPi / 2)[0]) < 1e-16);
}

TEST_CASE("Malus law") {
  const double a0 = 0.37;
  const SpectralStokesImage pol = single_pixel({1, std::cos(2 * a0), std::sin(2 * a0), 0});
  double worst = 0;
  for (int k = 0; k < 180; ++k) {
    const double a = k * kPi / 180;
    const double c = std::cos(a - a0);
    worst = std::max(worst, std::abs(apply_polarizer(pol, a)[0] - c * c));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("dop and aolp maps") {
  SpectralStokesImage img = single_pixel({2, 0, 1, 0});
  CHECK(dop_map(img)[0] == doctest::Approx(0.5));
  CHECK(aolp_map(img)[0] == doctest::Approx(kPi / 4));
  img = single_pixel({1, 0, -1, 0});
  CHECK(aolp_map(img, 0)[0] == doctest::Approx(3 * kPi / 4));
  img = single_pixel({0, 0, 0, 0});
  CHECK(dop_map(img)[0] == 0.0);
}

TEST_CASE("Brewster ring on a smooth dielectric") {
  const AnalyticPbrdf mat(SpectralIor(1.5, 0.0), 0.0, 1.0, 0.05);
  RenderScene scene = small_scene(96);
  scene.wavelengths = {550, 10, 1};
  // Parallax of the near light lifts theta_d at the highlight by ~1.5 deg.
  scene.light_arm_angle = 2 * std::atan(1.5) - radians(3.0);
  const SpectralStokesImage img = render_direct(scene, Material::analytic(mat));
  const std::vector<double> dop = dop_map(img, 0);
  const double tb = std::atan(1.5);
  int ring = 0;
  double peak = 0;
  for (double v : img.intensity()) peak = std::max(peak, v);
  for (int y = 0; y < 96; ++y) {
    for (int x = 0; x < 96; ++x) {
      const auto g = sphere_pixel_geometry(scene.sphere, x, y, scene.light_arm_angle);
      if (!g) continue;
      const Vec3 h = (g->omega_i + g->omega_o).normalized();
      const double td = std::acos(h.dot(g->omega_i));
      if (std::abs(td - tb) > radians(1.0) || img.at(0, x, y)(0) < 1e-3 * peak) continue;
      ++ring;
      CHECK(dop[std::size_t(y) * 96 + x] >= 0.99);
    }
  }
  CHECK(ring > 0);
}

TEST_CASE("Mueller render of an analytic material is physical") {
  const AnalyticPbrdf mat(SpectralIor(1.5, 0.0), 0.3, 1.0, 0.1);
  const MuellerImage img = render_mueller_image(small_scene(), Material::analytic(mat));
  std::size_t valid = 0, physical = 0;
  for (std::size_t i = 0; i < img.valid.size(); ++i) {
    valid += img.valid[i];
    physical += img.physical[i];
  }
  CHECK(valid > 0);
  CHECK(physical == valid);
}

TEST_CASE("tabulated material returns zero outside the data") {
  HpbrdfTable t(TableDims{1, 5, 3, 3}, WavelengthGrid{500, 10, 1});
  const Material m = Material::tabulated(t, LookupMode::Nearest);
  CHECK(m.eval(Vec3::UnitZ(), Vec3::UnitZ(), TangentFrame{}, 500).norm() == 0.0);
}

TEST_CASE("render scene json") {
  const auto j = nlohmann::json::parse(
      R"({"light_arm_angle_deg": 30, "light_polarizer_deg": 45, "wavelengths": {"start_nm": 414, "step_nm": 32, "count": 4},
          "sphere": {"camera": {"width": 8, "height": 8}}})");
  const RenderScene s = RenderScene::from_json(j);
  CHECK(s.light_arm_angle == doctest::Approx(radians(30.0)));
  REQUIRE(s.light_polarizer_angle);
  CHECK(s.light_stokes(0)(2) == doctest::Approx(0.5));
  CHECK(s.sphere.camera.width == 8);
  const RenderScene again = RenderScene::from_json(s.to_json());
  CHECK(again.wavelengths == s.wavelengths);
  CHECK(*again.light_polarizer_angle == doctest::Approx(*s.light_polarizer_angle));
  CHECK_THROWS_AS(RenderScene::from_json(nlohmann::json::parse(R"({"lights": 1})")), Error);
}

TEST_CASE("colour of an equal-energy spectrum is neutral") {
  const WavelengthGrid g = WavelengthGrid::desk();
  const std::vector<double> flat(g.count, 1.0);
  const Vec3 rgb = spectrum_to_linear_rgb(flat, g);
  CHECK(rgb.x() == doctest::Approx(1.0).epsilon(0.02));
  CHECK(rgb.y() == doctest::Approx(1.0).epsilon(0.02));
  CHECK(rgb.z() == doctest::Approx(1.0).epsilon(0.02));
  const Rgb8Image img = to_srgb(flat, 1, 1, g, 2.2, 0.5);
  CHECK(std::abs(int(img.rgb[0]) - int(img.rgb[1])) <= 1);
  CHECK(std::abs(int(img.rgb[1]) - int(img.rgb[2])) <= 1);
}

TEST_CASE("colour of zero and 550 nm") {
  const WavelengthGrid g = WavelengthGrid::desk();
  const std::vector<double> zero(g.count, 0.0);
  const Rgb8Image black = to_srgb(zero, 1, 1, g);
  CHECK(black.rgb == std::vector<std::uint8_t>{0, 0, 0});

  const WavelengthGrid green{550.0, 10.0, 1};
  const Vec3 rgb = spectrum_to_linear_rgb(std::vector<double>{1.0}, green);
  CHECK(rgb.y() > rgb.x());
  CHECK(rgb.y() > rgb.z());
  CHECK(cie1931_xyz(555).y() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(cie1931_xyz(900).norm() == 0.0);
}

TEST_CASE("colour without visible bands") {
  const WavelengthGrid nir{750.0, 50.0, 3};
  const std::vector<double> v(3, 1.0);
  CHECK_THROWS_AS(to_srgb(v, 1, 1, nir), Error);
  const std::vector<double> ch = nir_channel(v, 1, 1, nir);
  REQUIRE(ch.size() == 1);
  CHECK(ch[0] == 1.0);
  CHECK(nir_channel(v, 1, 1, {400.0, 10.0, 3}).empty());
}

TEST_CASE("PFM round trip") {
  FloatImage img;
  img.width = 3;
  img.height = 2;
  img.channels = 3;
  for (int i = 0; i < 18; ++i) img.pixels.push_back(0.5f * i - 3.0f);
  const std::string path = testing::temp_path("img.pfm");
  write_pfm(path, img);
  const FloatImage back = read_pfm(path);
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.channels == 3);
  CHECK(back.pixels == img.pixels);
  img.channels = 1;
  img.pixels.resize(6);
  write_pfm(path, img);
  CHECK(read_pfm(path).pixels == img.pixels);
}

TEST_CASE("PNG output") {
  const std::string path = testing::temp_path("img.png");
  const std::vector<std::uint8_t> gray = to_gray8(std::vector<double>{0.0, 0.5, 1.0, std::nan("")}, 0.0, 1.0);
  CHECK(gray == std::vector<std::uint8_t>{0, 128, 255, 0});
  write_png(path, 2, 2, 1, gray);
  std::ifstream in(path, std::ios::binary);
  char sig[8];
  in.read(sig, 8);
  CHECK(std::string(sig + 1, 3) == "PNG");
}
