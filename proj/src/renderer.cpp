// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include "hpbrdf/renderer.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "hpbrdf/error.hpp"
#include "hpbrdf/mueller.hpp"
#include "hpbrdf/parallel.hpp"
#include "json_util.hpp"

namespace hpbrdf {

Stokesd RenderScene::light_stokes(int band) const {
  const Stokesd lamp(light_radiance(band), 0.0, 0.0, 0.0);
  return light_polarizer_angle ? Stokesd(lp_mueller(*light_polarizer_angle) * lamp) : lamp;
}

RenderScene RenderScene::from_json(const nlohmann::json& j) {
  json_util::reject_unknown(j, {"sphere", "light_arm_angle_deg", "wavelengths", "light_spectrum", "light_polarizer_deg"},
                            "render scene");
  RenderScene s;
  SphereScene base;
  base.camera.width = 256;
  base.camera.height = 256;
  s.sphere = j.contains("sphere") ? SphereScene::from_json(j.at("sphere"), base) : base;
  s.light_arm_angle = radians(j.value("light_arm_angle_deg", 0.0));
  if (j.contains("wavelengths")) {
    const auto& w = j.at("wavelengths");
    json_util::reject_unknown(w, {"start_nm", "step_nm", "count"}, "render scene.wavelengths");
    s.wavelengths = {w.value("start_nm", 414.0), w.value("step_nm", 32.0), w.value("count", 16)};
  }
  if (s.wavelengths.count <= 0 || !(s.wavelengths.step_nm > 0)) {
    throw Error(ErrorCode::InvalidConfig, "render scene: invalid wavelength grid");
  }
  if (j.contains("light_spectrum")) s.light_spectrum = json_util::per_band(j.at("light_spectrum"), s.wavelengths.count);
  if (j.contains("light_polarizer_deg") && !j.at("light_polarizer_deg").is_null()) {
    s.light_polarizer_angle = radians(j.at("light_polarizer_deg").get<double>());
  }
  return s;
}

RenderScene RenderScene::load(const std::string& path) { return from_json(json_util::load_file(path)); }

nlohmann::json RenderScene::to_json() const {
  nlohmann::json j;
  j["sphere"] = sphere.to_json();
  j["light_arm_angle_deg"] = degrees(light_arm_angle);
  j["wavelengths"] = {{"start_nm", wavelengths.start_nm}, {"step_nm", wavelengths.step_nm},
                      {"count", wavelengths.count}};
  if (!light_spectrum.empty()) j["light_spectrum"] = light_spectrum;
  j["light_polarizer_deg"] = light_polarizer_angle ? nlohmann::json(degrees(*light_polarizer_angle)) : nlohmann::json(nullptr);
  return j;
}

Material Material::analytic(const AnalyticPbrdf& pbrdf) {
  Material m;
  m.analytic_ = &pbrdf;
  return m;
}

Material Material::tabulated(const HpbrdfTable& table, LookupMode mode) {
  Material m;
  m.table_ = &table;
  m.mode_ = mode;
  return m;
}

Muellerd Material::eval(const Vec3& omega_i, const Vec3& omega_o, const TangentFrame& frame, double nm) const {
  if (analytic_) return eval_analytic(*analytic_, omega_i, omega_o, frame, nm);
  try {
    return lookup(*table_, nm, omega_i, omega_o, frame, mode_);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnfilledBin) return Muellerd::Zero();
    throw;
  }
}

Stokesd SpectralStokesImage::at(int band, int x, int y) const {
  const double* p = stokes.data() + 4 * slot(band, x, y);
  return {p[0], p[1], p[2], p[3]};
}

std::vector<double> SpectralStokesImage::intensity() const {
  std::vector<double> out(stokes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = stokes[4 * i];
  return out;
}

SpectralStokesImage render_direct(const RenderScene& scene, const Material& material) {
  const SphereScene& sph = scene.sphere;
  SpectralStokesImage img;
  img.width = sph.camera.width;
  img.height = sph.camera.height;
  img.wavelengths = scene.wavelengths;
  const int n_band = scene.wavelengths.count;
  img.stokes.assign(std::size_t(n_band) * img.pixel_count() * 4, 0.0);
  img.hit.assign(img.pixel_count(), 0);
  const bool per_band_geometry = !sph.camera.view_offsets.empty();

  parallel_for(0, img.height, [&](std::int64_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < img.width; ++x) {
      std::optional<PixelGeometry> g;
      for (int b = 0; b < n_band; ++b) {
        if (b == 0 || per_band_geometry) g = sphere_pixel_geometry(sph, x, y, scene.light_arm_angle, b);
        if (!g) continue;
        img.hit[std::size_t(y) * img.width + x] = 1;
        const Muellerd m = material.eval(g->omega_i, g->omega_o, g->tangent, scene.wavelengths.wavelength(b));
        const Stokesd s =
            g->chain.geometry_factor * (g->chain.c_rc * (m * (g->chain.c_ei * scene.light_stokes(b))));
        double* p = img.stokes.data() + 4 * img.slot(b, x, y);
        for (int c = 0; c < 4; ++c) p[c] = s(c);
      }
    }
  });
  return img;
}

MuellerImage render_mueller_image(const RenderScene& scene, const Material& material) {
  const SphereScene& sph = scene.sphere;
  MuellerImage img;
  img.width = sph.camera.width;
  img.height = sph.camera.height;
  img.wavelengths = scene.wavelengths;
  img.arm_angle = scene.light_arm_angle;
  const int n_band = scene.wavelengths.count;
  img.data.assign(std::size_t(n_band) * img.pixel_count() * 16, 0.0f);
  img.valid.assign(std::size_t(n_band) * img.pixel_count(), 0);
  img.physical.assign(img.valid.size(), 0);
  img.residual.assign(img.valid.size(), 0.0f);
  const bool per_band_geometry = !sph.camera.view_offsets.empty();

  parallel_for(0, img.height, [&](std::int64_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < img.width; ++x) {
      std::optional<PixelGeometry> g;
      for (int b = 0; b < n_band; ++b) {
        if (b == 0 || per_band_geometry) g = sphere_pixel_geometry(sph, x, y, scene.light_arm_angle, b);
        if (!g) continue;
        const Muellerd m = material.eval(g->omega_i, g->omega_o, g->tangent, scene.wavelengths.wavelength(b));
        img.set_matrix(b, x, y, m);
        const std::size_t s = img.slot(b, x, y);
        img.valid[s] = 1;
        try {
          img.physical[s] = is_physical_gk(m).physical ? 1 : 0;
        } catch (const Error&) {
          img.physical[s] = 0;
        }
      }
    }
  });
  return img;
}

std::vector<double> apply_polarizer(const SpectralStokesImage& image, double angle) {
  const Stokesd row = lp_mueller(angle).row(0).transpose();
  std::vector<double> out(image.stokes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double* p = image.stokes.data() + 4 * i;
    out[i] = row(0) * p[0] + row(1) * p[1] + row(2) * p[2] + row(3) * p[3];
  }
  return out;
}

namespace {

template <typename F>
std::vector<double> per_pixel(const SpectralStokesImage& image, int band, F&& f) {
  const std::size_t pixels = image.pixel_count();
  std::vector<double> out(pixels, 0.0);
  for (std::size_t p = 0; p < pixels; ++p) {
    Stokesd s = Stokesd::Zero();
    if (band >= 0) {
      s = Eigen::Map<const Stokesd>(image.stokes.data() + 4 * (std::size_t(band) * pixels + p));
    } else {
      for (int b = 0; b < image.wavelengths.count; ++b)
        s += Eigen::Map<const Stokesd>(image.stokes.data() + 4 * (std::size_t(b) * pixels + p));
    }
    out[p] = s(0) > 0 ? f(s) : 0.0;
  }
  return out;
}

}  // namespace

std::vector<double> dop_map(const SpectralStokesImage& image, int band) {
  return per_pixel(image, band, [](const Stokesd& s) { return s.tail<3>().norm() / s(0); });
}

std::vector<double> aolp_map(const SpectralStokesImage& image, int band) {
  return per_pixel(image, band, [](const Stokesd& s) {
    double a = 0.5 * std::atan2(s(2), s(1));
    if (a < 0) a += std::numbers::pi;
    if (a >= std::numbers::pi) a -= std::numbers::pi;
    return a;
  });
}

}  // namespace hpbrdf
