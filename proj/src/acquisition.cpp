// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include "hpbrdf/acquisition.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "hpbrdf/error.hpp"
#include "hpbrdf/mueller.hpp"
#include "hpbrdf/parallel.hpp"
#include "hpbrdf/random.hpp"
#include "json_util.hpp"

namespace hpbrdf {

double degrees(double rad) { return rad * 180.0 / std::numbers::pi; }
double radians(double deg) { return deg * std::numbers::pi / 180.0; }

AcquisitionConfig AcquisitionConfig::defaults(WavelengthGrid grid) {
  AcquisitionConfig c;
  for (double a : {30.0, -45.0, 60.0, -90.0}) c.illum_qwp_angles.push_back(radians(a));
  for (double a : {0.0, 30.0, 60.0, 90.0, 120.0, 150.0}) c.analyzer_qwp_angles.push_back(radians(a));
  for (int k = 0; k < 25; ++k) c.light_arm_angles.push_back(radians(40.0 + 5.0 * k));
  c.wavelengths = grid;
  c.illum_retardance.assign(grid.count, std::numbers::pi / 2);
  c.analyzer_retardance.assign(grid.count, std::numbers::pi / 2);
  c.light_spectrum.assign(grid.count, 1.0);
  return c;
}

void AcquisitionConfig::validate() const {
  const auto n = static_cast<std::size_t>(wavelengths.count);
  if (wavelengths.count <= 0 || !(wavelengths.step_nm > 0)) {
    throw Error(ErrorCode::InvalidConfig, "acquisition: invalid wavelength grid");
  }
  if (illum_retardance.size() != n || analyzer_retardance.size() != n || light_spectrum.size() != n) {
    throw Error(ErrorCode::InvalidConfig, "acquisition: per-band arrays must match the wavelength grid");
  }
  if (illum_qwp_angles.empty() || analyzer_qwp_angles.empty()) {
    throw Error(ErrorCode::InvalidConfig, "acquisition: empty QWP angle set");
  }
  if (!(noise_rel >= 0)) throw Error(ErrorCode::InvalidConfig, "acquisition: noise_rel < 0");
}

using json_util::per_band;
using json_util::reject_unknown;
using json_util::vec3;

namespace {

std::vector<double> degree_list(const nlohmann::json& j) {
  std::vector<double> out;
  for (double d : j.get<std::vector<double>>()) out.push_back(radians(d));
  return out;
}

std::vector<double> degree_values(const std::vector<double>& rad) {
  std::vector<double> out;
  for (double r : rad) out.push_back(degrees(r));
  return out;
}

}  // namespace

AcquisitionConfig AcquisitionConfig::from_json(const nlohmann::json& j, const AcquisitionConfig& base) {
  reject_unknown(j,
                 {"illum_qwp_angles_deg", "analyzer_qwp_angles_deg", "light_arm_angles_deg", "wavelengths",
                  "illum_retardance_deg", "analyzer_retardance_deg", "light_spectrum", "illum_polarizer_deg",
                  "analyzer_polarizer_deg", "noise_rel", "seed", "occlusion"},
                 "acquisition");
  AcquisitionConfig c = base;
  if (j.contains("wavelengths")) {
    const auto& w = j.at("wavelengths");
    c.wavelengths = {w.value("start_nm", 414.0), w.value("step_nm", 8.0), w.value("count", 68)};
    const auto d = defaults(c.wavelengths);
    c.illum_retardance = d.illum_retardance;
    c.analyzer_retardance = d.analyzer_retardance;
    c.light_spectrum = d.light_spectrum;
  }
  if (j.contains("illum_qwp_angles_deg")) c.illum_qwp_angles = degree_list(j.at("illum_qwp_angles_deg"));
  if (j.contains("analyzer_qwp_angles_deg")) c.analyzer_qwp_angles = degree_list(j.at("analyzer_qwp_angles_deg"));
  if (j.contains("light_arm_angles_deg")) c.light_arm_angles = degree_list(j.at("light_arm_angles_deg"));
  const int n = c.wavelengths.count;
  const auto deg_per_band = [&](const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    out = per_band(j.at(key), n);
    for (double& v : out) v = radians(v);
  };
  deg_per_band("illum_retardance_deg", c.illum_retardance);
  deg_per_band("analyzer_retardance_deg", c.analyzer_retardance);
  if (j.contains("light_spectrum")) c.light_spectrum = per_band(j.at("light_spectrum"), n);
  if (j.contains("illum_polarizer_deg")) c.illum_polarizer_angle = radians(j.at("illum_polarizer_deg").get<double>());
  if (j.contains("analyzer_polarizer_deg")) {
    c.analyzer_polarizer_angle = radians(j.at("analyzer_polarizer_deg").get<double>());
  }
  c.noise_rel = j.value("noise_rel", c.noise_rel);
  c.seed = j.value("seed", c.seed);
  c.occlusion = j.value("occlusion", c.occlusion);
  c.validate();
  return c;
}

nlohmann::json AcquisitionConfig::to_json() const {
  nlohmann::json j;
  j["illum_qwp_angles_deg"] = degree_values(illum_qwp_angles);
  j["analyzer_qwp_angles_deg"] = degree_values(analyzer_qwp_angles);
  j["light_arm_angles_deg"] = degree_values(light_arm_angles);
  j["wavelengths"] = {{"start_nm", wavelengths.start_nm}, {"step_nm", wavelengths.step_nm},
                      {"count", wavelengths.count}};
  j["illum_retardance_deg"] = degree_values(illum_retardance);
  j["analyzer_retardance_deg"] = degree_values(analyzer_retardance);
  j["light_spectrum"] = light_spectrum;
  j["illum_polarizer_deg"] = degrees(illum_polarizer_angle);
  j["analyzer_polarizer_deg"] = degrees(analyzer_polarizer_angle);
  j["noise_rel"] = noise_rel;
  j["seed"] = seed;
  j["occlusion"] = occlusion;
  return j;
}

SphereScene SphereScene::from_json(const nlohmann::json& j, const SphereScene& base) {
  reject_unknown(j,
                 {"center", "radius", "camera", "light_distance", "light_x_reference", "inverse_square",
                  "cosine_foreshortening"},
                 "scene");
  SphereScene s = base;
  if (j.contains("center")) s.center = vec3(j.at("center"));
  s.radius = j.value("radius", s.radius);
  s.light_distance = j.value("light_distance", s.light_distance);
  if (j.contains("light_x_reference")) s.light_x_reference = vec3(j.at("light_x_reference"));
  s.inverse_square = j.value("inverse_square", s.inverse_square);
  s.cosine_foreshortening = j.value("cosine_foreshortening", s.cosine_foreshortening);
  if (j.contains("camera")) {
    const auto& c = j.at("camera");
    reject_unknown(c, {"width", "height", "distance", "fov_deg", "view_offsets", "right"}, "scene.camera");
    s.camera.width = c.value("width", s.camera.width);
    s.camera.height = c.value("height", s.camera.height);
    s.camera.distance = c.value("distance", s.camera.distance);
    if (c.contains("fov_deg")) s.camera.fov = radians(c.at("fov_deg").get<double>());
    if (c.contains("right")) s.camera.right = vec3(c.at("right"));
    if (c.contains("view_offsets")) {
      s.camera.view_offsets.clear();
      for (const auto& v : c.at("view_offsets")) s.camera.view_offsets.push_back(vec3(v));
    }
  }
  if (!(s.radius > 0) || !(s.camera.distance > s.radius) || !(s.light_distance > s.radius) ||
      s.camera.width <= 0 || s.camera.height <= 0) {
    throw Error(ErrorCode::InvalidConfig, "scene: sphere must be in front of camera and light");
  }
  return s;
}

nlohmann::json SphereScene::to_json() const {
  nlohmann::json j;
  j["center"] = {center.x(), center.y(), center.z()};
  j["radius"] = radius;
  j["light_distance"] = light_distance;
  j["light_x_reference"] = {light_x_reference.x(), light_x_reference.y(), light_x_reference.z()};
  j["inverse_square"] = inverse_square;
  j["cosine_foreshortening"] = cosine_foreshortening;
  nlohmann::json c;
  c["width"] = camera.width;
  c["height"] = camera.height;
  c["distance"] = camera.distance;
  c["fov_deg"] = degrees(camera.fov);
  c["right"] = {camera.right.x(), camera.right.y(), camera.right.z()};
  c["view_offsets"] = nlohmann::json::array();
  for (const auto& v : camera.view_offsets) c["view_offsets"].push_back({v.x(), v.y(), v.z()});
  j["camera"] = c;
  return j;
}

Vec3 light_position(const SphereScene& scene, double arm_angle) {
  return scene.center + scene.light_distance * Vec3(std::sin(arm_angle), 0.0, std::cos(arm_angle));
}

Vec3 camera_position(const SphereScene& scene, int band) {
  Vec3 p = scene.center + Vec3(0.0, 0.0, scene.camera.distance);
  if (band >= 0 && band < static_cast<int>(scene.camera.view_offsets.size())) p += scene.camera.view_offsets[band];
  return p;
}

std::optional<PixelGeometry> sphere_pixel_geometry(const SphereScene& scene, int x, int y, double arm_angle,
                                                   int band) {
  const CameraModel& cam = scene.camera;
  const Vec3 eye = camera_position(scene, band);
  const Vec3 forward = (scene.center - eye).normalized();
  const Vec3 right = (cam.right - cam.right.dot(forward) * forward).normalized();
  const Vec3 up = right.cross(forward);
  const double fov = cam.fov > 0 ? cam.fov : 2.0 * std::asin(scene.radius / cam.distance) * 1.08;
  const double half = std::tan(0.5 * fov);
  const double aspect = double(cam.width) / cam.height;
  const double u = ((x + 0.5) / cam.width * 2.0 - 1.0) * half * aspect;
  const double v = (1.0 - (y + 0.5) / cam.height * 2.0) * half;
  const Vec3 dir = (forward + u * right + v * up).normalized();

  // Ray-sphere intersection, nearest hit.
  const Vec3 oc = eye - scene.center;
  const double b = oc.dot(dir);
  const double c = oc.squaredNorm() - scene.radius * scene.radius;
  const double disc = b * b - c;
  if (disc < 0) return std::nullopt;
  const double t = -b - std::sqrt(disc);
  if (t <= 0) return std::nullopt;

  PixelGeometry g;
  g.point = eye + t * dir;
  const Vec3 normal = (g.point - scene.center).normalized();
  g.tangent = TangentFrame::from_normal(normal);
  const Vec3 light = light_position(scene, arm_angle);
  const Vec3 to_light = light - g.point;
  const double light_dist = to_light.norm();
  g.omega_i = to_light / light_dist;
  g.omega_o = (eye - g.point).normalized();
  const double cos_i = normal.dot(g.omega_i);
  if (cos_i <= 0 || normal.dot(g.omega_o) <= 0) return std::nullopt;

  g.light_frame = make_frame(-g.omega_i, scene.light_x_reference, cam.right);
  g.camera_frame = make_frame(g.omega_o, cam.right, scene.light_x_reference);
  g.io = hpbrdf_frames(g.omega_i, g.omega_o, g.tangent);
  g.chain.c_ei = frame_transfer(g.light_frame, g.io.incident);
  g.chain.c_rc = frame_transfer(g.io.outgoing, g.camera_frame);
  g.chain.geometry_factor = (scene.cosine_foreshortening ? cos_i : 1.0) /
                            (scene.inverse_square ? light_dist * light_dist : 1.0);
  return g;
}

Stokesd emitted_stokes(const AcquisitionConfig& config, double qwp_angle, int band) {
  const Stokesd lamp(config.light_spectrum.at(band), 0.0, 0.0, 0.0);
  return retarder_mueller(qwp_angle, config.illum_retardance.at(band)) *
         lp_mueller(config.illum_polarizer_angle) * lamp;
}

Stokesd analyzer_row(const AcquisitionConfig& config, double qwp_angle, int band) {
  const Muellerd a =
      lp_mueller(config.analyzer_polarizer_angle) * retarder_mueller(qwp_angle, config.analyzer_retardance.at(band));
  return a.row(0).transpose();
}

double simulate_pixel(const Muellerd& m, const PixelChain& chain, const AcquisitionConfig& config,
                      double illum_angle, double analyzer_angle, int band) {
  const Stokesd incident = chain.c_ei * emitted_stokes(config, illum_angle, band);
  const Stokesd captured = chain.c_rc * (m * incident);
  return chain.geometry_factor * analyzer_row(config, analyzer_angle, band).dot(captured);
}

bool occlusion_free(int position, int x, int width) {
  return position == 0 ? x < 0.65 * width : x >= 0.35 * width;
}

std::size_t CaptureArchive::index(int position, int arm, int band, int theta, int theta_p, int y, int x) const {
  std::size_t i = position;
  i = i * arm_angles.size() + arm;
  i = i * wavelengths.count + band;
  i = i * illum_angles.size() + theta;
  i = i * analyzer_angles.size() + theta_p;
  i = i * height + y;
  return i * width + x;
}

CaptureArchive simulate_sphere_capture(const AnalyticPbrdf& pbrdf, const SphereScene& scene,
                                       const AcquisitionConfig& config) {
  config.validate();
  CaptureArchive ar;
  ar.positions = config.occlusion ? 2 : 1;
  ar.width = scene.camera.width;
  ar.height = scene.camera.height;
  ar.illum_angles = config.illum_qwp_angles;
  ar.analyzer_angles = config.analyzer_qwp_angles;
  ar.arm_angles = config.light_arm_angles;
  ar.wavelengths = config.wavelengths;

  const int n_arm = static_cast<int>(ar.arm_angles.size());
  const int n_band = ar.wavelengths.count;
  const int n_t = static_cast<int>(ar.illum_angles.size());
  const int n_tp = static_cast<int>(ar.analyzer_angles.size());
  ar.intensities.assign(std::size_t(ar.positions) * n_arm * n_band * n_t * n_tp * ar.pixel_count(), 0.0f);
  ar.masks.assign(std::size_t(ar.positions) * ar.pixel_count(), 1);
  if (config.occlusion) {
    for (int p = 0; p < ar.positions; ++p)
      for (int y = 0; y < ar.height; ++y)
        for (int x = 0; x < ar.width; ++x)
          ar.masks[(std::size_t(p) * ar.height + y) * ar.width + x] = occlusion_free(p, x, ar.width) ? 1 : 0;
  }

  // Illumination states and analyzer rows only depend on the band.
  std::vector<std::vector<Stokesd>> emitted(n_band), analyzer(n_band);
  for (int b = 0; b < n_band; ++b) {
    for (double t : ar.illum_angles) emitted[b].push_back(emitted_stokes(config, t, b));
    for (double t : ar.analyzer_angles) analyzer[b].push_back(analyzer_row(config, t, b));
  }

  const CounterNormal noise(config.seed);
  const bool per_band_geometry = !scene.camera.view_offsets.empty();
  const std::int64_t jobs = std::int64_t(n_arm) * ar.height;
  parallel_for(0, jobs, [&](std::int64_t job) {
    const int arm = static_cast<int>(job / ar.height);
    const int y = static_cast<int>(job % ar.height);
    for (int x = 0; x < ar.width; ++x) {
      std::optional<PixelGeometry> geom;
      for (int b = 0; b < n_band; ++b) {
        if (b == 0 || per_band_geometry) geom = sphere_pixel_geometry(scene, x, y, ar.arm_angles[arm], b);
        if (!geom) continue;
        const double nm = ar.wavelengths.wavelength(b);
        const Muellerd m = eval_analytic(pbrdf, geom->omega_i, geom->omega_o, geom->tangent, nm);
        const PixelChain& chain = geom->chain;
        for (int t = 0; t < n_t; ++t) {
          const Stokesd captured = chain.c_rc * (m * (chain.c_ei * emitted[b][t]));
          for (int tp = 0; tp < n_tp; ++tp) {
            const double clean = chain.geometry_factor * analyzer[b][tp].dot(captured);
            for (int p = 0; p < ar.positions; ++p) {
              if (!ar.masks[(std::size_t(p) * ar.height + y) * ar.width + x]) continue;
              double f = clean;
              if (config.noise_rel > 0) {
                f *= 1.0 + config.noise_rel * noise({std::uint64_t(p), std::uint64_t(arm), std::uint64_t(b),
                                                     std::uint64_t(t), std::uint64_t(tp), std::uint64_t(y),
                                                     std::uint64_t(x)});
              }
              ar.intensities[ar.index(p, arm, b, t, tp, y, x)] = static_cast<float>(f);
            }
          }
        }
      }
    }
  });
  return ar;
}

}  // namespace hpbrdf
