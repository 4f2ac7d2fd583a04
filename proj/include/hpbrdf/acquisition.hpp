// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Virtual dual-rotating-retarder ellipsometer. The illumination module is
/// lamp -> linear polarizer -> rotating QWP; the analyzing module is
/// rotating QWP -> linear polarizer -> camera. The recorded intensity is
///
///   f = g * [LP_a R(theta', d_a) C_rc M C_ei R(theta, d_i) LP_i s]_0
///
/// with g the optional cos(theta_i) / distance^2 geometry factor.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hpbrdf/analytic_pbrdf.hpp"
#include "hpbrdf/frame.hpp"
#include "hpbrdf/rusinkiewicz.hpp"
#include "hpbrdf/types.hpp"
#include "hpbrdf/wavelength.hpp"

namespace hpbrdf {

double degrees(double radians);
double radians(double degrees);

struct AcquisitionConfig {
  std::vector<double> illum_qwp_angles;     // radians
  std::vector<double> analyzer_qwp_angles;  // radians
  std::vector<double> light_arm_angles;     // radians, angle between light and camera about the sample
  WavelengthGrid wavelengths = WavelengthGrid::full();
  std::vector<double> illum_retardance;     // radians per band
  std::vector<double> analyzer_retardance;  // radians per band
  std::vector<double> light_spectrum;       // radiance per band
  double illum_polarizer_angle = 0.0;
  double analyzer_polarizer_angle = 0.0;
  double noise_rel = 0.0;
  std::uint64_t seed = 0;
  /// Simulate the two analyzer-QWP positions, each with its own occlusion mask.
  bool occlusion = false;

  /// Angle sets and light arm sweep of the reference rig; QWPs at pi/2,
  /// flat unit lamp spectrum.
  static AcquisitionConfig defaults(WavelengthGrid grid = WavelengthGrid::full());

  int measurements_per_band() const {
    return static_cast<int>(illum_qwp_angles.size() * analyzer_qwp_angles.size());
  }
  void validate() const;

  static AcquisitionConfig from_json(const nlohmann::json& j, const AcquisitionConfig& base);
  nlohmann::json to_json() const;
};

struct CameraModel {
  int width = 410;
  int height = 410;
  double distance = 1.0;  // meters from the sphere center along +z
  /// Full field of view in radians; 0 frames the sphere with a small margin.
  double fov = 0.0;
  /// Optional per-band camera position offsets (light-field sub-views).
  std::vector<Vec3> view_offsets;
  /// Camera-frame x axis for Stokes vectors (image right).
  Vec3 right = Vec3::UnitX();
};

struct SphereScene {
  Vec3 center = Vec3::Zero();
  double radius = 0.05;
  CameraModel camera;
  double light_distance = 1.0;
  /// Lab direction that defines the illumination module's Stokes x axis.
  Vec3 light_x_reference = Vec3::UnitY();
  bool inverse_square = true;
  bool cosine_foreshortening = true;

  static SphereScene from_json(const nlohmann::json& j, const SphereScene& base);
  nlohmann::json to_json() const;
};

/// Mueller chain around the sample for one pixel: C_ei, C_rc and g.
struct PixelChain {
  Muellerd c_ei = Muellerd::Identity();
  Muellerd c_rc = Muellerd::Identity();
  double geometry_factor = 1.0;
};

struct PixelGeometry {
  Vec3 point;
  TangentFrame tangent;
  Vec3 omega_i;
  Vec3 omega_o;
  PolarizationFrame light_frame;   // emitted ray, propagating along -omega_i
  PolarizationFrame camera_frame;  // captured ray, propagating along omega_o
  IncidentOutgoingFrames io;
  PixelChain chain;
};

Vec3 light_position(const SphereScene& scene, double arm_angle);
Vec3 camera_position(const SphereScene& scene, int band);

/// Geometry for a pixel, or nullopt when the ray misses the sphere or the
/// hit point is unlit or faces away from the camera.
std::optional<PixelGeometry> sphere_pixel_geometry(const SphereScene& scene, int x, int y, double arm_angle,
                                                   int band = 0);

/// Stokes vector leaving the illumination module (in its frame).
Stokesd emitted_stokes(const AcquisitionConfig& config, double qwp_angle, int band);

/// Row 0 of LP_a R(theta', d_a): the analyzer's intensity functional.
Stokesd analyzer_row(const AcquisitionConfig& config, double qwp_angle, int band);

/// One recorded intensity for a known Mueller matrix in the hpBRDF frames.
double simulate_pixel(const Muellerd& m, const PixelChain& chain, const AcquisitionConfig& config,
                      double illum_angle, double analyzer_angle, int band);

/// Analyzer-QWP position visibility: position 0 sees x < 0.65 W, position 1
/// sees x >= 0.35 W, so the union covers the frame.
bool occlusion_free(int position, int x, int width);

/// Intensities f[position][arm][band][theta][theta'][y][x].
struct CaptureArchive {
  int positions = 1;
  int width = 0;
  int height = 0;
  std::vector<double> illum_angles;
  std::vector<double> analyzer_angles;
  std::vector<double> arm_angles;
  WavelengthGrid wavelengths;
  std::vector<float> intensities;
  /// 1 where the pixel is occlusion-free, per [position][y][x].
  std::vector<std::uint8_t> masks;

  std::size_t index(int position, int arm, int band, int theta, int theta_p, int y, int x) const;
  std::size_t pixel_count() const { return std::size_t(width) * height; }
};

CaptureArchive simulate_sphere_capture(const AnalyticPbrdf& pbrdf, const SphereScene& scene,
                                       const AcquisitionConfig& config);

void write_archive(const std::string& path, const CaptureArchive& archive);
CaptureArchive read_archive(const std::string& path);

}  // namespace hpbrdf
