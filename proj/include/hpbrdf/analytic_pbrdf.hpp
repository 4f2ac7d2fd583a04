// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Analytic ground-truth polarimetric BRDF: a fully depolarizing diffuse
/// term plus a Fresnel specular lobe with a Gaussian half-angle spread.

#pragma once

#include <complex>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hpbrdf/rusinkiewicz.hpp"
#include "hpbrdf/types.hpp"
#include "hpbrdf/wavelength.hpp"

namespace hpbrdf {

/// Complex refractive index eta - i*kappa at one wavelength.
struct IorSample {
  double eta = 1.5;
  double kappa = 0.0;
};

/// Refractive index sampled on a wavelength grid; a single sample means
/// dispersion-free.
class SpectralIor {
 public:
  SpectralIor() = default;
  SpectralIor(double eta, double kappa);
  SpectralIor(WavelengthGrid grid, std::vector<double> eta, std::vector<double> kappa);

  /// Linear interpolation in wavelength, clamped at the grid ends.
  IorSample at(double wavelength_nm) const;

 private:
  WavelengthGrid grid_{414.0, 8.0, 1};
  std::vector<double> eta_{1.5};
  std::vector<double> kappa_{0.0};
};

struct FresnelTerms {
  double rs = 0.0;  // |r_s|^2
  double rp = 0.0;  // |r_p|^2
  double delta = 0.0;  // arg(r_s * conj(r_p))
  std::complex<double> cross{};  // r_s * conj(r_p)
};

/// Fresnel reflectances and s-p phase difference for incidence from air.
/// r_p uses the (n cos i - cos t) numerator, so external dielectric
/// reflection below Brewster has delta = pi.
FresnelTerms fresnel_coefficients(const IorSample& ior, double theta_i);

/// Fresnel reflection Mueller matrix in the s/p frames of the plane of incidence.
Muellerd fresnel_reflection_mueller(const IorSample& ior, double theta_i);

class AnalyticPbrdf {
 public:
  AnalyticPbrdf(SpectralIor ior, std::vector<double> diffuse_albedo, WavelengthGrid albedo_grid,
                double specular_scale, double lobe_width);

  /// Constant albedo across wavelengths.
  AnalyticPbrdf(SpectralIor ior, double diffuse_albedo, double specular_scale, double lobe_width = 0.05);

  const SpectralIor& ior() const { return ior_; }
  double albedo(double wavelength_nm) const;
  double specular_scale() const { return specular_scale_; }
  double lobe_width() const { return lobe_width_; }

  /// Normalized half-angle lobe: integrates to one over the outgoing
  /// hemisphere (weighted by cos theta_o) at normal incidence.
  double lobe(double theta_h) const;

  static AnalyticPbrdf from_json(const nlohmann::json& j);
  static AnalyticPbrdf load(const std::string& path);

 private:
  SpectralIor ior_;
  WavelengthGrid albedo_grid_;
  std::vector<double> albedo_;
  double specular_scale_;
  double lobe_width_;
  double lobe_norm_;
};

/// Mueller matrix in the hpbrdf_frames of (omega_i, omega_o). Throws
/// BelowHorizon if either direction points into the surface.
Muellerd eval_analytic(const AnalyticPbrdf& pbrdf, const Vec3& omega_i, const Vec3& omega_o,
                       const TangentFrame& frame, double wavelength_nm);

/// Same, with the specular and diffuse parts returned separately.
struct AnalyticParts {
  Muellerd diffuse;
  Muellerd specular;
};
AnalyticParts eval_analytic_parts(const AnalyticPbrdf& pbrdf, const Vec3& omega_i, const Vec3& omega_o,
                                  const TangentFrame& frame, double wavelength_nm);

}  // namespace hpbrdf
