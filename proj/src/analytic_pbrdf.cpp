// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include "hpbrdf/analytic_pbrdf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "hpbrdf/error.hpp"
#include "hpbrdf/frame.hpp"

namespace hpbrdf {

namespace {

double interpolate(const WavelengthGrid& grid, const std::vector<double>& values, double nm) {
  if (values.size() == 1) return values.front();
  const double t = std::clamp((nm - grid.start_nm) / grid.step_nm, 0.0, double(values.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(t), values.size() - 2);
  const double f = t - double(i);
  return (1 - f) * values[i] + f * values[i + 1];
}

double lobe_normalization(double width) {
  // Integral of exp(-theta_h^2 / 2w^2) cos(theta_o) over the hemisphere of
  // outgoing directions for omega_i = n, where theta_h = theta_o / 2.
  constexpr int kIntervals = 4096;
  const double h = (std::numbers::pi / 2) / kIntervals;
  const auto f = [width](double t) {
    const double th = 0.5 * t;
    return std::exp(-th * th / (2 * width * width)) * std::cos(t) * std::sin(t);
  };
  double sum = f(0) + f(std::numbers::pi / 2);
  for (int k = 1; k < kIntervals; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return 2 * std::numbers::pi * sum * h / 3;
}

std::vector<double> json_spectrum(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return {fallback};
  const auto& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

}  // namespace

SpectralIor::SpectralIor(double eta, double kappa) : eta_{eta}, kappa_{kappa} {
  if (!(eta > 0) || !(kappa >= 0)) throw Error(ErrorCode::InvalidConfig, "SpectralIor: need eta > 0, kappa >= 0");
}

SpectralIor::SpectralIor(WavelengthGrid grid, std::vector<double> eta, std::vector<double> kappa)
    : grid_(grid), eta_(std::move(eta)), kappa_(std::move(kappa)) {
  if (eta_.empty() || eta_.size() != kappa_.size()) {
    throw Error(ErrorCode::InvalidConfig, "SpectralIor: eta/kappa size mismatch");
  }
  for (std::size_t i = 0; i < eta_.size(); ++i) {
    if (!(eta_[i] > 0) || !(kappa_[i] >= 0)) {
      throw Error(ErrorCode::InvalidConfig, "SpectralIor: need eta > 0, kappa >= 0");
    }
  }
}

IorSample SpectralIor::at(double wavelength_nm) const {
  return {interpolate(grid_, eta_, wavelength_nm), interpolate(grid_, kappa_, wavelength_nm)};
}

FresnelTerms fresnel_coefficients(const IorSample& ior, double theta_i) {
  using C = std::complex<double>;
  const C n(ior.eta, -ior.kappa);
  const double ci = std::cos(theta_i);
  const C st = std::sin(theta_i) / n;
  C ct = std::sqrt(C(1.0) - st * st);
  // Transmitted wave has to decay into the medium: Im(n cos t) <= 0.
  if ((n * ct).imag() > 0) ct = -ct;
  const C rs = (ci - n * ct) / (ci + n * ct);
  const C rp = (n * ci - ct) / (n * ci + ct);
  FresnelTerms t;
  t.rs = std::norm(rs);
  t.rp = std::norm(rp);
  t.cross = rs * std::conj(rp);
  t.delta = std::arg(t.cross);
  return t;
}

Muellerd fresnel_reflection_mueller(const IorSample& ior, double theta_i) {
  const FresnelTerms f = fresnel_coefficients(ior, theta_i);
  const double a = 0.5 * (f.rs + f.rp);
  const double b = 0.5 * (f.rs - f.rp);
  // sqrt(Rs Rp) cos(delta) and sqrt(Rs Rp) sin(delta), taken from the
  // complex product directly so a real delta of pi gives an exact zero.
  const double c = f.cross.real();
  const double s = f.cross.imag();
  Muellerd m;
  m << a, b, 0, 0,
       b, a, 0, 0,
       0, 0, c, s,
       0, 0, -s, c;
  return m;
}

AnalyticPbrdf::AnalyticPbrdf(SpectralIor ior, std::vector<double> diffuse_albedo, WavelengthGrid albedo_grid,
                             double specular_scale, double lobe_width)
    : ior_(std::move(ior)),
      albedo_grid_(albedo_grid),
      albedo_(std::move(diffuse_albedo)),
      specular_scale_(specular_scale),
      lobe_width_(lobe_width),
      lobe_norm_(0.0) {
  if (albedo_.empty()) throw Error(ErrorCode::InvalidConfig, "AnalyticPbrdf: empty albedo spectrum");
  for (double a : albedo_) {
    if (!(a >= 0 && a <= 1)) throw Error(ErrorCode::InvalidConfig, "AnalyticPbrdf: albedo outside [0, 1]");
  }
  if (!(specular_scale_ >= 0)) throw Error(ErrorCode::InvalidConfig, "AnalyticPbrdf: specular_scale < 0");
  if (!(lobe_width_ > 0)) throw Error(ErrorCode::InvalidConfig, "AnalyticPbrdf: lobe_width <= 0");
  lobe_norm_ = lobe_normalization(lobe_width_);
}

AnalyticPbrdf::AnalyticPbrdf(SpectralIor ior, double diffuse_albedo, double specular_scale, double lobe_width)
    : AnalyticPbrdf(std::move(ior), std::vector<double>{diffuse_albedo}, WavelengthGrid{414.0, 8.0, 1},
                    specular_scale, lobe_width) {}

double AnalyticPbrdf::albedo(double wavelength_nm) const {
  return interpolate(albedo_grid_, albedo_, wavelength_nm);
}

double AnalyticPbrdf::lobe(double theta_h) const {
  return std::exp(-theta_h * theta_h / (2 * lobe_width_ * lobe_width_)) / lobe_norm_;
}

AnalyticPbrdf AnalyticPbrdf::from_json(const nlohmann::json& j) {
  try {
    for (const auto& [key, _] : j.items()) {
      if (key != "eta" && key != "kappa" && key != "wavelengths" && key != "albedo" &&
          key != "specular_scale" && key != "lobe_width" && key != "name") {
        throw Error(ErrorCode::InvalidConfig, "material: unknown key '" + key + "'");
      }
    }
    WavelengthGrid grid{414.0, 8.0, 1};
    if (j.contains("wavelengths")) {
      const auto& w = j.at("wavelengths");
      grid = {w.at("start_nm").get<double>(), w.at("step_nm").get<double>(), w.at("count").get<int>()};
    }
    auto eta = json_spectrum(j, "eta", 1.5);
    auto kappa = json_spectrum(j, "kappa", 0.0);
    if (kappa.size() == 1 && eta.size() > 1) kappa.assign(eta.size(), kappa.front());
    if (eta.size() == 1 && kappa.size() > 1) eta.assign(kappa.size(), eta.front());
    auto albedo = json_spectrum(j, "albedo", 0.5);
    SpectralIor ior = eta.size() == 1 ? SpectralIor(eta.front(), kappa.front())
                                      : SpectralIor(grid, std::move(eta), std::move(kappa));
    return AnalyticPbrdf(std::move(ior), std::move(albedo), grid, j.value("specular_scale", 1.0),
                         j.value("lobe_width", 0.05));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("material: ") + e.what());
  }
}

AnalyticPbrdf AnalyticPbrdf::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open material file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("material: ") + e.what());
  }
  return from_json(j);
}

AnalyticParts eval_analytic_parts(const AnalyticPbrdf& pbrdf, const Vec3& omega_i, const Vec3& omega_o,
                                  const TangentFrame& frame, double wavelength_nm) {
  const Vec3 wi = omega_i.normalized();
  const Vec3 wo = omega_o.normalized();
  const Vec3& n = frame.normal;
  if (wi.dot(n) < -1e-12 || wo.dot(n) < -1e-12) {
    throw Error(ErrorCode::BelowHorizon, "eval_analytic: direction below the surface");
  }

  AnalyticParts parts;
  parts.diffuse = depolarizer_mueller(pbrdf.albedo(wavelength_nm) / std::numbers::pi);
  parts.specular.setZero();

  const Vec3 sum = wi + wo;
  if (pbrdf.specular_scale() == 0.0 || sum.norm() < 1e-12) return parts;
  const Vec3 h = sum.normalized();
  const double theta_h = std::acos(std::clamp(h.dot(n), -1.0, 1.0));
  const double theta_d = std::acos(std::clamp(wi.dot(h), -1.0, 1.0));
  const double weight = pbrdf.specular_scale() * pbrdf.lobe(theta_h);
  if (weight == 0.0) return parts;

  const IncidentOutgoingFrames io = hpbrdf_frames(wi, wo, frame);
  // s axis: normal to the plane spanned by omega_i and the microfacet normal h.
  Vec3 s_axis = h.cross(wi);
  if (s_axis.norm() < 1e-9) s_axis = io.incident.x_axis;
  const PolarizationFrame sp_in = make_frame(-wi, s_axis);
  const PolarizationFrame sp_out = make_frame(wo, s_axis);

  const Muellerd fresnel = fresnel_reflection_mueller(pbrdf.ior().at(wavelength_nm), theta_d);
  parts.specular = weight * frame_transfer(sp_out, io.outgoing) * fresnel * frame_transfer(io.incident, sp_in);
  return parts;
}

Muellerd eval_analytic(const AnalyticPbrdf& pbrdf, const Vec3& omega_i, const Vec3& omega_o,
                       const TangentFrame& frame, double wavelength_nm) {
  const AnalyticParts parts = eval_analytic_parts(pbrdf, omega_i, omega_o, frame, wavelength_nm);
  return parts.diffuse + parts.specular;
}

}  // namespace hpbrdf
