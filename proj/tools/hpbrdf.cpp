// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

// hpbrdf: command-line driver for the capture -> table -> analysis pipeline.
//
// Each subcommand writes its data files, prints a JSON report on stdout
// (also saved next to the primary output) and logs progress on stderr.
// Failures print one line "error: <Category>: <message>" and exit 1; usage
// errors exit 2.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hpbrdf/acquisition.hpp"
#include "hpbrdf/analysis.hpp"
#include "hpbrdf/color.hpp"
#include "hpbrdf/config.hpp"
#include "hpbrdf/error.hpp"
#include "hpbrdf/image_io.hpp"
#include "hpbrdf/mlp.hpp"
#include "hpbrdf/parallel.hpp"
#include "hpbrdf/reconstruction.hpp"
#include "hpbrdf/renderer.hpp"
#include "hpbrdf/table.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hpbrdf;

namespace {

struct Globals {
  std::string config_path;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

Globals g_opts;

void progress(const std::string& msg) {
  if (!g_opts.quiet) std::cerr << "hpbrdf: " << msg << "\n";
}

PipelineConfig load_config() {
  std::string path = g_opts.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar)) path = env;
  }
  PipelineConfig cfg = path.empty() ? PipelineConfig::defaults() : PipelineConfig::load(path);
  if (g_opts.seed) {
    cfg.acquisition.seed = *g_opts.seed;
    cfg.train.seed = *g_opts.seed;
  }
  return cfg;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(json report, const std::string& report_path, const Timer& timer) {
  report["seconds"] = timer.seconds();
  report["threads"] = thread_count();
  const std::string text = report.dump(2);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << text << "\n";
    if (!out) throw Error(ErrorCode::Io, "cannot write report " + report_path);
  }
  std::cout << text << std::endl;
}

std::string file_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  char m[4] = {};
  in.read(m, 4);
  if (!in) throw Error(ErrorCode::TruncatedFile, path + ": shorter than a magic number");
  return std::string(m, 4);
}

json dims_json(const TableDims& d) {
  return {{"n_lambda", d.n_lambda}, {"n_phi_d", d.n_phi_d}, {"n_theta_d", d.n_theta_d}, {"n_theta_h", d.n_theta_h}};
}

json grid_json(const WavelengthGrid& g) {
  return {{"start_nm", g.start_nm}, {"step_nm", g.step_nm}, {"count", g.count}};
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string material;
  std::string out;
};

void run_simulate(const SimulateArgs& a) {
  const Timer timer;
  const PipelineConfig cfg = load_config();
  const std::string material_path = a.material.empty() ? cfg.material_path : a.material;
  if (material_path.empty()) throw Error(ErrorCode::InvalidConfig, "simulate needs --material or paths.material");
  const AnalyticPbrdf mat = AnalyticPbrdf::load(material_path);
  progress("simulating " + std::to_string(cfg.acquisition.light_arm_angles.size()) + " arm angles x " +
           std::to_string(cfg.acquisition.wavelengths.count) + " bands at " +
           std::to_string(cfg.scene.camera.width) + "x" + std::to_string(cfg.scene.camera.height));
  const CaptureArchive archive = simulate_sphere_capture(mat, cfg.scene, cfg.acquisition);
  write_archive(a.out, archive);
  json r;
  r["command"] = "simulate";
  r["output"] = a.out;
  r["width"] = archive.width;
  r["height"] = archive.height;
  r["positions"] = archive.positions;
  r["arm_angles"] = archive.arm_angles.size();
  r["wavelengths"] = grid_json(archive.wavelengths);
  r["measurements_per_band"] = cfg.acquisition.measurements_per_band();
  r["intensities"] = archive.intensities.size();
  r["noise_rel"] = cfg.acquisition.noise_rel;
  r["seed"] = cfg.acquisition.seed;
  emit(r, a.out + ".json", timer);
}

// ---------------------------------------------------------------------------

struct ReconstructArgs {
  std::string in;
  std::string out_prefix;
};

void run_reconstruct(const ReconstructArgs& a) {
  const Timer timer;
  const PipelineConfig cfg = load_config();
  const CaptureArchive archive = read_archive(a.in);
  AcquisitionConfig acq = cfg.acquisition;
  if (!(archive.wavelengths == acq.wavelengths)) {
    throw Error(ErrorCode::DimMismatch, "capture wavelength grid differs from the configured acquisition grid");
  }
  if (archive.width != cfg.scene.camera.width || archive.height != cfg.scene.camera.height) {
    throw Error(ErrorCode::DimMismatch, "capture size differs from the configured scene camera");
  }
  acq.illum_qwp_angles = archive.illum_angles;
  acq.analyzer_qwp_angles = archive.analyzer_angles;
  acq.light_arm_angles = archive.arm_angles;
  acq.occlusion = archive.positions > 1;
  progress("reconstructing " + std::to_string(archive.arm_angles.size()) + " images");
  const ReconstructionResult rec = reconstruct_image(archive, cfg.scene, acq);
  json files = json::array();
  for (std::size_t k = 0; k < rec.images.size(); ++k) {
    const std::string path = a.out_prefix + "_arm" + std::to_string(k) + ".hpmi";
    write_mueller_image(path, rec.images[k]);
    files.push_back(path);
  }
  double worst_residual = 0.0;
  for (const MuellerImage& img : rec.images)
    for (float v : img.residual)
      if (std::isfinite(v)) worst_residual = std::max(worst_residual, double(v));
  json r;
  r["command"] = "reconstruct";
  r["outputs"] = files;
  r["solved"] = rec.stats.solved;
  r["invalid"] = rec.stats.invalid;
  r["physical"] = rec.stats.physical;
  r["physical_percent"] = 100.0 * rec.stats.physical_fraction();
  r["max_rms_residual"] = worst_residual;
  emit(r, a.out_prefix + ".json", timer);
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> in;
  std::string report;
};

void run_validate(const ValidateArgs& a) {
  const Timer timer;
  std::size_t valid = 0;
  std::size_t physical = 0;
  json per_file = json::array();
  for (const std::string& path : a.in) {
    const MuellerImage img = read_mueller_image(path);
    std::size_t v = 0;
    std::size_t p = 0;
    for (int b = 0; b < img.wavelengths.count; ++b)
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
          if (!img.valid[img.slot(b, x, y)]) continue;
          ++v;
          p += is_physical_gk(img.matrix(b, x, y)).physical;
        }
    valid += v;
    physical += p;
    per_file.push_back({{"file", path}, {"valid", v}, {"physical", p},
                        {"physical_percent", v ? 100.0 * double(p) / double(v) : 0.0}});
  }
  const double percent = valid ? 100.0 * double(physical) / double(valid) : 0.0;
  std::fprintf(stderr, "physically valid: %.2f%% (%zu of %zu)\n", percent, physical, valid);
  json r;
  r["command"] = "validate";
  r["files"] = per_file;
  r["valid"] = valid;
  r["physical"] = physical;
  r["physical_percent"] = percent;
  emit(r, a.report, timer);
}

// ---------------------------------------------------------------------------

struct TabulateArgs {
  std::vector<std::string> in;
  std::string out;
  std::string bins;
  double memory_mb = 4096.0;
};

void run_tabulate(const TabulateArgs& a) {
  const Timer timer;
  const PipelineConfig cfg = load_config();
  TableDims dims = a.bins.empty() ? cfg.table : TableDims::parse(a.bins);
  const MuellerImage first = read_mueller_image(a.in.front());
  const WavelengthGrid grid = first.wavelengths;
  if (grid.count != dims.n_lambda) {
    throw Error(ErrorCode::DimMismatch, "images have " + std::to_string(grid.count) + " bands, table dims " +
                                            dims.to_string());
  }
  // Accumulator (17 doubles) plus the finalized block (69 bytes) per bin.
  const double per_band_mb = double(dims.angular_bins()) * (17 * 8 + 69) / (1024.0 * 1024.0);
  const int block = std::clamp(static_cast<int>(a.memory_mb / per_band_mb), 1, dims.n_lambda);

  TableFileWriter writer(a.out, {dims, grid});
  std::size_t accepted = 0;
  std::size_t skipped = 0;
  std::size_t filled = 0;
  for (int b0 = 0; b0 < dims.n_lambda; b0 += block) {
    const int n = std::min(block, dims.n_lambda - b0);
    TableDims bd = dims;
    bd.n_lambda = n;
    TableAccumulator acc(bd, grid.slice(b0, n));
    for (std::size_t i = 0; i < a.in.size(); ++i) {
      const MuellerImage img = (i == 0 && b0 == 0) ? first : read_mueller_image(a.in[i]);
      acc.add_image(img, cfg.scene, b0);
    }
    const HpbrdfTable t = acc.finalize();
    accepted += acc.accepted();
    skipped += acc.skipped();
    filled += t.filled_bins();
    writer.write_bands(b0, t);
    progress("bands " + std::to_string(b0) + ".." + std::to_string(b0 + n - 1) + " splatted");
  }
  writer.finish();
  json r;
  r["command"] = "tabulate";
  r["output"] = a.out;
  r["dims"] = dims_json(dims);
  r["wavelengths"] = grid_json(grid);
  r["images"] = a.in.size();
  r["accepted_samples"] = accepted;
  r["skipped_samples"] = skipped;
  r["filled_bins"] = filled;
  r["filled_fraction"] = double(filled) / double(dims.bins());
  r["band_block"] = block;
  emit(r, a.out + ".json", timer);
}

// ---------------------------------------------------------------------------

struct InpaintArgs {
  std::string in;
  std::string out;
  std::vector<double> sigma;
};

void run_inpaint(const InpaintArgs& a) {
  const Timer timer;
  const PipelineConfig cfg = load_config();
  std::array<double, 3> sigma = cfg.inpaint_sigma;
  if (!a.sigma.empty()) {
    if (a.sigma.size() != 3) throw Error(ErrorCode::InvalidConfig, "--sigma takes phi_d,theta_d,theta_h");
    std::copy(a.sigma.begin(), a.sigma.end(), sigma.begin());
  }
  const TableHeader h = read_table_header(a.in);
  const int bands = h.dims.n_lambda;
  // Bands are independent; a band without samples takes its nearest
  // populated band, as in the in-memory inpaint.
  std::vector<std::size_t> filled(bands);
  for (int b = 0; b < bands; ++b) filled[b] = read_table_bands(a.in, b, 1).filled_bins();
  if (std::all_of(filled.begin(), filled.end(), [](std::size_t f) { return f == 0; })) {
    throw Error(ErrorCode::EmptyTable, a.in + ": table has no occupied bins");
  }
  TableFileWriter writer(a.out, h);
  std::size_t before = 0;
  int copied = 0;
  for (int b = 0; b < bands; ++b) {
    before += filled[b];
    int source = b;
    if (filled[b] == 0) {
      source = -1;
      for (int k = 0; k < bands; ++k)
        if (filled[k] && (source < 0 || std::abs(k - b) < std::abs(source - b))) source = k;
      ++copied;
    }
    HpbrdfTable t = inpaint(read_table_bands(a.in, source, 1), sigma);
    if (source != b) t.weight() = read_table_bands(a.in, b, 1).weight();
    writer.write_bands(b, t);
  }
  writer.finish();
  progress("inpainted " + std::to_string(h.dims.bins() - before) + " empty bins");
  json r;
  r["command"] = "inpaint";
  r["output"] = a.out;
  r["dims"] = dims_json(h.dims);
  r["sigma_bins"] = sigma;
  r["filled_before"] = before;
  r["filled_fraction_before"] = double(before) / double(h.dims.bins());
  r["inpainted_bins"] = h.dims.bins() - before;
  r["bands_copied"] = copied;
  emit(r, a.out + ".json", timer);
}

// ---------------------------------------------------------------------------

struct DecomposeArgs {
  std::string in;
  std::string out_prefix;
};

void run_decompose(const DecomposeArgs& a) {
  const Timer timer;
  const MuellerImage img = read_mueller_image(a.in);
  const ScalarMaps maps = scalar_maps(img);
  write_scalar_maps(a.out_prefix, maps, img.wavelengths);
  auto mean = [](const std::vector<float>& v) {
    double s = 0.0;
    std::size_t n = 0;
    for (float x : v)
      if (std::isfinite(x)) {
        s += x;
        ++n;
      }
    return n ? s / double(n) : 0.0;
  };
  std::size_t valid = 0;
  for (float x : maps.diattenuation) valid += std::isfinite(x);
  json r;
  r["command"] = "decompose";
  r["output_prefix"] = a.out_prefix;
  r["decomposed"] = valid;
  r["mean_diattenuation"] = mean(maps.diattenuation);
  r["mean_polarizance"] = mean(maps.polarizance);
  r["mean_retardance"] = mean(maps.retardance);
  r["mean_preservation"] = mean(maps.preservation);
  emit(r, a.out_prefix + "_report.json", timer);
}

// ---------------------------------------------------------------------------

struct PcaArgs {
  std::string in;
  std::string out;
  std::string axes = "theta_d,theta_h";
  int components = 8;
};

void run_pca(const PcaArgs& a) {
  const Timer timer;
  const auto comma = a.axes.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--axes takes two names, e.g. theta_d,theta_h");
  const PcaSliceSpec spec{parse_table_axis(a.axes.substr(0, comma)), parse_table_axis(a.axes.substr(comma + 1))};
  const HpbrdfTable table = read_table(a.in);
  const Eigen::MatrixXd samples = pca_samples(table, spec);
  const PcaResult res = pca(samples, a.components);
  json comps = json::array();
  for (Eigen::Index k = 0; k < res.components.cols(); ++k) {
    const Eigen::VectorXd c = res.components.col(k);
    comps.push_back(std::vector<double>(c.data(), c.data() + c.size()));
  }
  std::vector<double> error_curve;
  for (int k = 0; k <= a.components; ++k) error_curve.push_back(pca_reconstruction_error(res, samples, k));
  json out;
  out["axes"] = {table_axis_name(spec.first), table_axis_name(spec.second)};
  out["samples"] = samples.rows();
  out["features"] = samples.cols();
  out["mean"] = std::vector<double>(res.mean.data(), res.mean.data() + res.mean.size());
  out["components"] = comps;
  out["explained_variance"] = std::vector<double>(res.explained_variance.data(),
                                                  res.explained_variance.data() + res.explained_variance.size());
  out["explained_ratio"] =
      std::vector<double>(res.explained_ratio.data(), res.explained_ratio.data() + res.explained_ratio.size());
  out["reconstruction_mse"] = error_curve;
  std::ofstream f(a.out);
  f << out.dump() << "\n";
  if (!f) throw Error(ErrorCode::Io, "cannot write " + a.out);
  json r;
  r["command"] = "pca";
  r["output"] = a.out;
  r["axes"] = out["axes"];
  r["samples"] = samples.rows();
  r["features"] = samples.cols();
  r["explained_ratio"] = out["explained_ratio"];
  r["reconstruction_mse"] = error_curve;
  emit(r, a.out + ".report.json", timer);
}

// ---------------------------------------------------------------------------

struct RenderArgs {
  std::string scene;
  std::string material;
  std::string table;
  std::string lookup = "trilinear";
  std::string out_prefix;
  std::optional<double> analyzer_deg;
};

void run_render(const RenderArgs& a) {
  const Timer timer;
  const RenderScene scene = RenderScene::load(a.scene);
  if (a.material.empty() == a.table.empty()) {
    throw Error(ErrorCode::InvalidConfig, "render needs exactly one of --material or --table");
  }
  std::optional<AnalyticPbrdf> analytic;
  HpbrdfTable table;
  Material material = Material::analytic(AnalyticPbrdf(SpectralIor(1.5, 0.0), 0.0, 0.0));
  if (!a.material.empty()) {
    analytic = AnalyticPbrdf::load(a.material);
    material = Material::analytic(*analytic);
  } else {
    table = read_table(a.table);
    if (a.lookup != "trilinear" && a.lookup != "nearest") {
      throw Error(ErrorCode::InvalidConfig, "--lookup is trilinear or nearest");
    }
    material = Material::tabulated(table, a.lookup == "nearest" ? LookupMode::Nearest : LookupMode::Trilinear);
  }
  progress("rendering " + std::to_string(scene.sphere.camera.width) + "x" + std::to_string(scene.sphere.camera.height) +
           " at " + std::to_string(scene.wavelengths.count) + " bands");
  const SpectralStokesImage img = render_direct(scene, material);
  const int w = img.width;
  const int h = img.height;
  const std::size_t pixels = img.pixel_count();

  std::vector<float> stokes(img.stokes.begin(), img.stokes.end());
  {
    BinaryWriter out(a.out_prefix + "_stokes.f32");
    out.put_array<float>(stokes);
    out.finish();
  }
  const std::vector<double> s0 = img.intensity();
  FloatImage total{w, h, 1, std::vector<float>(pixels, 0.0f)};
  for (int b = 0; b < img.wavelengths.count; ++b)
    for (std::size_t p = 0; p < pixels; ++p) total.pixels[p] += static_cast<float>(s0[std::size_t(b) * pixels + p]);
  write_pfm(a.out_prefix + "_s0.pfm", total);

  const std::vector<double> dop = dop_map(img);
  const std::vector<double> aolp = aolp_map(img);
  write_png(a.out_prefix + "_dop.png", w, h, 1, to_gray8(dop, 0.0, 1.0));
  write_png(a.out_prefix + "_aolp.png", w, h, 1, to_gray8(aolp, 0.0, std::numbers::pi));

  json r;
  r["command"] = "render";
  r["source"] = a.material.empty() ? "table" : "analytic";
  r["width"] = w;
  r["height"] = h;
  r["wavelengths"] = grid_json(img.wavelengths);
  bool colour = false;
  try {
    const Rgb8Image rgb = to_srgb(s0, w, h, img.wavelengths, 2.2, 1.0);
    write_png(a.out_prefix + "_rgb.png", w, h, 3, rgb.rgb);
    colour = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoVisibleBands) throw;
  }
  r["rgb"] = colour;
  const std::vector<double> nir = nir_channel(s0, w, h, img.wavelengths);
  if (!nir.empty()) {
    write_pfm(a.out_prefix + "_nir.pfm", FloatImage{w, h, 1, std::vector<float>(nir.begin(), nir.end())});
  }
  r["nir"] = !nir.empty();
  if (a.analyzer_deg) {
    const std::vector<double> filtered = apply_polarizer(img, radians(*a.analyzer_deg));
    FloatImage f{w, h, 1, std::vector<float>(pixels, 0.0f)};
    for (int b = 0; b < img.wavelengths.count; ++b)
      for (std::size_t p = 0; p < pixels; ++p) f.pixels[p] += static_cast<float>(filtered[std::size_t(b) * pixels + p]);
    write_pfm(a.out_prefix + "_analyzer.pfm", f);
    r["analyzer_deg"] = *a.analyzer_deg;
  }
  std::size_t hits = 0;
  double dop_sum = 0.0;
  for (std::size_t p = 0; p < pixels; ++p) {
    if (!img.hit[p]) continue;
    ++hits;
    dop_sum += dop[p];
  }
  r["hit_pixels"] = hits;
  r["mean_dop"] = hits ? dop_sum / double(hits) : 0.0;
  emit(r, a.out_prefix + "_report.json", timer);
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string table;
  std::string out;
  std::string layers;
  std::optional<int> iterations;
  std::optional<int> batch;
  std::optional<double> step;
};

void run_fit(const FitArgs& a) {
  const Timer timer;
  const PipelineConfig cfg = load_config();
  MlpArchitecture arch = cfg.architecture;
  if (!a.layers.empty()) {
    const MlpArchitecture parsed = MlpArchitecture::parse(a.layers);
    arch.hidden_layers = parsed.hidden_layers;
    arch.hidden_width = parsed.hidden_width;
  }
  TrainConfig train_cfg = cfg.train;
  if (a.iterations) train_cfg.iterations = *a.iterations;
  if (a.batch) train_cfg.batch_size = *a.batch;
  if (a.step) train_cfg.step_size = *a.step;
  const HpbrdfTable table = read_table(a.table);
  progress("training " + std::to_string(arch.hidden_layers) + "x" + std::to_string(arch.hidden_width) + " for " +
           std::to_string(train_cfg.iterations) + " steps");
  const TrainResult res = train(make_model(arch, table, train_cfg.seed), table, train_cfg);
  write_model(a.out, res.model);
  const double mse = evaluate_mse(res.model, table);
  std::vector<double> curve;
  for (std::size_t i = 0; i < res.loss_history.size(); i += 100) curve.push_back(res.loss_history[i]);
  json r;
  r["command"] = "fit-mlp";
  r["output"] = a.out;
  r["layers"] = std::to_string(arch.hidden_layers) + "x" + std::to_string(arch.hidden_width);
  r["parameters"] = arch.parameter_count();
  r["model_bytes"] = serialized_model_bytes(arch);
  r["table_payload_bytes"] = table.dims().payload_bytes();
  r["full_table_payload_bytes"] = TableDims::full().payload_bytes();
  r["compression_vs_full_table"] = double(TableDims::full().payload_bytes()) / double(serialized_model_bytes(arch));
  r["iterations"] = train_cfg.iterations;
  r["seed"] = train_cfg.seed;
  r["final_batch_loss"] = res.loss_history.empty() ? 0.0 : res.loss_history.back();
  r["table_mse"] = mse;
  r["loss_every_100"] = curve;
  emit(r, a.out + ".json", timer);
}

// ---------------------------------------------------------------------------

void run_info(const std::string& path) {
  const Timer timer;
  const std::string magic = file_magic(path);
  json r;
  r["command"] = "info";
  r["file"] = path;
  r["format"] = magic;
  if (magic == "HPBT") {
    const TableFileInfo info = inspect_table_file(path);
    r["dims"] = dims_json(info.header.dims);
    r["wavelengths"] = grid_json(info.header.wavelengths);
    r["bins"] = info.header.dims.bins();
    r["payload_bytes"] = info.header.payload_bytes();
    r["file_bytes"] = info.file_bytes;
    r["expected_file_bytes"] = info.expected_bytes;
    r["complete"] = info.file_bytes == info.expected_bytes;
  } else if (magic == "HPMA") {
    const CaptureArchive ar = read_archive(path);
    r["width"] = ar.width;
    r["height"] = ar.height;
    r["positions"] = ar.positions;
    r["arm_angles"] = ar.arm_angles.size();
    r["illum_angles"] = ar.illum_angles.size();
    r["analyzer_angles"] = ar.analyzer_angles.size();
    r["wavelengths"] = grid_json(ar.wavelengths);
  } else if (magic == "HPMI") {
    const MuellerImage img = read_mueller_image(path);
    std::size_t valid = 0;
    for (std::uint8_t v : img.valid) valid += v;
    r["width"] = img.width;
    r["height"] = img.height;
    r["arm_angle_deg"] = degrees(img.arm_angle);
    r["wavelengths"] = grid_json(img.wavelengths);
    r["valid"] = valid;
  } else if (magic == "HPNN") {
    const MlpModel<float> m = read_model(path);
    const MlpArchitecture& arch = m.architecture();
    r["layers"] = std::to_string(arch.hidden_layers) + "x" + std::to_string(arch.hidden_width);
    r["parameters"] = arch.parameter_count();
    r["model_bytes"] = serialized_model_bytes(arch);
  } else {
    throw Error(ErrorCode::BadMagic, path + ": unknown file format '" + magic + "'");
  }
  emit(r, "", timer);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperspectral polarimetric BRDF pipeline"};
  app.require_subcommand(1);
  app.add_option("--config", g_opts.config_path, std::string("Pipeline config (JSON); default $") + kConfigEnvVar);
  app.add_option("--threads", g_opts.threads, "Worker threads for data-parallel stages (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g_opts.seed, "Seed for every random stage");
  app.add_flag("-q,--quiet", g_opts.quiet, "No progress output");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Virtual DRR capture of the analytic sphere");
  c_sim->add_option("--material", sim.material, "Material file (JSON)");
  c_sim->add_option("-o,--out", sim.out, "Capture archive (.hpma)")->required();

  ReconstructArgs rec;
  auto* c_rec = app.add_subcommand("reconstruct", "Per-pixel Mueller matrices from a capture");
  c_rec->add_option("-i,--in", rec.in, "Capture archive")->required()->check(CLI::ExistingFile);
  c_rec->add_option("-o,--out-prefix", rec.out_prefix, "Writes <prefix>_arm<k>.hpmi")->required();

  ValidateArgs val;
  auto* c_val = app.add_subcommand("validate", "Givens-Kostinski physical-validity rate of Mueller images");
  c_val->add_option("inputs", val.in, "Mueller images (.hpmi)")->required()->check(CLI::ExistingFile);
  c_val->add_option("--report", val.report, "Also write the report here");

  TabulateArgs tab;
  auto* c_tab = app.add_subcommand("tabulate", "Splat Mueller images into an hpBRDF table");
  c_tab->add_option("inputs", tab.in, "Mueller images (.hpmi)")->required()->check(CLI::ExistingFile);
  c_tab->add_option("-o,--out", tab.out, "Table (.hpbt)")->required();
  c_tab->add_option("--bins", tab.bins, "Table dims, e.g. 16x90x23x23");
  c_tab->add_option("--memory-mb", tab.memory_mb, "Working-set budget for band blocks")->check(CLI::PositiveNumber);

  InpaintArgs inp;
  auto* c_inp = app.add_subcommand("inpaint", "Fill empty table bins by normalized convolution");
  c_inp->add_option("-i,--in", inp.in, "Table")->required()->check(CLI::ExistingFile);
  c_inp->add_option("-o,--out", inp.out, "Inpainted table")->required();
  c_inp->add_option("--sigma", inp.sigma, "Sigma in bins: phi_d,theta_d,theta_h")->delimiter(',');

  DecomposeArgs dec;
  auto* c_dec = app.add_subcommand("decompose", "Lu-Chipman scalar maps of a Mueller image");
  c_dec->add_option("-i,--in", dec.in, "Mueller image")->required()->check(CLI::ExistingFile);
  c_dec->add_option("-o,--out-prefix", dec.out_prefix, "Output prefix")->required();

  PcaArgs pc;
  auto* c_pca = app.add_subcommand("pca", "PCA over a two-axis table slice");
  c_pca->add_option("-i,--in", pc.in, "Table")->required()->check(CLI::ExistingFile);
  c_pca->add_option("-o,--out", pc.out, "Result (JSON)")->required();
  c_pca->add_option("--axes", pc.axes, "Feature axes: two of lambda, phi_d, theta_d, theta_h");
  c_pca->add_option("-k,--components", pc.components, "Components to keep")->check(CLI::PositiveNumber);

  RenderArgs ren;
  auto* c_ren = app.add_subcommand("render", "Render the sphere scene with an analytic or tabulated material");
  c_ren->add_option("--scene", ren.scene, "Scene file (JSON)")->required()->check(CLI::ExistingFile);
  c_ren->add_option("--material", ren.material, "Analytic material (JSON)")->check(CLI::ExistingFile);
  c_ren->add_option("--table", ren.table, "Tabulated hpBRDF (.hpbt)")->check(CLI::ExistingFile);
  c_ren->add_option("--lookup", ren.lookup, "trilinear | nearest");
  c_ren->add_option("--analyzer-deg", ren.analyzer_deg, "Also write the image behind a linear analyzer");
  c_ren->add_option("-o,--out-prefix", ren.out_prefix, "Output prefix")->required();

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit-mlp", "Fit the neural hpBRDF to a table");
  c_fit->add_option("--table", fit.table, "Inpainted table")->required()->check(CLI::ExistingFile);
  c_fit->add_option("-o,--out", fit.out, "Model (.hpnn)")->required();
  c_fit->add_option("--layers", fit.layers, "Hidden layers x width, e.g. 4x256");
  c_fit->add_option("--iterations", fit.iterations, "Training steps")->check(CLI::PositiveNumber);
  c_fit->add_option("--batch", fit.batch, "Batch size")->check(CLI::PositiveNumber);
  c_fit->add_option("--step", fit.step, "Adam step size")->check(CLI::PositiveNumber);

  std::string info_path;
  auto* c_info = app.add_subcommand("info", "Describe a table, capture, Mueller image or model file");
  c_info->add_option("file", info_path, "File")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: Usage: " << e.what() << "\n";
    return 2;
  }

  set_thread_count(g_opts.threads);
  try {
    if (c_sim->parsed()) run_simulate(sim);
    if (c_rec->parsed()) run_reconstruct(rec);
    if (c_val->parsed()) run_validate(val);
    if (c_tab->parsed()) run_tabulate(tab);
    if (c_inp->parsed()) run_inpaint(inp);
    if (c_dec->parsed()) run_decompose(dec);
    if (c_pca->parsed()) run_pca(pc);
    if (c_ren->parsed()) run_render(ren);
    if (c_fit->parsed()) run_fit(fit);
    if (c_info->parsed()) run_info(info_path);
  } catch (const Error& e) {
    std::cerr << "error: " << error_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: InvalidConfig: " << e.what() << "\n";
    return 1;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: OutOfMemory: allocation failed\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
