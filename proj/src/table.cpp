// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

// hpBRDF table (.hpbt), little-endian:
//   "HPBT" u32 version=1
//   u32 n_lambda, n_phi_d, n_theta_d, n_theta_h
//   f64 lambda_start_nm, f64 lambda_step_nm
//   f32 data[lambda][phi_d][theta_d][theta_h][4][4]
//   f32 weight[lambda][phi_d][theta_d][theta_h]
//   packed bits mask[lambda][phi_d][theta_d][theta_h] (LSB first)

#include "hpbrdf/table.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "hpbrdf/binary_io.hpp"
#include "hpbrdf/error.hpp"
#include "hpbrdf/parallel.hpp"

namespace hpbrdf {

namespace {

constexpr std::uint32_t kTableVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 * 4 + 8 + 8;
constexpr double kHalfPi = std::numbers::pi / 2;

std::size_t table_file_bytes(const TableDims& d) {
  return kHeaderBytes + d.payload_bytes() + d.bins() * sizeof(float) + (d.bins() + 7) / 8;
}

void check_dims(const TableDims& d) {
  if (d.n_lambda < 1 || d.n_phi_d < 2 || d.n_theta_d < 2 || d.n_theta_h < 2) {
    throw Error(ErrorCode::DimMismatch, "table dims must be at least 1x2x2x2, got " + d.to_string());
  }
}

}  // namespace

TableDims TableDims::parse(const std::string& text) {
  TableDims d;
  std::array<int*, 4> fields{&d.n_lambda, &d.n_phi_d, &d.n_theta_d, &d.n_theta_h};
  std::stringstream ss(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, 'x')) {
    if (i >= fields.size()) throw Error(ErrorCode::InvalidConfig, "bad table dims '" + text + "'");
    try {
      std::size_t used = 0;
      *fields[i] = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "bad table dims '" + text + "'");
    }
    ++i;
  }
  if (i != 4 || text.back() == 'x') throw Error(ErrorCode::InvalidConfig, "bad table dims '" + text + "'");
  check_dims(d);
  return d;
}

std::string TableDims::to_string() const {
  return std::to_string(n_lambda) + "x" + std::to_string(n_phi_d) + "x" + std::to_string(n_theta_d) + "x" +
         std::to_string(n_theta_h);
}

HpbrdfTable::HpbrdfTable(TableDims dims, WavelengthGrid wavelengths) : dims_(dims), wavelengths_(wavelengths) {
  check_dims(dims);
  if (wavelengths.count != dims.n_lambda) {
    throw Error(ErrorCode::DimMismatch, "wavelength grid has " + std::to_string(wavelengths.count) +
                                            " bands, table expects " + std::to_string(dims.n_lambda));
  }
  data_.assign(dims.bins() * 16, 0.0f);
  weight_.assign(dims.bins(), 0.0f);
  mask_.assign(dims.bins(), 0);
}

double HpbrdfTable::phi_d_at(int node) const { return 2.0 * std::numbers::pi * node / (dims_.n_phi_d - 1); }
double HpbrdfTable::theta_d_at(int node) const { return kHalfPi * node / (dims_.n_theta_d - 1); }
double HpbrdfTable::theta_h_at(int node) const { return kHalfPi * node / (dims_.n_theta_h - 1); }

BinCoord HpbrdfTable::bin_coord(const RusinkiewiczCoord& c) const {
  BinCoord b;
  b.phi = std::clamp(c.phi_d / (2.0 * std::numbers::pi), 0.0, 1.0) * (dims_.n_phi_d - 1);
  b.theta_d = std::clamp(c.theta_d / kHalfPi, 0.0, 1.0) * (dims_.n_theta_d - 1);
  b.theta_h = std::clamp(c.theta_h / kHalfPi, 0.0, 1.0) * (dims_.n_theta_h - 1);
  return b;
}

Muellerd HpbrdfTable::matrix(std::size_t bin) const {
  const float* p = data_.data() + 16 * bin;
  Muellerd m;
  for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = p[i];
  return m;
}

void HpbrdfTable::set_matrix(std::size_t bin, const Muellerd& m) {
  float* p = data_.data() + 16 * bin;
  for (int i = 0; i < 16; ++i) p[i] = static_cast<float>(m(i / 4, i % 4));
}

std::size_t HpbrdfTable::filled_bins() const { return std::size_t(std::count(mask_.begin(), mask_.end(), 1)); }

// ---------------------------------------------------------------------------
// Splatting

TableAccumulator::TableAccumulator(TableDims dims, WavelengthGrid wavelengths)
    : dims_(dims), wavelengths_(wavelengths) {
  check_dims(dims);
  if (wavelengths.count != dims.n_lambda) throw Error(ErrorCode::DimMismatch, "wavelength grid does not match dims");
  sum_.assign(dims.bins() * 16, 0.0);
  weight_.assign(dims.bins(), 0.0);
}

namespace {

struct AxisTaps {
  std::array<int, 3> node{};
  std::array<double, 3> weight{};
  int count = 0;
};

constexpr double kTentRadius = 1.5;

AxisTaps axis_taps(double u, int nodes, bool periodic) {
  AxisTaps t;
  const int centre = static_cast<int>(std::lround(u));
  for (int o = -1; o <= 1; ++o) {
    int node = centre + o;
    const double w = std::max(0.0, 1.0 - std::abs(u - node) / kTentRadius);
    if (periodic) {
      const int unique = nodes - 1;
      node = ((node % unique) + unique) % unique;
    } else if (node < 0 || node >= nodes) {
      continue;
    }
    if (w <= 0) continue;
    t.node[t.count] = node;
    t.weight[t.count] = w;
    ++t.count;
  }
  return t;
}

}  // namespace

void TableAccumulator::add(int band, const RusinkiewiczCoord& coord, const Muellerd& m) {
  if (band < 0 || band >= dims_.n_lambda || !m.allFinite() || !splat(band, coord, m)) {
    ++skipped_;
    return;
  }
  ++accepted_;
}

bool TableAccumulator::splat(int band, const RusinkiewiczCoord& coord, const Muellerd& m) {
  const double phi = std::clamp(coord.phi_d / (2.0 * std::numbers::pi), 0.0, 1.0) * (dims_.n_phi_d - 1);
  const double td = std::clamp(coord.theta_d / kHalfPi, 0.0, 1.0) * (dims_.n_theta_d - 1);
  const double th = std::clamp(coord.theta_h / kHalfPi, 0.0, 1.0) * (dims_.n_theta_h - 1);
  const AxisTaps a = axis_taps(phi, dims_.n_phi_d, true);
  const AxisTaps b = axis_taps(td, dims_.n_theta_d, false);
  const AxisTaps c = axis_taps(th, dims_.n_theta_h, false);

  double total = 0.0;
  for (int i = 0; i < a.count; ++i)
    for (int j = 0; j < b.count; ++j)
      for (int k = 0; k < c.count; ++k) total += a.weight[i] * b.weight[j] * c.weight[k];
  if (!(total > 0)) return false;
  for (int i = 0; i < a.count; ++i) {
    for (int j = 0; j < b.count; ++j) {
      for (int k = 0; k < c.count; ++k) {
        const double w = a.weight[i] * b.weight[j] * c.weight[k] / total;
        const std::size_t bin =
            ((std::size_t(band) * dims_.n_phi_d + a.node[i]) * dims_.n_theta_d + b.node[j]) * dims_.n_theta_h +
            c.node[k];
        weight_[bin] += w;
        double* s = sum_.data() + 16 * bin;
        for (int e = 0; e < 16; ++e) s[e] += w * m(e / 4, e % 4);
      }
    }
  }
  return true;
}

std::size_t TableAccumulator::add_image(const MuellerImage& image, const SphereScene& scene, int first_band) {
  if (first_band < 0 || image.wavelengths.count < first_band + dims_.n_lambda) {
    throw Error(ErrorCode::DimMismatch, "Mueller image bands do not cover the table bands");
  }
  if (std::abs(image.wavelengths.wavelength(first_band) - wavelengths_.start_nm) > 1e-6 ||
      std::abs(image.wavelengths.step_nm - wavelengths_.step_nm) > 1e-9) {
    throw Error(ErrorCode::DimMismatch, "Mueller image wavelengths do not match the table");
  }
  if (image.width != scene.camera.width || image.height != scene.camera.height) {
    throw Error(ErrorCode::DimMismatch, "Mueller image size does not match the scene camera");
  }
  const bool per_band_geometry = !scene.camera.view_offsets.empty();
  std::vector<std::size_t> accepted(dims_.n_lambda, 0);
  std::vector<std::size_t> skipped(dims_.n_lambda, 0);
  // Bands own disjoint table slices, so they can be splatted concurrently.
  parallel_for(0, dims_.n_lambda, [&](std::int64_t bb) {
    const int b = static_cast<int>(bb);
    const int ib = b + first_band;
    const int geometry_band = per_band_geometry ? ib : 0;
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        if (!image.valid[image.slot(ib, x, y)]) continue;
        const auto geom = sphere_pixel_geometry(scene, x, y, image.arm_angle, geometry_band);
        if (!geom) {
          ++skipped[b];
          continue;
        }
        RusinkiewiczCoord coord;
        try {
          coord = to_rusinkiewicz(geom->omega_i, geom->omega_o, geom->tangent);
        } catch (const Error&) {
          ++skipped[b];
          continue;
        }
        const Muellerd m = image.matrix(ib, x, y);
        if (!m.allFinite()) {
          ++skipped[b];
          continue;
        }
        if (splat(b, coord, m)) {
          ++accepted[b];
        } else {
          ++skipped[b];
        }
      }
    }
  });
  std::size_t total = 0;
  for (int b = 0; b < dims_.n_lambda; ++b) {
    accepted_ += accepted[b];
    skipped_ += skipped[b];
    total += accepted[b];
  }
  return total;
}

double TableAccumulator::total_weight() const {
  double s = 0.0;
  for (double w : weight_) s += w;
  return s;
}

HpbrdfTable TableAccumulator::finalize() const {
  HpbrdfTable t(dims_, wavelengths_);
  const std::size_t per_band = dims_.angular_bins();
  const std::size_t theta_bins = std::size_t(dims_.n_theta_d) * dims_.n_theta_h;
  parallel_for(0, dims_.n_lambda, [&](std::int64_t b) {
    const std::size_t base = std::size_t(b) * per_band;
    for (std::size_t i = base; i < base + per_band; ++i) {
      const double w = weight_[i];
      t.weight()[i] = static_cast<float>(w);
      if (w <= 0) continue;
      t.mask()[i] = 1;
      for (int e = 0; e < 16; ++e) t.data()[16 * i + e] = static_cast<float>(sum_[16 * i + e] / w);
    }
    // phi_d = 2pi repeats phi_d = 0.
    const std::size_t first = base;
    const std::size_t last = base + std::size_t(dims_.n_phi_d - 1) * theta_bins;
    for (std::size_t k = 0; k < theta_bins; ++k) {
      t.mask()[last + k] = t.mask()[first + k];
      std::copy_n(t.data().begin() + 16 * (first + k), 16, t.data().begin() + 16 * (last + k));
    }
  });
  return t;
}

// ---------------------------------------------------------------------------
// Lookup

namespace {

struct Interp {
  int lo = 0;
  double t = 0.0;
};

Interp interp(double u, int nodes) {
  if (nodes == 1) return {0, 0.0};
  const double c = std::clamp(u, 0.0, double(nodes - 1));
  const int lo = std::min(static_cast<int>(std::floor(c)), nodes - 2);
  return {lo, c - lo};
}

}  // namespace

Muellerd lookup(const HpbrdfTable& table, double wavelength_nm, const RusinkiewiczCoord& coord, LookupMode mode) {
  const TableDims& d = table.dims();
  const WavelengthGrid& g = table.wavelengths();
  const BinCoord u = table.bin_coord(coord);
  const double band = (wavelength_nm - g.start_nm) / g.step_nm;

  if (mode == LookupMode::Nearest) {
    const std::size_t bin =
        table.bin(g.nearest_index(wavelength_nm), static_cast<int>(std::lround(u.phi)),
                  static_cast<int>(std::lround(u.theta_d)), static_cast<int>(std::lround(u.theta_h)));
    if (!table.mask()[bin]) throw Error(ErrorCode::UnfilledBin, "lookup hit an unfilled bin");
    return table.matrix(bin);
  }

  const Interp il = interp(band, d.n_lambda);
  const Interp ip = interp(u.phi, d.n_phi_d);
  const Interp id = interp(u.theta_d, d.n_theta_d);
  const Interp ih = interp(u.theta_h, d.n_theta_h);
  Muellerd acc = Muellerd::Zero();
  double total = 0.0;
  for (int cl = 0; cl < (d.n_lambda > 1 ? 2 : 1); ++cl) {
    const double wl = cl ? il.t : 1.0 - il.t;
    if (wl == 0.0) continue;
    for (int cp = 0; cp < 2; ++cp) {
      const double wp = wl * (cp ? ip.t : 1.0 - ip.t);
      if (wp == 0.0) continue;
      for (int cd = 0; cd < 2; ++cd) {
        const double wd = wp * (cd ? id.t : 1.0 - id.t);
        if (wd == 0.0) continue;
        for (int ch = 0; ch < 2; ++ch) {
          const double w = wd * (ch ? ih.t : 1.0 - ih.t);
          if (w == 0.0) continue;
          const std::size_t bin = table.bin(il.lo + cl, ip.lo + cp, id.lo + cd, ih.lo + ch);
          if (!table.mask()[bin]) continue;
          const float* p = table.data().data() + 16 * bin;
          for (int e = 0; e < 16; ++e) acc(e / 4, e % 4) += w * p[e];
          total += w;
        }
      }
    }
  }
  if (!(total > 0)) throw Error(ErrorCode::UnfilledBin, "lookup found no filled neighbours");
  return acc / total;
}

Muellerd lookup(const HpbrdfTable& table, double wavelength_nm, const Vec3& omega_i, const Vec3& omega_o,
                const TangentFrame& frame, LookupMode mode) {
  return lookup(table, wavelength_nm, to_rusinkiewicz(omega_i, omega_o, frame), mode);
}

// ---------------------------------------------------------------------------
// File format

void write_table(const std::string& path, const HpbrdfTable& t) {
  BinaryWriter w(path);
  w.magic("HPBT");
  w.put<std::uint32_t>(kTableVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.dims().n_lambda));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.dims().n_phi_d));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.dims().n_theta_d));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.dims().n_theta_h));
  w.put<double>(t.wavelengths().start_nm);
  w.put<double>(t.wavelengths().step_nm);
  w.put_array<float>(t.data());
  w.put_array<float>(t.weight());
  std::vector<std::uint8_t> packed((t.mask().size() + 7) / 8, 0);
  for (std::size_t i = 0; i < t.mask().size(); ++i)
    if (t.mask()[i]) packed[i / 8] |= std::uint8_t(1u << (i % 8));
  w.put_array<std::uint8_t>(packed);
  w.finish();
}

namespace {

TableHeader read_header(BinaryReader& r) {
  r.expect_magic("HPBT");
  if (r.get<std::uint32_t>() != kTableVersion) throw Error(ErrorCode::DimMismatch, r.path() + ": unsupported version");
  TableHeader h;
  h.dims.n_lambda = static_cast<int>(r.get<std::uint32_t>());
  h.dims.n_phi_d = static_cast<int>(r.get<std::uint32_t>());
  h.dims.n_theta_d = static_cast<int>(r.get<std::uint32_t>());
  h.dims.n_theta_h = static_cast<int>(r.get<std::uint32_t>());
  h.wavelengths.start_nm = r.get<double>();
  h.wavelengths.step_nm = r.get<double>();
  h.wavelengths.count = h.dims.n_lambda;
  check_dims(h.dims);
  return h;
}

}  // namespace

TableHeader read_table_header(const std::string& path) {
  BinaryReader r(path);
  const TableHeader h = read_header(r);
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot stat " + path);
  if (size < table_file_bytes(h.dims)) throw Error(ErrorCode::TruncatedFile, path + ": shorter than its dims imply");
  if (size > table_file_bytes(h.dims)) throw Error(ErrorCode::DimMismatch, path + ": longer than its dims imply");
  return h;
}

HpbrdfTable read_table(const std::string& path) {
  const TableHeader h = read_table_header(path);
  BinaryReader r(path);
  r.seek(kHeaderBytes);
  HpbrdfTable t(h.dims, h.wavelengths);
  r.get_array<float>(t.data());
  r.get_array<float>(t.weight());
  std::vector<std::uint8_t> packed((t.mask().size() + 7) / 8);
  r.get_array<std::uint8_t>(packed);
  for (std::size_t i = 0; i < t.mask().size(); ++i) t.mask()[i] = (packed[i / 8] >> (i % 8)) & 1u;
  char extra;
  if (r.try_get(extra)) throw Error(ErrorCode::DimMismatch, path + ": trailing bytes after the mask plane");
  return t;
}

TableFileInfo inspect_table_file(const std::string& path) {
  BinaryReader r(path);
  TableFileInfo info;
  info.header = read_header(r);
  std::error_code ec;
  info.file_bytes = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot stat " + path);
  info.expected_bytes = table_file_bytes(info.header.dims);
  return info;
}

HpbrdfTable read_table_bands(const std::string& path, int first, int count) {
  const TableHeader h = read_table_header(path);
  if (first < 0 || count < 1 || first + count > h.dims.n_lambda) {
    throw Error(ErrorCode::DimMismatch, path + ": band range outside the table");
  }
  TableDims dims = h.dims;
  dims.n_lambda = count;
  HpbrdfTable t(dims, h.wavelengths.slice(first, count));
  const std::size_t per_band = h.dims.angular_bins();
  const std::size_t bin0 = per_band * first;
  const std::size_t bins = per_band * count;
  BinaryReader r(path);
  r.seek(kHeaderBytes + 16 * sizeof(float) * bin0);
  r.get_array<float>(t.data());
  r.seek(kHeaderBytes + h.dims.payload_bytes() + sizeof(float) * bin0);
  r.get_array<float>(t.weight());
  const std::size_t byte0 = bin0 / 8;
  std::vector<std::uint8_t> packed((bin0 + bins + 7) / 8 - byte0);
  r.seek(kHeaderBytes + h.dims.payload_bytes() + sizeof(float) * h.dims.bins() + byte0);
  r.get_array<std::uint8_t>(packed);
  for (std::size_t i = 0; i < bins; ++i) {
    const std::size_t g = bin0 + i;
    t.mask()[i] = (packed[g / 8 - byte0] >> (g % 8)) & 1u;
  }
  return t;
}

TableFileWriter::TableFileWriter(const std::string& path, const TableHeader& header)
    : out_(path), header_(header), packed_mask_((header.dims.bins() + 7) / 8, 0), written_(header.dims.n_lambda, 0) {
  check_dims(header_.dims);
  header_.wavelengths.count = header_.dims.n_lambda;
  out_.magic("HPBT");
  out_.put<std::uint32_t>(kTableVersion);
  out_.put<std::uint32_t>(static_cast<std::uint32_t>(header_.dims.n_lambda));
  out_.put<std::uint32_t>(static_cast<std::uint32_t>(header_.dims.n_phi_d));
  out_.put<std::uint32_t>(static_cast<std::uint32_t>(header_.dims.n_theta_d));
  out_.put<std::uint32_t>(static_cast<std::uint32_t>(header_.dims.n_theta_h));
  out_.put<double>(header_.wavelengths.start_nm);
  out_.put<double>(header_.wavelengths.step_nm);
}

void TableFileWriter::write_bands(int first, const HpbrdfTable& bands) {
  const TableDims& d = bands.dims();
  const TableDims& full = header_.dims;
  if (d.n_phi_d != full.n_phi_d || d.n_theta_d != full.n_theta_d || d.n_theta_h != full.n_theta_h || first < 0 ||
      first + d.n_lambda > full.n_lambda) {
    throw Error(ErrorCode::DimMismatch, "band block " + d.to_string() + " does not fit table " + full.to_string());
  }
  const std::size_t bin0 = full.angular_bins() * first;
  out_.seek(kHeaderBytes + 16 * sizeof(float) * bin0);
  out_.put_array<float>(bands.data());
  out_.seek(kHeaderBytes + full.payload_bytes() + sizeof(float) * bin0);
  out_.put_array<float>(bands.weight());
  for (std::size_t i = 0; i < bands.mask().size(); ++i) {
    const std::size_t g = bin0 + i;
    const std::uint8_t bit = std::uint8_t(1u << (g % 8));
    packed_mask_[g / 8] = bands.mask()[i] ? (packed_mask_[g / 8] | bit) : (packed_mask_[g / 8] & ~bit);
  }
  for (int b = 0; b < d.n_lambda; ++b) written_[first + b] = 1;
}

void TableFileWriter::finish() {
  if (std::find(written_.begin(), written_.end(), 0) != written_.end()) {
    throw Error(ErrorCode::DimMismatch, "table file finished before every band was written");
  }
  out_.seek(kHeaderBytes + header_.dims.payload_bytes() + sizeof(float) * header_.dims.bins());
  out_.put_array<std::uint8_t>(packed_mask_);
  out_.finish();
}

}  // namespace hpbrdf
