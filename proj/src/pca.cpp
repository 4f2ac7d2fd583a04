// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>

#include <Eigen/SVD>

#include "hpbrdf/analysis.hpp"
#include "hpbrdf/error.hpp"

namespace hpbrdf {

TableAxis parse_table_axis(const std::string& name) {
  if (name == "lambda") return TableAxis::Lambda;
  if (name == "phi_d") return TableAxis::PhiD;
  if (name == "theta_d") return TableAxis::ThetaD;
  if (name == "theta_h") return TableAxis::ThetaH;
  throw Error(ErrorCode::InvalidConfig, "unknown table axis '" + name + "' (lambda, phi_d, theta_d, theta_h)");
}

std::string table_axis_name(TableAxis axis) {
  switch (axis) {
    case TableAxis::Lambda: return "lambda";
    case TableAxis::PhiD: return "phi_d";
    case TableAxis::ThetaD: return "theta_d";
    case TableAxis::ThetaH: return "theta_h";
  }
  return "?";
}

Eigen::MatrixXd pca_samples(const HpbrdfTable& table, const PcaSliceSpec& spec) {
  if (spec.first == spec.second) throw Error(ErrorCode::InvalidConfig, "PCA slice axes must differ");
  const TableDims& d = table.dims();
  const std::array<int, 4> extent{d.n_lambda, d.n_phi_d - 1, d.n_theta_d, d.n_theta_h};
  const int fa = static_cast<int>(spec.first);
  const int fb = static_cast<int>(spec.second);
  std::array<int, 2> rest{};
  int r = 0;
  for (int a = 0; a < 4; ++a)
    if (a != fa && a != fb) rest[r++] = a;

  const Eigen::Index features = Eigen::Index(extent[fa]) * extent[fb];
  const Eigen::Index samples = Eigen::Index(extent[rest[0]]) * extent[rest[1]] * 16;
  Eigen::MatrixXd out(samples, features);
  std::array<int, 4> idx{};
  for (int r0 = 0; r0 < extent[rest[0]]; ++r0) {
    for (int r1 = 0; r1 < extent[rest[1]]; ++r1) {
      for (int a = 0; a < extent[fa]; ++a) {
        for (int b = 0; b < extent[fb]; ++b) {
          idx[rest[0]] = r0;
          idx[rest[1]] = r1;
          idx[fa] = a;
          idx[fb] = b;
          const std::size_t bin = table.bin(idx[0], idx[1], idx[2], idx[3]);
          const float* p = table.data().data() + 16 * bin;
          const double m00 = p[0];
          const Eigen::Index row = (Eigen::Index(r0) * extent[rest[1]] + r1) * 16;
          const Eigen::Index col = Eigen::Index(a) * extent[fb] + b;
          out(row, col) = m00;
          for (int e = 1; e < 16; ++e) out(row + e, col) = m00 > 0 ? p[e] / m00 : 0.0;
        }
      }
    }
  }
  return out;
}

PcaResult pca(const Eigen::MatrixXd& samples, int n_components) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index f = samples.cols();
  if (n < 2 || f < 1) throw Error(ErrorCode::InsufficientSamples, "PCA needs at least two samples");
  if (n_components < 1 || n_components > std::min(n - 1, f)) {
    throw Error(ErrorCode::InsufficientSamples, "cannot extract " + std::to_string(n_components) +
                                                    " components from " + std::to_string(n) + " samples x " +
                                                    std::to_string(f) + " features");
  }
  PcaResult r;
  r.samples = n;
  r.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - r.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd var = svd.singularValues().array().square() / double(n - 1);
  r.total_variance = var.sum();
  r.components = svd.matrixV().leftCols(n_components);
  r.explained_variance = var.head(n_components);
  r.explained_ratio = r.total_variance > 0 ? Eigen::VectorXd(r.explained_variance / r.total_variance)
                                           : Eigen::VectorXd::Zero(n_components);
  // Sign convention: largest-magnitude loading positive.
  for (Eigen::Index k = 0; k < r.components.cols(); ++k) {
    Eigen::Index arg = 0;
    r.components.col(k).cwiseAbs().maxCoeff(&arg);
    if (r.components(arg, k) < 0) r.components.col(k) *= -1.0;
  }
  return r;
}

double pca_reconstruction_error(const PcaResult& r, const Eigen::MatrixXd& samples, int k) {
  k = std::clamp(k, 0, static_cast<int>(r.components.cols()));
  const Eigen::MatrixXd centered = samples.rowwise() - r.mean.transpose();
  const Eigen::MatrixXd basis = r.components.leftCols(k);
  const Eigen::MatrixXd residual = centered - (centered * basis) * basis.transpose();
  return residual.squaredNorm() / double(samples.size());
}

}  // namespace hpbrdf
