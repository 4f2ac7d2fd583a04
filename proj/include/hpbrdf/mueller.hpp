// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

/// Stokes/Mueller algebra: ideal optical elements, reference-frame rotation
/// and the physical-validity tests used throughout the pipeline.
///
/// Sign conventions (fixed library-wide):
///  - frame_rotation(psi) re-expresses a Stokes vector in a frame whose
///    x axis is rotated by +psi about the propagation direction.
///  - An element with axis `a` is obtained as R(-a) * M0 * R(a).
///  - The retarder at axis 0 carries +sin(delta) in row 2, column 3, so
///    s3 > 0 is right-circular as seen from the receiver.

#pragma once

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hpbrdf/error.hpp"
#include "hpbrdf/types.hpp"

namespace hpbrdf {

template <typename Scalar>
Mueller<Scalar> frame_rotation(Scalar psi) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(Scalar(2) * psi);
  const Scalar s = sin(Scalar(2) * psi);
  Mueller<Scalar> m;
  m << 1, 0, 0, 0,
       0, c, s, 0,
       0, -s, c, 0,
       0, 0, 0, 1;
  return m;
}

/// Ideal linear polarizer with transmission axis at `angle` from the frame x axis.
template <typename Scalar>
Mueller<Scalar> lp_mueller(Scalar angle) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(Scalar(2) * angle);
  const Scalar s = sin(Scalar(2) * angle);
  Mueller<Scalar> m;
  m << 1, c, s, 0,
       c, c * c, c * s, 0,
       s, c * s, s * s, 0,
       0, 0, 0, 0;
  return Scalar(0.5) * m;
}

/// Linear retarder with fast axis at `fast_axis` and phase delay `retardance`.
template <typename Scalar>
Mueller<Scalar> retarder_mueller(Scalar fast_axis, Scalar retardance) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(retardance);
  const Scalar s = sin(retardance);
  Mueller<Scalar> m0;
  m0 << 1, 0, 0, 0,
        0, 1, 0, 0,
        0, 0, c, s,
        0, 0, -s, c;
  return frame_rotation(-fast_axis) * m0 * frame_rotation(fast_axis);
}

/// Ideal depolarizer scaled by `transmittance`.
template <typename Scalar>
Mueller<Scalar> depolarizer_mueller(Scalar transmittance) {
  Mueller<Scalar> m = Mueller<Scalar>::Zero();
  m(0, 0) = transmittance;
  return m;
}

/// Minkowski metric diag(1, -1, -1, -1).
template <typename Scalar>
Mueller<Scalar> minkowski_metric() {
  return Eigen::Matrix<Scalar, 4, 1>(1, -1, -1, -1).asDiagonal();
}

/// Default relative tolerance for is_admissible.
inline constexpr double kAdmissibilityEps = 1e-9;

/// s0 >= 0 and s0^2 - |s_{1..3}|^2 >= -eps * s0^2.
template <typename Scalar>
bool is_admissible(const Stokes<Scalar>& s, Scalar eps = Scalar(kAdmissibilityEps)) {
  const Scalar s0 = s(0);
  if (s0 < Scalar(0)) return false;
  const Scalar pol = s.template tail<3>().squaredNorm();
  return s0 * s0 - pol >= -eps * s0 * s0;
}

/// Degree of polarization; throws ZeroIntensity when s0 <= 0.
template <typename Scalar>
Scalar dop(const Stokes<Scalar>& s) {
  if (!(s(0) > Scalar(0))) throw Error(ErrorCode::ZeroIntensity, "dop: s0 <= 0");
  return s.template tail<3>().norm() / s(0);
}

struct GkOptions {
  /// Imaginary parts below imag_tol * |N| count as real.
  double imag_tol = 1e-7;
  /// Eigenvalues within degeneracy_tol * |N| of the largest share its eigenspace.
  double degeneracy_tol = 1e-7;
  /// Relative admissibility tolerance for the test vector and the first row.
  double admissibility_eps = 1e-9;
};

struct GkDiagnostics {
  std::array<std::complex<double>, 4> eigenvalues{};
  Stokesd test_vector = Stokesd::Zero();
  bool real_spectrum = false;
  bool test_vector_admissible = false;
  /// First row inside the forward light cone (m00 >= |m01..m03|).
  bool forward_first_row = false;
};

struct GkResult {
  bool physical = false;
  GkDiagnostics diagnostics;
};

/// Givens-Kostinski test. N = G M^T G M must have a real spectrum and the
/// eigenspace of its largest eigenvalue must contain an admissible Stokes
/// vector. The first row of M is additionally required to lie in the
/// forward cone, which rules out matrices that map the cone onto its
/// negative (e.g. -I, for which N = I).
template <typename Scalar>
GkResult is_physical_gk(const Mueller<Scalar>& m_in, const GkOptions& options = {}) {
  Muellerd m = m_in.template cast<double>();
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "is_physical_gk: non-finite entries");
  // The test is invariant under positive scaling; unit norm keeps N out of
  // the subnormal range.
  if (const double norm = m.norm(); norm > 0) m /= norm;
  const Muellerd g = minkowski_metric<double>();
  const Muellerd n = g * m.transpose() * g * m;

  // Floor keeps an exactly-zero N (rank-one polarizers) from turning
  // round-off into "complex" eigenvalues.
  const double scale = std::max(n.norm(), 1e-13 * m.squaredNorm());

  GkResult result;
  auto& diag = result.diagnostics;
  const double m00 = m(0, 0);
  const double row_pol = m.row(0).tail<3>().norm();
  diag.forward_first_row =
      m00 >= 0 && m00 * m00 - row_pol * row_pol >= -options.admissibility_eps * m00 * m00 -
                                                       1e-14 * m.squaredNorm();

  if (scale == 0.0) {
    // M = 0 maps everything to the zero vector, which is admissible.
    diag.real_spectrum = true;
    diag.test_vector_admissible = true;
    diag.test_vector = Stokesd(1, 0, 0, 0);
    result.physical = diag.forward_first_row;
    return result;
  }

  Eigen::EigenSolver<Muellerd> solver(n, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "is_physical_gk: eigensolver did not converge");
  }
  const Eigen::Vector4cd values = solver.eigenvalues();
  for (int i = 0; i < 4; ++i) diag.eigenvalues[i] = values(i);

  diag.real_spectrum = (values.imag().cwiseAbs().array() <= options.imag_tol * scale).all();
  if (!diag.real_spectrum) return result;

  const Eigen::Vector4d re = values.real();
  const double top = re.maxCoeff();
  // Eigenspace of the top eigenvalue as the numerical null space of
  // N - top I; robust when N is (nearly) a multiple of the identity.
  Eigen::JacobiSVD<Muellerd> svd(n - top * Muellerd::Identity(), Eigen::ComputeFullV);
  const Eigen::Vector4d sv = svd.singularValues();
  int dim = 1;
  while (dim < 4 && sv(3 - dim) <= options.degeneracy_tol * scale) ++dim;
  const Eigen::Matrix<double, 4, Eigen::Dynamic> basis = svd.matrixV().rightCols(dim);

  Eigen::Vector4d v;
  if (dim == 1) {
    v = basis.col(0);
  } else {
    // Most time-like direction in the degenerate eigenspace.
    const Eigen::MatrixXd form = basis.transpose() * g * basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(form);
    v = basis * sym.eigenvectors().col(form.cols() - 1);
  }
  if (v(0) < 0) v = -v;
  v.normalize();
  diag.test_vector = v;
  const double lorentz = v(0) * v(0) - v.tail<3>().squaredNorm();
  diag.test_vector_admissible = lorentz >= -options.admissibility_eps - 1e-12;

  result.physical = diag.test_vector_admissible && diag.forward_first_row;
  return result;
}

}  // namespace hpbrdf
