// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace hpbrdf {

/// Stokes vector [s0, s1, s2, s3]. s0 is radiance.
template <typename Scalar>
using Stokes = Eigen::Matrix<Scalar, 4, 1>;

/// 4x4 Mueller matrix acting on Stokes vectors, row-major element access m(r, c).
template <typename Scalar>
using Mueller = Eigen::Matrix<Scalar, 4, 4>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

using Stokesd = Stokes<double>;
using Muellerd = Mueller<double>;
using Muellerf = Mueller<float>;
using Vec3 = Vector3<double>;
using Mat3 = Matrix3<double>;

}  // namespace hpbrdf
