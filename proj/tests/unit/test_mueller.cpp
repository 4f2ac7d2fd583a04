// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "hpbrdf/mueller.hpp"
#include "support.hpp"

using namespace hpbrdf;
using hpbrdf::testing::kPi;

namespace {

Muellerd rows(std::initializer_list<double> v) {
  Muellerd m;
  auto it = v.begin();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = *it++;
  return m;
}

}  // namespace

TEST_CASE("linear polarizer at canonical angles") {
  CHECK(lp_mueller(0.0).isApprox(rows({.5, .5, 0, 0, .5, .5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}), 1e-15));
  CHECK((lp_mueller(kPi / 4) - rows({.5, 0, .5, 0, 0, 0, 0, 0, .5, 0, .5, 0, 0, 0, 0, 0})).norm() < 1e-15);
  CHECK((lp_mueller(kPi / 2) - rows({.5, -.5, 0, 0, -.5, .5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})).norm() < 1e-15);
}

TEST_CASE("polarizer is idempotent and crossed pair blocks") {
  for (double a : {0.0, 0.3, 1.1, 2.5}) {
    CHECK((lp_mueller(a) * lp_mueller(a) - lp_mueller(a)).norm() < 1e-14);
    CHECK((lp_mueller(a + kPi / 2) * lp_mueller(a)).norm() < 1e-14);
  }
}

TEST_CASE("quarter-wave retarder") {
  const Muellerd q = retarder_mueller(0.0, kPi / 2);
  CHECK((q - rows({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0})).norm() < 1e-15);
  const Stokesd out = retarder_mueller(kPi / 4, kPi / 2) * Stokesd(1, 1, 0, 0);
  CHECK(std::abs(out(3)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(out(1) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("half-wave retarder mirrors linear polarization about its axis") {
  const Stokesd out = retarder_mueller(kPi / 8, kPi) * Stokesd(1, 1, 0, 0);
  CHECK(out(1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(out(2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("frame rotation forms a group") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const double a = testing::uniform(rng, -kPi, kPi);
    const double b = testing::uniform(rng, -kPi, kPi);
    CHECK((frame_rotation(a) * frame_rotation(b) - frame_rotation(a + b)).norm() < 1e-13);
    CHECK((frame_rotation(a) * frame_rotation(-a) - Muellerd::Identity()).norm() < 1e-13);
    CHECK((frame_rotation(a + kPi) - frame_rotation(a)).norm() < 1e-13);
  }
}

TEST_CASE("rotated elements agree with the explicit polarizer formula") {
  for (double a : {0.1, 0.7, 2.0}) {
    const Muellerd rotated = frame_rotation(-a) * lp_mueller(0.0) * frame_rotation(a);
    CHECK((rotated - lp_mueller(a)).norm() < 1e-14);
  }
}

TEST_CASE("admissibility") {
  CHECK(is_admissible(Stokesd(1, 1, 0, 0)));
  CHECK(is_admissible(Stokesd(1, 0, 0, 0)));
  CHECK_FALSE(is_admissible(Stokesd(1, .6, .6, .6)));
  CHECK_FALSE(is_admissible(Stokesd(-1, 0, 0, 0)));
  CHECK(is_admissible(Stokesd(0, 0, 0, 0)));
}

TEST_CASE("degree of polarization") {
  CHECK(dop(Stokesd(1, .3, .4, 0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dop(Stokesd(2, 0, 0, 2)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(dop(Stokesd(0, 0, 0, 0)), Error);
}

TEST_CASE("Givens-Kostinski known cases") {
  CHECK(is_physical_gk(Muellerd(Muellerd::Identity())).physical);
  CHECK(is_physical_gk(depolarizer_mueller(1.0)).physical);
  CHECK(is_physical_gk(Muellerd(Muellerd::Zero())).physical);
  CHECK(is_physical_gk(lp_mueller(0.4)).physical);
  CHECK(is_physical_gk(retarder_mueller(0.2, 1.3)).physical);
  Muellerd bad = Muellerd::Identity();
  bad(0, 1) = 1.5;
  CHECK_FALSE(is_physical_gk(bad).physical);
  CHECK_FALSE(is_physical_gk(Muellerd(-Muellerd::Identity())).physical);
  CHECK_THROWS_AS(is_physical_gk(Muellerd(Muellerd::Constant(std::nan("")))), Error);
}

TEST_CASE("products of physical elements are physical") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Muellerd m = testing::random_physical(rng);
    const GkResult r = is_physical_gk(m);
    CHECK(r.physical);
    CHECK(testing::brute_force_physical(m));
  }
}

TEST_CASE("Givens-Kostinski agrees with brute force on random matrices") {
  std::mt19937_64 rng(5);
  int disagreements = 0;
  int physical = 0;
  for (int i = 0; i < 500; ++i) {
    Muellerd m;
    for (int e = 0; e < 16; ++e) m(e / 4, e % 4) = testing::uniform(rng, -1.0, 1.0);
    const bool gk = is_physical_gk(m).physical;
    physical += gk;
    if (gk != testing::brute_force_physical(m)) ++disagreements;
  }
  CHECK(disagreements == 0);
  MESSAGE("physical among random: " << physical);
}

TEST_CASE("float and double scalars agree") {
  const Muellerf f = retarder_mueller(0.3f, 1.2f);
  const Muellerd d = retarder_mueller(0.3, 1.2);
  CHECK((f.cast<double>() - d).norm() < 1e-6);
  CHECK(is_physical_gk(f).physical);
}
