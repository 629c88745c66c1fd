// Copyright 2026 The resp Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "resp/model.hpp"

namespace resp {
namespace {

FourierField random_real_field(int N, std::mt19937& rng, bool zero_mean = false) {
  std::normal_distribution<double> nd;
  FourierField u(N, zero_mean);
  for (Mode m : u.modes()) {
    if (m < -m || (zero_mean && m.is_zero())) continue;
    u.set_real_pair(m, {nd(rng), m.is_zero() ? 0.0 : nd(rng)});
  }
  return u;
}

TEST(Multiply, SingleModes) {
  FourierField a(2), b(2);
  a[Mode(1, 0)] = 1.0;
  b[Mode(-1, 0)] = 1.0;
  const auto p = multiply(a, b);
  EXPECT_NEAR(std::abs(p[Mode(0, 0)] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(p.l1_norm(), 1.0, 1e-14);
}

TEST(Multiply, DoubleAngle) {
  const auto c = FourierField::cosine(3, {1, 0});
  const auto p = multiply(c, c);
  EXPECT_NEAR(p[Mode(0, 0)].real(), 0.5, 1e-15);
  EXPECT_NEAR(p[Mode(2, 0)].real(), 0.25, 1e-15);
  EXPECT_NEAR(p[Mode(-2, 0)].real(), 0.25, 1e-15);
  EXPECT_NEAR(p.l1_norm(), 1.0, 1e-14);
}

class MultiplyOracle : public ::testing::TestWithParam<int> {};

TEST_P(MultiplyOracle, MatchesDirectConvolution) {
  const int N = GetParam();
  std::mt19937 rng(1234 + N);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_real_field(N, rng);
    const auto b = random_real_field(N, rng);
    const auto fast = multiply(a, b);
    const auto slow = multiply_direct(a, b);
    EXPECT_LE(max_abs_diff(fast, slow), 1e-13 * slow.max_abs());
    EXPECT_LE(fast.reality_defect(), 1e-14 * fast.max_abs());
  }
}

INSTANTIATE_TEST_SUITE_P(Radii, MultiplyOracle, ::testing::Values(1, 2, 4, 6));

TEST(Compose, ZeroFieldIsConstant) {
  Polynomial g{0.7, {0.0, 0.0, 0.0, 2.0, 0.0, -1.5}};
  const double z = 0.3;
  const auto r = compose_poly(g, z, FourierField(4, true));
  EXPECT_NEAR(r[Mode(0, 0)].real(), 0.7 + 2.0 * std::pow(z, 3) - 1.5 * std::pow(z, 5), 1e-15);
  for (Mode m : r.support()) {
    if (!m.is_zero()) {
      EXPECT_LT(std::abs(r[m]), 1e-16);
    }
  }
}

TEST(Compose, CubeOfCosine) {
  const double eps = 0.01;
  Polynomial g{0.0, {0.0, 0.0, 0.0, 1.0}};
  const auto u = FourierField::cosine(3, {1, 0}, eps);
  const auto r = compose_poly(g, 0.0, u);
  EXPECT_NEAR(r[Mode(1, 0)].real(), 3.0 * eps * eps * eps / 8.0, 1e-20);
  EXPECT_NEAR(r[Mode(3, 0)].real(), eps * eps * eps / 8.0, 1e-20);
  EXPECT_NEAR(std::abs(r[Mode(2, 0)]), 0.0, 1e-20);
}

TEST(Compose, MatchesBinomialOracle) {
  std::mt19937 rng(99);
  Polynomial g{0.25, {0.0, 0.0, 0.0, 1.0, -0.5, 0.2}};
  for (int N : {2, 3, 5}) {
    auto u = random_real_field(N, rng, true);
    u *= 0.2;
    const auto fast = compose_poly(g, 0.15, u);
    const auto slow = compose_poly_direct(g, 0.15, u);
    EXPECT_LE(max_abs_diff(fast, slow), 1e-13 * slow.max_abs()) << N;
    EXPECT_LE(fast.reality_defect(), 1e-14 * fast.max_abs());
  }
}

TEST(Compose, ZetaDerivativeIsComposedDerivative) {
  std::mt19937 rng(5);
  Polynomial g{0.0, {0.0, 0.0, 0.0, 1.0, 0.0, 0.3}};
  auto u = random_real_field(3, rng, true);
  u *= 0.3;
  const double z = 0.1, h = 1e-6;
  const auto fd = (1.0 / (2 * h)) * (compose_poly(g, z + h, u) - compose_poly(g, z - h, u));
  const auto exact = compose_poly(g.derivative(), z, u);
  EXPECT_LE(max_abs_diff(fd, exact), 1e-6 * exact.max_abs());
}

TEST(SupNorm, Basics) {
  EXPECT_NEAR(sup_norm(FourierField::cosine(2, {1, 0}), 64), 1.0, 1e-10);
  EXPECT_EQ(sup_norm(FourierField(3), 64), 0.0);
  std::mt19937 rng(3);
  const auto a = random_real_field(3, rng), b = random_real_field(3, rng);
  EXPECT_LE(sup_norm(a + b, 64), sup_norm(a, 64) + sup_norm(b, 64) + 1e-12);
  double prev = 0;
  for (int M : {4, 8, 13, 16, 32, 64, 100, 128}) {
    const double s = sup_norm(a, M);
    EXPECT_GE(s, prev);
    prev = s;
  }
}

TEST(SupNorm, CoarseGridFoldsModes) {
  // M smaller than the mode range: values still exact at grid points.
  FourierField u(5);
  u.set_real_pair({5, 3}, {0.3, -0.2});
  u.set_real_pair({1, 0}, {0.5, 0.0});
  const int M = 4;
  double ref = 0;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      ref = std::max(ref, std::abs(u.evaluate(2 * std::numbers::pi * i / M, 2 * std::numbers::pi * j / M)));
  EXPECT_NEAR(sup_norm(u, M), ref, 1e-14);
}

TEST(Parseval, GridMeanSquare) {
  std::mt19937 rng(11);
  const auto u = random_real_field(5, rng);
  EXPECT_NEAR(grid_mean_square(u, 16), u.l2_squared(), 1e-12 * u.l2_squared());
}

TEST(DecayFit, ExactExponential) {
  FourierField u(6, true);
  for (Mode m : u.modes())
    if (!m.is_zero()) u[m] = std::exp(-2.0 * m.l1());
  const auto fit = decay_fit(u);
  EXPECT_NEAR(fit.rate, 2.0, 1e-8);
  EXPECT_NEAR(fit.amplitude, 1.0, 1e-8);
}

TEST(DecayFit, TooFewShells) {
  FourierField u(3);
  u[Mode(1, 0)] = 1.0;
  u[Mode(0, 1)] = 1.0;
  try {
    decay_fit(u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewShells);
  }
}

TEST(Model, Validation) {
  auto m = monomial_model(3);
  EXPECT_NO_THROW(m.validate());
  m.g_coeffs[1] = 0.1;
  EXPECT_THROW(m.validate(), Error);
  m = monomial_model(3);
  m.g_coeffs[3] = 0.0;
  EXPECT_THROW(m.validate(), Error);
  m = monomial_model(3);
  m.f[Mode(1, 0)] = {0.5, 0.1};
  EXPECT_THROW(m.validate(), Error);
}

TEST(Model, ComposeIncludesGc) {
  auto m = monomial_model(3);
  m.f[Mode(0, 0)] = 0.4;
  const auto r = m.compose_g(0.5, FourierField(2, true));
  EXPECT_NEAR(r[Mode(0, 0)].real(), 0.4 + 0.125, 1e-15);
}

TEST(Divisors, MatchCertifiedSmallDivisor) {
  const auto src = PartialQuotientSource::golden();
  const DivisorTable d(src, 8);
  for (Mode m : {Mode{1, 0}, Mode{-1, 1}, Mode{8, -5}, Mode{-3, 5}, Mode{0, -8}}) {
    EXPECT_DOUBLE_EQ(d(m), small_divisor(src, m, 1e-15).signed_value()) << m;
  }
  EXPECT_NEAR(d(Mode(-8, 5)), 5 * (1 + std::sqrt(5.0)) / 2 - 8, 1e-14);
}

TEST(Divisors, ScaleThreshold) {
  EXPECT_NEAR(scale_threshold(2.0, 1e-4, 3), 0.5 * 0.1, 1e-15);
}

}  // namespace
}  // namespace resp
