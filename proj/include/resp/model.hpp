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

#pragma once

#include <cmath>
#include <vector>

#include "resp/contfrac.hpp"
#include "resp/fourier.hpp"

namespace resp {

/// eps x'' + x' + eps g(x) = eps f(omega t), omega = (1, alpha), with g
/// expanded at c. g_coeffs[p] is the p-th Taylor coefficient; g(c) is not
/// stored and is taken equal to f_0.
struct ModelSpec {
  int goth_n = 3;
  double c = 0.0;
  std::vector<double> g_coeffs{0.0, 0.0, 0.0, 1.0};
  FourierField f = FourierField(1);
  double xi = 1.0;
  PartialQuotientSource alpha = PartialQuotientSource::golden();

  double f0() const { return f.at({0, 0}).real(); }
  /// Sum of |f_nu|.
  double phi_f() const { return f.l1_norm(); }
  Polynomial g() const { return {f0(), g_coeffs}; }
  /// g(c + x) - g(c)
  Polynomial g_relative() const { return {0.0, g_coeffs}; }
  double g_lead() const { return static_cast<std::size_t>(goth_n) < g_coeffs.size() ? g_coeffs[goth_n] : 0.0; }

  void validate() const {
    if (goth_n < 1) fail(ErrorKind::InvalidArgument, "goth_n must be >= 1");
    if (g_coeffs.size() <= static_cast<std::size_t>(goth_n) || g_coeffs[goth_n] == 0.0)
      fail(ErrorKind::InvalidArgument, "g_n must be nonzero for n = goth_n");
    for (int j = 1; j < goth_n; ++j)
      if (g_coeffs[j] != 0.0) fail(ErrorKind::InvalidArgument, "g_j must vanish for 1 <= j < goth_n");
    for (double v : g_coeffs)
      if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "non-finite g coefficient");
    if (f.reality_defect() > 1e-14 * std::max(1.0, f.max_abs()))
      fail(ErrorKind::InvalidArgument, "forcing f is not real");
    if (!(xi > 0)) fail(ErrorKind::InvalidArgument, "xi must be positive");
  }

  /// [g(c + zeta + u)]_nu including nu = 0.
  FourierField compose_g(double zeta, const FourierField& u) const { return compose_poly(g(), zeta, u); }
};

/// g = x^n at c = 0, f = cos psi1 + cos psi2.
inline ModelSpec monomial_model(int goth_n, const PartialQuotientSource& alpha = PartialQuotientSource::golden()) {
  ModelSpec m;
  m.goth_n = goth_n;
  m.g_coeffs.assign(static_cast<std::size_t>(goth_n) + 1, 0.0);
  m.g_coeffs[goth_n] = 1.0;
  m.f = FourierField::cosine(1, {1, 0}) + FourierField::cosine(1, {0, 1});
  m.alpha = alpha;
  return m;
}

/// omega . nu for every mode in a truncation, from one certified alpha
/// enclosure (refined per mode only when needed).
class DivisorTable {
 public:
  DivisorTable() = default;
  DivisorTable(const PartialQuotientSource& alpha, int N, unsigned bits = 256, double rel_tol = 1e-15) : N_(N) {
    const int s = 2 * N + 1;
    values_.assign(static_cast<std::size_t>(s) * s, 0.0);
    const Enclosure a = alpha_enclosure(alpha, bits);
    for (int n1 = -N; n1 <= N; ++n1)
      for (int n2 = -N; n2 <= N; ++n2) {
        const Mode m{n1, n2};
        if (m.is_zero()) continue;
        auto d = small_divisor_from(a, m, rel_tol);
        if (!d) {
          try {
            d = small_divisor(alpha, m, rel_tol);
          } catch (const Error&) {
            fail(ErrorKind::DivisorUnderflow, "omega . nu not resolved for nu = (" + std::to_string(n1) + "," +
                                                  std::to_string(n2) + ")");
          }
        }
        values_[index(m)] = d->signed_value();
      }
  }

  int N_modes() const { return N_; }
  double operator()(Mode m) const { return values_[index(m)]; }

 private:
  std::size_t index(Mode m) const {
    return static_cast<std::size_t>((m.n1 + N_) * (2 * N_ + 1) + (m.n2 + N_));
  }
  int N_ = 0;
  std::vector<double> values_;
};

/// (C1 / 4) eps^{1/(n+1)}
inline double scale_threshold(double C1, double eps, int goth_n) {
  return C1 / 4.0 * std::pow(eps, 1.0 / (goth_n + 1));
}

/// i x (1 + i eps x)
inline cplx bare_divisor(double x, double eps) { return cplx(0.0, x) * cplx(1.0, eps * x); }

}  // namespace resp
