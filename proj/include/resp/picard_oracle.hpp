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

#include <map>
#include <vector>

#include "resp/model.hpp"

namespace resp {

using SparseField = std::map<Mode, cplx>;

/// Order-by-order coefficients of the bookkeeping expansion
///   W = lambda (eps G f_{nu != 0} + zeta delta_0) - lambda eps G sum_p g_p W^p,
/// G = 1 / (i w.nu (1 + i eps w.nu)) for nu != 0 and 1 at nu = 0, obtained by
/// K rounds of Picard iteration on polynomials in lambda truncated at
/// lambda^K. Returns W^{[0..K]}. Independent of the tree code.
inline std::vector<SparseField> picard_bookkeeping(const ModelSpec& spec, double eps, double zeta, int K) {
  std::map<Mode, cplx> G;
  auto prop = [&](Mode m) -> cplx {
    if (m.is_zero()) return 1.0;
    auto it = G.find(m);
    if (it != G.end()) return it->second;
    const double x = small_divisor(spec.alpha, m, 1e-15).signed_value();
    return G[m] = 1.0 / bare_divisor(x, eps);
  };
  using Poly = std::vector<SparseField>;  // index = power of lambda
  auto mul = [&](const Poly& a, const Poly& b) {
    Poly out(static_cast<std::size_t>(K) + 1);
    for (int i = 0; i <= K; ++i)
      for (int j = 0; i + j <= K; ++j)
        for (const auto& [ma, va] : a[i])
          for (const auto& [mb, vb] : b[j]) out[i + j][ma + mb] += va * vb;
    return out;
  };
  Poly source(static_cast<std::size_t>(K) + 1);
  for (Mode m : spec.f.support())
    if (!m.is_zero()) source[1][m] += eps * spec.f[m] * prop(m);
  if (K >= 1) source[1][{0, 0}] += zeta;

  Poly W(static_cast<std::size_t>(K) + 1);
  for (int round = 0; round < K; ++round) {
    Poly next = source;
    Poly power(static_cast<std::size_t>(K) + 1);
    power[0][{0, 0}] = 1.0;
    for (std::size_t p = 1; p < spec.g_coeffs.size(); ++p) {
      power = mul(power, W);
      const double gp = spec.g_coeffs[p];
      if (gp == 0.0) continue;
      for (int j = 0; j + 1 <= K; ++j)
        for (const auto& [m, v] : power[j]) next[j + 1][m] += -eps * gp * prop(m) * v;
    }
    W = std::move(next);
  }
  return W;
}

inline cplx sparse_at(const SparseField& f, Mode m) {
  auto it = f.find(m);
  return it == f.end() ? cplx{} : it->second;
}

}  // namespace resp
