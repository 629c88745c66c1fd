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

#include <compare>
#include <cstdlib>
#include <functional>
#include <ostream>

namespace resp {

/// Integer Fourier mode nu = (n1, n2) on the two-torus.
struct Mode {
  int n1 = 0;
  int n2 = 0;

  constexpr bool is_zero() const { return n1 == 0 && n2 == 0; }
  constexpr int l1() const { return std::abs(n1) + std::abs(n2); }
  constexpr int linf() const { return std::abs(n1) > std::abs(n2) ? std::abs(n1) : std::abs(n2); }

  friend constexpr Mode operator+(Mode a, Mode b) { return {a.n1 + b.n1, a.n2 + b.n2}; }
  friend constexpr Mode operator-(Mode a, Mode b) { return {a.n1 - b.n1, a.n2 - b.n2}; }
  friend constexpr Mode operator-(Mode a) { return {-a.n1, -a.n2}; }
  friend constexpr bool operator==(Mode, Mode) = default;
  friend constexpr auto operator<=>(Mode, Mode) = default;
  Mode& operator+=(Mode o) {
    n1 += o.n1;
    n2 += o.n2;
    return *this;
  }
};

inline std::ostream& operator<<(std::ostream& os, Mode m) {
  return os << '(' << m.n1 << ',' << m.n2 << ')';
}

}  // namespace resp

template <>
struct std::hash<resp::Mode> {
  std::size_t operator()(resp::Mode m) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(m.n1) << 32) ^ static_cast<unsigned>(m.n2));
  }
};
