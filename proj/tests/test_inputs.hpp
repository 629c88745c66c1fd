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


// Shared inputs for the test suites.

#pragma once

#include <string>

#include "resp/contfrac.hpp"

namespace resp::testing {

// e to 210 fractional digits (mpmath, 260-digit working precision).
inline const std::string kEDigits =
    "2.718281828459045235360287471352662497757247093699959574966967627724076630353547594571382178525166427427466391932003059921817413596629043572900334295260595630738132328627943490763233829880753195251019011573834187930";

inline PartialQuotientSource e_from_200_digits() { return PartialQuotientSource::decimal(kEDigits, 200); }

// a_0 = 0, a_k = 2^k.
inline PartialQuotientSource liouville_pow2() {
  return PartialQuotientSource::sequence(
      [](std::size_t k) { return k == 0 ? BigInt(0) : BigInt(1) << k; }, "a_k=2^k");
}

// a_0 = 0, a_k = 2^(2^k).
inline PartialQuotientSource double_exponential() {
  return PartialQuotientSource::sequence(
      [](std::size_t k) { return k == 0 ? BigInt(0) : BigInt(1) << (std::size_t{1} << k); }, "a_k=2^(2^k)");
}

// a_0 = 0, a_k = k!.
inline PartialQuotientSource factorial_quotients() {
  return PartialQuotientSource::sequence(
      [](std::size_t k) {
        BigInt f = 1;
        for (std::size_t i = 2; i <= k; ++i) f *= i;
        return k == 0 ? BigInt(0) : f;
      },
      "a_k=k!");
}

}  // namespace resp::testing
