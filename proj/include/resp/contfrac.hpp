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


// Exact continued-fraction arithmetic for frequency vectors omega = (1, alpha).
//
// Every quantity that depends on alpha is either an exact big-integer object
// (partial quotients, convergents) or a certified enclosure: a pair of exact
// rationals known to contain the true value. Floating-point values are only
// ever derived from such enclosures.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "resp/errors.hpp"
#include "resp/mode.hpp"

namespace resp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Natural logarithm of |x| for x != 0, accurate to double precision for any size.
inline double log_abs(const BigInt& x) {
  if (x == 0) fail(ErrorKind::InvalidArgument, "log of zero");
  BigInt a = boost::multiprecision::abs(x);
  const unsigned top = boost::multiprecision::msb(a);
  if (top < 1000) return std::log(a.convert_to<double>());
  const unsigned shift = top - 62;
  a >>= shift;
  return std::log(a.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

inline Rational pow2_neg(unsigned bits) { return Rational(BigInt(1), BigInt(1) << bits); }

/// Interval of exact rationals containing a value. Enclosures of irrational
/// quantities are open, (lo, hi); exactly known values are closed points.
struct Enclosure {
  Rational lo;
  Rational hi;
  bool open = true;

  Rational width() const { return hi - lo; }
  double value() const { return to_double((lo + hi) / 2); }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool excludes_zero() const { return open ? (lo >= 0 || hi <= 0) && hi != lo : (lo > 0 || hi < 0); }
  /// Every point of the enclosure is > x (resp. < x).
  bool above(const Rational& x) const { return open ? lo >= x : lo > x; }
  bool below(const Rational& x) const { return open ? hi <= x : hi < x; }
  /// Width divided by the smallest magnitude in the interval (infinite if 0 is inside).
  double relative_width() const {
    if (!excludes_zero()) return INFINITY;
    const Rational small = lo >= 0 ? lo : -hi;
    if (small == 0) return INFINITY;
    return to_double(width() / small);
  }
};

/// Generator of the simple continued fraction [a_0; a_1, a_2, ...] of alpha.
class PartialQuotientSource {
 public:
  /// a_0 followed by a_1..a_m. Unless strict, the tail is read as eventually
  /// periodic: a_k = a_m for k > m, so alpha is a quadratic irrational.
  struct ExplicitList {
    BigInt a0;
    std::vector<BigInt> tail;
    bool strict = false;
  };
  /// Root of A x^2 + B x + C, sign selects (-B + sign*sqrt(D)) / 2A.
  struct QuadraticIrrational {
    BigInt A;
    BigInt B;
    BigInt C;
    int sign = 1;
  };
  /// Decimal expansion; the first certified_digits fractional digits are exact.
  struct DecimalString {
    std::string digits;
    int certified_digits = 0;
  };
  /// a_k supplied by a callable (k = 0 gives a_0).
  struct Sequence {
    std::function<BigInt(std::size_t)> term;
    std::string name;
  };

  using Variant = std::variant<ExplicitList, QuadraticIrrational, DecimalString, Sequence>;

  explicit PartialQuotientSource(Variant v) : v_(std::move(v)) { validate(); }

  static PartialQuotientSource golden() { return list(1, {1}); }
  static PartialQuotientSource sqrt2() { return list(1, {2}); }
  static PartialQuotientSource list(BigInt a0, std::vector<BigInt> tail, bool strict = false) {
    return PartialQuotientSource(ExplicitList{std::move(a0), std::move(tail), strict});
  }
  static PartialQuotientSource quadratic(BigInt A, BigInt B, BigInt C, int sign = 1) {
    return PartialQuotientSource(QuadraticIrrational{std::move(A), std::move(B), std::move(C), sign});
  }
  static PartialQuotientSource decimal(std::string digits, int certified_digits) {
    return PartialQuotientSource(DecimalString{std::move(digits), certified_digits});
  }
  static PartialQuotientSource sequence(std::function<BigInt(std::size_t)> term, std::string name) {
    return PartialQuotientSource(Sequence{std::move(term), std::move(name)});
  }

  const Variant& variant() const { return v_; }

  std::string describe() const {
    struct {
      std::string operator()(const ExplicitList& l) const {
        std::string s = "[" + l.a0.str() + ";";
        for (std::size_t i = 0; i < l.tail.size(); ++i) s += (i ? "," : "") + l.tail[i].str();
        return s + (l.strict ? "]" : ",...]");
      }
      std::string operator()(const QuadraticIrrational& q) const {
        return "root(" + q.A.str() + "," + q.B.str() + "," + q.C.str() + (q.sign > 0 ? ",+)" : ",-)");
      }
      std::string operator()(const DecimalString& d) const {
        return "decimal(" + std::to_string(d.certified_digits) + " digits)";
      }
      std::string operator()(const Sequence& s) const { return s.name; }
    } visitor;
    return std::visit(visitor, v_);
  }

  /// Lazily produces partial quotients; nullopt once the source cannot certify more.
  class Stream {
   public:
    explicit Stream(const PartialQuotientSource& src) : src_(&src) {
      if (const auto* q = std::get_if<QuadraticIrrational>(&src.v_)) init_quadratic(*q);
      if (const auto* d = std::get_if<DecimalString>(&src.v_)) {
        const auto [lo, hi] = decimal_interval(*d);
        lo_ = lo;
        hi_ = hi;
      }
    }

    std::optional<BigInt> next() {
      const std::size_t k = index_++;
      return std::visit([&](const auto& v) { return produce(v, k); }, src_->v_);
    }

   private:
    std::optional<BigInt> produce(const ExplicitList& l, std::size_t k) {
      if (k == 0) return l.a0;
      if (k <= l.tail.size()) return l.tail[k - 1];
      if (l.strict) return std::nullopt;
      return l.tail.back();
    }

    std::optional<BigInt> produce(const QuadraticIrrational&, std::size_t) {
      // x_k = (P + sqrt(D)) / Q with Q | D - P^2 maintained exactly.
      BigInt a;
      if (Q_ > 0) {
        a = floor_div(P_ + sqrtD_, Q_);
      } else {
        a = floor_div(-P_ - (sqrtD_ + 1), -Q_);
      }
      const BigInt P_next = a * Q_ - P_;
      const BigInt Q_next = (D_ - P_next * P_next) / Q_;
      P_ = P_next;
      Q_ = Q_next;
      return a;
    }

    std::optional<BigInt> produce(const DecimalString&, std::size_t) {
      if (exhausted_) return std::nullopt;
      const BigInt a = floor_rat(lo_);
      if (floor_rat(hi_) != a) {
        exhausted_ = true;
        return std::nullopt;
      }
      const Rational flo = lo_ - a;
      const Rational fhi = hi_ - a;
      if (flo == 0) {
        // Interval touches an integer; the next quotient is not decided.
        exhausted_ = true;
        return a;
      }
      lo_ = 1 / fhi;
      hi_ = 1 / flo;
      return a;
    }

    std::optional<BigInt> produce(const Sequence& s, std::size_t k) {
      BigInt a = s.term(k);
      if (k > 0 && a < 1) fail(ErrorKind::InvalidArgument, "partial quotient a_" + std::to_string(k) + " < 1");
      return a;
    }

    void init_quadratic(const QuadraticIrrational& q) {
      // (-B + s sqrt(D)) / 2A  ==  (P + sqrt(D')) / Q after normalisation.
      D_ = q.B * q.B - 4 * q.A * q.C;
      if (q.sign > 0) {
        P_ = -q.B;
        Q_ = 2 * q.A;
      } else {
        P_ = q.B;
        Q_ = -2 * q.A;
      }
      if ((D_ - P_ * P_) % Q_ != 0) {
        const BigInt m = boost::multiprecision::abs(Q_);
        P_ *= m;
        D_ *= m * m;
        Q_ *= m;
      }
      sqrtD_ = boost::multiprecision::sqrt(D_);
    }

    static BigInt floor_div(const BigInt& a, const BigInt& b) {
      BigInt q = a / b;
      if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
      return q;
    }
    static BigInt floor_rat(const Rational& r) {
      return floor_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
    }

    const PartialQuotientSource* src_;
    std::size_t index_ = 0;
    BigInt P_, Q_, D_, sqrtD_;
    Rational lo_, hi_;
    bool exhausted_ = false;
  };

  Stream stream() const { return Stream(*this); }

  /// First count partial quotients; InsufficientPrecision if not certifiable.
  std::vector<BigInt> quotients(std::size_t count) const {
    std::vector<BigInt> out;
    out.reserve(count);
    Stream s = stream();
    while (out.size() < count) {
      auto a = s.next();
      if (!a) {
        fail(ErrorKind::InsufficientPrecision,
             describe() + " certifies only " + std::to_string(out.size()) + " partial quotients, " +
                 std::to_string(count) + " requested");
      }
      out.push_back(std::move(*a));
    }
    return out;
  }

  /// Number of certifiable partial quotients, capped at cap.
  std::size_t available(std::size_t cap) const {
    Stream s = stream();
    std::size_t n = 0;
    while (n < cap && s.next()) ++n;
    return n;
  }

  /// Exact decimal interval [s - 10^-d, s + 10^-d] for a DecimalString.
  static std::pair<Rational, Rational> decimal_interval(const DecimalString& d) {
    std::string str = d.digits;
    bool negative = false;
    if (!str.empty() && (str[0] == '-' || str[0] == '+')) {
      negative = str[0] == '-';
      str.erase(0, 1);
    }
    const auto dot = str.find('.');
    const std::string ip = str.substr(0, dot);
    std::string fp = dot == std::string::npos ? std::string() : str.substr(dot + 1);
    if (static_cast<int>(fp.size()) < d.certified_digits) {
      fail(ErrorKind::InvalidArgument, "decimal string has fewer fractional digits than certified_digits");
    }
    fp.resize(static_cast<std::size_t>(d.certified_digits));
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(d.certified_digits));
    BigInt mant(ip.empty() ? std::string("0") : ip);
    mant *= scale;
    if (!fp.empty()) mant += BigInt(fp);
    if (negative) mant = -mant;
    return {Rational(mant - 1, scale), Rational(mant + 1, scale)};
  }

 private:
  void validate() const {
    if (const auto* l = std::get_if<ExplicitList>(&v_)) {
      if (l->tail.empty() && !l->strict) fail(ErrorKind::InvalidArgument, "periodic list needs at least one a_k, k >= 1");
      for (const auto& a : l->tail) {
        if (a < 1) fail(ErrorKind::InvalidArgument, "partial quotients a_k (k >= 1) must be positive");
      }
    } else if (const auto* q = std::get_if<QuadraticIrrational>(&v_)) {
      if (q->A == 0) fail(ErrorKind::InvalidArgument, "quadratic coefficient A must be nonzero");
      const BigInt D = q->B * q->B - 4 * q->A * q->C;
      if (D <= 0) fail(ErrorKind::InvalidArgument, "quadratic has no real irrational root");
      const BigInt r = boost::multiprecision::sqrt(D);
      if (r * r == D) fail(ErrorKind::InvalidArgument, "quadratic root is rational");
    } else if (const auto* d = std::get_if<DecimalString>(&v_)) {
      if (d->certified_digits < 1) fail(ErrorKind::InvalidArgument, "certified_digits must be >= 1");
      for (std::size_t i = 0; i < d->digits.size(); ++i) {
        const char c = d->digits[i];
        const bool ok = std::isdigit(static_cast<unsigned char>(c)) || c == '.' || (i == 0 && (c == '-' || c == '+'));
        if (!ok) fail(ErrorKind::InvalidArgument, "bad character in decimal string");
      }
      decimal_interval(*d);
    } else if (const auto* s = std::get_if<Sequence>(&v_)) {
      if (!s->term) fail(ErrorKind::InvalidArgument, "empty sequence generator");
    }
  }

  Variant v_;
};

/// omega = (1, alpha).
struct FrequencyVector {
  PartialQuotientSource alpha;
};

/// k-th convergent p/q of alpha.
struct Convergent {
  std::size_t k = 0;
  BigInt p;
  BigInt q;

  Rational value() const { return Rational(p, q); }
};

/// Convergents p_k/q_k for k = 0..count-1 by the three-term recurrences.
inline std::vector<Convergent> convergents(const PartialQuotientSource& src, std::size_t count) {
  if (count < 1) fail(ErrorKind::InvalidArgument, "count must be >= 1");
  const auto a = src.quotients(count);
  std::vector<Convergent> out;
  out.reserve(count);
  BigInt p_prev2 = 0, p_prev = 1;  // p_{-2}, p_{-1}
  BigInt q_prev2 = 1, q_prev = 0;
  for (std::size_t k = 0; k < count; ++k) {
    BigInt p = a[k] * p_prev + p_prev2;
    BigInt q = a[k] * q_prev + q_prev2;
    p_prev2 = std::exchange(p_prev, p);
    q_prev2 = std::exchange(q_prev, q);
    out.push_back({k, std::move(p), std::move(q)});
  }
  return out;
}

/// Enclosure of alpha of absolute width <= 2^-bits.
inline Enclosure alpha_enclosure(const PartialQuotientSource& src, unsigned bits) {
  const Rational target = pow2_neg(bits);
  if (const auto* d = std::get_if<PartialQuotientSource::DecimalString>(&src.variant())) {
    auto [lo, hi] = PartialQuotientSource::decimal_interval(*d);
    // Tighten with convergents when those are finer than the decimal interval.
    if (hi - lo <= target) return {lo, hi};
  }
  auto s = src.stream();
  BigInt p_prev2 = 0, p_prev = 1, q_prev2 = 1, q_prev = 0;
  std::optional<Rational> last;
  while (true) {
    auto a = s.next();
    if (!a) {
      fail(ErrorKind::InsufficientPrecision,
           src.describe() + " cannot enclose alpha to 2^-" + std::to_string(bits));
    }
    BigInt p = *a * p_prev + p_prev2;
    BigInt q = *a * q_prev + q_prev2;
    p_prev2 = std::exchange(p_prev, p);
    q_prev2 = std::exchange(q_prev, q);
    Rational x(p, q);
    if (last) {
      // alpha lies strictly between consecutive convergents.
      Enclosure e{std::min(*last, x), std::max(*last, x)};
      if (e.width() <= target) return e;
    }
    last = std::move(x);
  }
}

/// Exact bracket of |alpha - p_k/q_k| together with a certified enclosure of it.
struct ApproximationGap {
  std::size_t k = 0;
  Rational bracket_lo;  // 1 / (q_k (q_k + q_{k+1}))
  Rational bracket_hi;  // 1 / (q_k q_{k+1})
  Enclosure value;

  bool strictly_inside() const { return value.above(bracket_lo) && value.below(bracket_hi); }
};

inline ApproximationGap approximation_gap(const PartialQuotientSource& src, std::size_t k) {
  const auto c = convergents(src, k + 2);
  const BigInt& qk = c[k].q;
  const BigInt& qk1 = c[k + 1].q;
  ApproximationGap g;
  g.k = k;
  g.bracket_lo = Rational(BigInt(1), qk * (qk + qk1));
  g.bracket_hi = Rational(BigInt(1), qk * qk1);
  const Rational xk = c[k].value();
  // Need the enclosure width well below the distance to the bracket ends.
  unsigned bits = 64 + 2 * boost::multiprecision::msb(qk1) + 2;
  for (int attempt = 0; attempt < 8; ++attempt, bits *= 2) {
    const Enclosure a = alpha_enclosure(src, bits);
    Rational lo = a.lo - xk, hi = a.hi - xk;
    if (lo < 0 && hi > 0) continue;
    if (hi < 0) {
      lo = -lo;
      hi = -hi;
      std::swap(lo, hi);
    }
    g.value = {lo, hi};
    if (g.strictly_inside()) return g;
  }
  fail(ErrorKind::InsufficientPrecision, "gap enclosure not strictly inside the bracket");
}

/// Certified value of |nu1 + nu2 alpha| with its sign.
struct SmallDivisor {
  Mode nu;
  Enclosure magnitude;
  int sign = 0;
  unsigned bits = 0;

  double value() const { return magnitude.value(); }
  double signed_value() const { return sign * magnitude.value(); }
  double relative_error() const { return magnitude.relative_width(); }
};

/// Evaluates nu . omega against a fixed alpha enclosure; nullopt if the
/// enclosure is too coarse for rel_tol.
inline std::optional<SmallDivisor> small_divisor_from(const Enclosure& alpha, Mode nu, double rel_tol) {
  SmallDivisor d;
  d.nu = nu;
  Rational a = nu.n1 + nu.n2 * alpha.lo;
  Rational b = nu.n1 + nu.n2 * alpha.hi;
  if (a > b) std::swap(a, b);
  const Enclosure v{a, b, alpha.open};
  if (!v.excludes_zero()) return std::nullopt;
  d.sign = v.lo >= 0 ? 1 : -1;
  d.magnitude = d.sign > 0 ? v : Enclosure{-v.hi, -v.lo, v.open};
  if (d.magnitude.relative_width() > rel_tol) return std::nullopt;
  return d;
}

/// |nu . omega| with certified relative error <= rel_tol. Working precision
/// starts at 64 bits and doubles until the bound is met.
inline SmallDivisor small_divisor(const PartialQuotientSource& src, Mode nu, double rel_tol = 1e-3) {
  if (nu.is_zero()) fail(ErrorKind::InvalidArgument, "small_divisor needs nu != 0");
  if (nu.n2 == 0) {
    SmallDivisor d;
    d.nu = nu;
    d.sign = nu.n1 > 0 ? 1 : -1;
    d.magnitude = {Rational(std::abs(nu.n1)), Rational(std::abs(nu.n1)), false};
    return d;
  }
  for (unsigned bits = 64; bits <= (1u << 16); bits *= 2) {
    const Enclosure a = alpha_enclosure(src, bits);
    if (auto d = small_divisor_from(a, nu, rel_tol)) {
      d->bits = bits;
      return *d;
    }
  }
  fail(ErrorKind::InsufficientPrecision, "small divisor not resolved at 65536 bits");
}

/// Outcome of the brute-force check of
///   |nu1 + nu2 alpha| > |alpha q_{n-1} - p_{n-1}| > 1 / (2 q_n)
/// over 0 < |nu2| < q_n, |nu2| != q_{n-1}.
struct BestApproxReport {
  std::size_t n = 0;
  BigInt q_n;
  BigInt q_prev;
  bool vacuous = false;
  bool holds = false;
  Mode minimizer;
  double min_divisor = 0.0;   // min |nu . omega| over the range
  double convergent_gap = 0.0;  // |alpha q_{n-1} - p_{n-1}|
  double half_inverse_q = 0.0;  // 1 / (2 q_n)
  double margin = 0.0;          // min_divisor - convergent_gap
};

inline BestApproxReport verify_best_approx(const PartialQuotientSource& src, std::size_t n,
                                           long long budget = 100000) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "verify_best_approx needs n >= 1");
  const auto c = convergents(src, n + 1);
  BestApproxReport r;
  r.n = n;
  r.q_n = c[n].q;
  r.q_prev = c[n - 1].q;
  if (r.q_n > budget) {
    fail(ErrorKind::BruteForceTooLarge, "q_" + std::to_string(n) + " = " + r.q_n.str() + " exceeds budget");
  }
  const long long qn = r.q_n.convert_to<long long>();
  const long long qprev = r.q_prev.convert_to<long long>();

  // Fixed-point enclosure alpha in [A_lo, A_hi] / 2^bits, outward rounded.
  const unsigned bits = 128 + 4 * boost::multiprecision::msb(r.q_n);
  const Enclosure ae = alpha_enclosure(src, bits + 2);
  const BigInt scale = BigInt(1) << bits;
  auto floor_scaled = [&](const Rational& x) {
    BigInt num = boost::multiprecision::numerator(x) * scale;
    const BigInt& den = boost::multiprecision::denominator(x);
    BigInt q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
  };
  const BigInt A_lo = floor_scaled(ae.lo);
  const BigInt A_hi = floor_scaled(ae.hi) + 1;

  // |m + j alpha| enclosed as [lo, hi] in units of 2^-bits.
  auto distance = [&](long long m, long long j) {
    BigInt a = BigInt(m) * scale + BigInt(j) * A_lo;
    BigInt b = BigInt(m) * scale + BigInt(j) * A_hi;
    if (a > b) std::swap(a, b);
    if (a < 0 && b > 0) return std::pair<BigInt, BigInt>(BigInt(0), std::max(BigInt(-a), b));
    if (b <= 0) return std::pair<BigInt, BigInt>(-b, -a);
    return std::pair<BigInt, BigInt>(a, b);
  };
  auto to_real = [&](const BigInt& x) {
    return std::ldexp(x.convert_to<double>(), -static_cast<int>(bits));
  };

  const auto gap = distance(-c[n - 1].p.convert_to<long long>(), qprev);
  r.convergent_gap = to_real((gap.first + gap.second) / 2);
  r.half_inverse_q = 0.5 / static_cast<double>(qn);
  // 1/(2 q_n) in the same units, rounded up.
  const BigInt half = scale / (2 * BigInt(qn)) + 1;
  const bool gap_above_half = gap.first > half;

  bool any = false;
  bool chain_holds = true;
  std::pair<BigInt, BigInt> best;
  for (long long j = 1; j < qn; ++j) {
    if (j == qprev) continue;
    const double approx = static_cast<double>(j) * to_double(ae.lo);
    const long long m0 = -static_cast<long long>(std::llround(approx));
    for (long long m = m0 - 1; m <= m0 + 1; ++m) {
      auto d = distance(m, j);
      if (!(d.first > gap.second)) chain_holds = false;
      if (!any || d.second < best.second) {
        best = d;
        r.minimizer = Mode{static_cast<int>(m), static_cast<int>(j)};
        any = true;
      }
    }
  }
  r.vacuous = !any;
  if (any) {
    r.min_divisor = to_real((best.first + best.second) / 2);
    r.margin = r.min_divisor - r.convergent_gap;
  }
  r.holds = r.vacuous || (chain_holds && gap_above_half);
  return r;
}

/// Bryuno terms (log q_{n+1}) / q_n for n = 0..count-1.
inline std::vector<double> brjuno_terms(const PartialQuotientSource& src, std::size_t count) {
  const auto c = convergents(src, count + 1);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    if (c[n + 1].q == 1) {
      out.push_back(0.0);
      continue;
    }
    const double lq = log_abs(c[n + 1].q);
    out.push_back(std::exp(std::log(lq) - log_abs(c[n].q)));
  }
  return out;
}

}  // namespace resp
