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


// Admissible epsilon-sets: the intervals I_n(C, C') = [e^{-C' q_n}, (C q_n)^{-(n+1)}],
// their closures J_N, the optimised intervals frakJ_n = [e^{-C0 q_{N+n}}, a0 / q_{N+n}^n],
// and the classification of the frequency by its convergents.
//
// All endpoint comparisons are made on natural logarithms so that intervals with
// q_n far beyond the double range stay ordered; the double endpoints are reported
// for convenience and underflow to 0 when they must.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "resp/contfrac.hpp"
#include "resp/errors.hpp"

namespace resp {

/// Analyticity and convergence parameters entering the admissible sets.
struct RegularityBudget {
  double xi = 1.0;      // analyticity width of the forcing
  int goth_n = 3;       // order of the zero, odd and >= 3
  double eta0 = 1e-4;   // convergence threshold
  double Phi = 1.0;     // Fourier bound of the forcing
  double Gamma = 1.0;   // sup bound of g on the disk
  double rho = 1.0;     // radius of the disk

  void validate() const {
    if (goth_n < 3 || goth_n % 2 == 0) fail(ErrorKind::InvalidArgument, "goth_n must be odd and >= 3");
    if (!(xi > 0 && eta0 > 0 && Phi > 0 && Gamma > 0 && rho > 0)) {
      fail(ErrorKind::InvalidArgument, "budget scalars must be strictly positive");
    }
  }
};

/// C0 = (n + 1) xi / (4 (n^2 + 2n - 1)), exact in the rational value of xi.
inline Rational compute_C0(const RegularityBudget& b) {
  b.validate();
  const long n = b.goth_n;
  return Rational(n + 1, 4 * (n * n + 2 * n - 1)) * Rational(b.xi);
}

enum class GapStatus { Overlap, Hole, Indeterminate };

inline const char* to_string(GapStatus s) {
  switch (s) {
    case GapStatus::Overlap: return "overlap";
    case GapStatus::Hole: return "hole";
    case GapStatus::Indeterminate: return "indeterminate";
  }
  return "?";
}

/// Relative threshold below which an endpoint comparison is not decided.
inline constexpr double kIndeterminateMargin = 1e-15;

/// Sign of a - b with an indeterminate band scaled to the operands.
inline GapStatus compare_logs(double lower_of_prev, double upper_of_next) {
  const double diff = lower_of_prev - upper_of_next;
  if (std::isinf(lower_of_prev) || std::isinf(upper_of_next)) {
    return diff > 0 ? GapStatus::Hole : GapStatus::Overlap;
  }
  const double scale = std::max({1.0, std::fabs(lower_of_prev), std::fabs(upper_of_next)});
  if (std::fabs(diff) <= kIndeterminateMargin * scale) return GapStatus::Indeterminate;
  return diff > 0 ? GapStatus::Hole : GapStatus::Overlap;
}

/// One closed interval [lower, upper] of epsilon values, stored by its logs.
struct EpsilonInterval {
  std::size_t n = 0;           // label within its family
  std::size_t convergent = 0;  // index of the convergent q it is built from
  BigInt q;
  double log_lower = 0.0;
  double log_upper = 0.0;
  std::string constants;  // provenance of the endpoint constants

  double lower() const { return std::exp(log_lower); }
  double upper() const { return std::exp(log_upper); }
  bool degenerate() const { return log_lower == log_upper; }
};

/// q as a double, +inf beyond the double range.
inline double q_as_double(const BigInt& q) {
  if (boost::multiprecision::msb(q) >= 1023) return INFINITY;
  return q.convert_to<double>();
}

/// I_n(C, C'); nullopt when e^{-C' q_n} > (C q_n)^{-(n+1)} (not well defined).
inline std::optional<EpsilonInterval> interval_In(const PartialQuotientSource& src, std::size_t n, double C,
                                                  double C_prime, int goth_n) {
  if (!(C > 0 && C_prime > 0)) fail(ErrorKind::InvalidArgument, "C and C' must be positive");
  const auto c = convergents(src, n + 1);
  EpsilonInterval iv;
  iv.n = n;
  iv.convergent = n;
  iv.q = c[n].q;
  iv.log_lower = -C_prime * q_as_double(iv.q);
  iv.log_upper = -(goth_n + 1) * (std::log(C) + log_abs(iv.q));
  iv.constants = "C=" + std::to_string(C) + ",C'=" + std::to_string(C_prime);
  if (iv.log_lower > iv.log_upper) return std::nullopt;
  return iv;
}

/// Maximal connected component of a union of intervals.
struct MergedInterval {
  double log_lower = 0.0;
  double log_upper = 0.0;
  std::size_t n_first = 0;
  std::size_t n_last = 0;

  double lower() const { return std::exp(log_lower); }
  double upper() const { return std::exp(log_upper); }
};

/// Open gap (from, to) between consecutive merged intervals.
struct Hole {
  std::size_t after_n = 0;  // label of the interval above the gap
  double log_from = 0.0;    // upper endpoint of the interval below
  double log_to = 0.0;      // lower endpoint of the interval above

  double from() const { return std::exp(log_from); }
  double to() const { return std::exp(log_to); }
  double width() const { return to() - from(); }
};

/// Closure of a (truncated) union of epsilon-intervals accumulating at 0.
struct AdmissibleSet {
  std::vector<EpsilonInterval> pieces;    // sorted by upper endpoint, descending
  std::vector<GapStatus> adjacent;        // status between pieces[i] and pieces[i+1]
  std::vector<MergedInterval> intervals;  // disjoint, descending toward 0
  std::vector<Hole> holes;
  std::size_t N = 0;
  std::size_t n_max = 0;
  bool truncated = true;             // the union over n > n_max is not represented
  bool contains_zero_closure = true;  // 0 is an accumulation point of the full set
  std::string constants;

  bool hole_free() const { return holes.empty(); }
  std::size_t indeterminate_count() const {
    return static_cast<std::size_t>(std::count(adjacent.begin(), adjacent.end(), GapStatus::Indeterminate));
  }
  /// True if eps lies in one of the represented intervals.
  bool contains(double eps) const {
    const double l = std::log(eps);
    for (const auto& iv : intervals) {
      if (l >= iv.log_lower && l <= iv.log_upper) return true;
    }
    return false;
  }
};

/// Canonical merge of intervals; independent of the input order.
inline AdmissibleSet merge_intervals(std::vector<EpsilonInterval> pieces) {
  AdmissibleSet set;
  std::sort(pieces.begin(), pieces.end(), [](const EpsilonInterval& a, const EpsilonInterval& b) {
    if (a.log_upper != b.log_upper) return a.log_upper > b.log_upper;
    if (a.log_lower != b.log_lower) return a.log_lower > b.log_lower;
    return a.n < b.n;
  });
  set.pieces = std::move(pieces);
  for (std::size_t i = 0; i < set.pieces.size(); ++i) {
    const auto& p = set.pieces[i];
    if (set.intervals.empty()) {
      set.intervals.push_back({p.log_lower, p.log_upper, p.n, p.n});
      continue;
    }
    auto& cur = set.intervals.back();
    const GapStatus st = compare_logs(cur.log_lower, p.log_upper);
    set.adjacent.push_back(st);
    if (st == GapStatus::Hole) {
      set.holes.push_back({cur.n_last, p.log_upper, cur.log_lower});
      set.intervals.push_back({p.log_lower, p.log_upper, p.n, p.n});
    } else {
      cur.log_lower = std::min(cur.log_lower, p.log_lower);
      cur.n_first = std::min(cur.n_first, p.n);
      cur.n_last = std::max(cur.n_last, p.n);
    }
  }
  return set;
}

/// J_N(C, C') truncated to N <= n <= n_max.
inline AdmissibleSet build_JN(const PartialQuotientSource& src, std::size_t N, std::size_t n_max, double C,
                              double C_prime, int goth_n) {
  if (n_max < N) fail(ErrorKind::InvalidArgument, "n_max < N");
  std::vector<EpsilonInterval> pieces;
  std::vector<std::size_t> bad;
  for (std::size_t n = N; n <= n_max; ++n) {
    auto iv = interval_In(src, n, C, C_prime, goth_n);
    if (!iv) {
      bad.push_back(n);
      continue;
    }
    pieces.push_back(std::move(*iv));
  }
  if (!bad.empty()) {
    std::string list;
    for (auto n : bad) list += (list.empty() ? "" : ",") + std::to_string(n);
    fail(ErrorKind::PreconditionViolated, "I_n not well defined for n = " + list);
  }
  auto set = merge_intervals(std::move(pieces));
  set.N = N;
  set.n_max = n_max;
  set.constants = "C=" + std::to_string(C) + ",C'=" + std::to_string(C_prime);
  return set;
}

/// Constants of the optimised construction.
struct OptimalConstants {
  Rational C0_exact;
  double C0 = 0.0;
  double a0 = 0.0;      // eta0^{1/(n+1)}
  double b0 = 0.0;      // eta0^{1/(n(n+1))}
  double x_star = 0.0;  // e^{-C0 x} <= a0 / x^n for all x >= x_star
  std::size_t N = 0;
  BigInt q_N;
  double C1_star = 0.0;  // (1 / (a0 q_N))^{1/(n+1)}
};

/// h(x) = C0 x - n log x + log a0; h >= 0 iff e^{-C0 x} <= a0 / x^n.
inline double envelope_gap(double x, double C0, int goth_n, double a0) {
  return C0 * x - goth_n * std::log(x) + std::log(a0);
}

inline OptimalConstants choose_C1_star_and_N(const PartialQuotientSource& src, const RegularityBudget& b,
                                             std::size_t index_budget = 400) {
  b.validate();
  OptimalConstants k;
  k.C0_exact = compute_C0(b);
  k.C0 = to_double(k.C0_exact);
  const int n = b.goth_n;
  k.a0 = std::pow(b.eta0, 1.0 / (n + 1));
  k.b0 = std::pow(b.eta0, 1.0 / (n * (n + 1.0)));
  auto h = [&](double x) { return envelope_gap(x, k.C0, n, k.a0); };

  // h decreases up to x_m = n / C0 and increases after; one sign change past x_m.
  const double x_m = n / k.C0;
  if (h(x_m) >= 0) {
    k.x_star = 0.0;
  } else {
    double hi = 2 * x_m;
    while (h(hi) < 0) hi *= 2;
    boost::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(h, x_m, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    k.x_star = r.second;
  }

  auto s = src.stream();
  BigInt q_prev2 = 1, q_prev = 0;
  for (std::size_t i = 0; i < index_budget; ++i) {
    auto a = s.next();
    if (!a) fail(ErrorKind::InsufficientPrecision, "source exhausted while searching N");
    BigInt q = *a * q_prev + q_prev2;
    q_prev2 = std::exchange(q_prev, q);
    const double qd = q_as_double(q);
    if (qd >= k.x_star && (std::isinf(qd) || h(qd) >= 0)) {
      k.N = i;
      k.q_N = q;
      k.C1_star = std::exp(-(std::log(k.a0) + log_abs(q)) / (n + 1));
      return k;
    }
  }
  fail(ErrorKind::NoSuchN, "no convergent index below " + std::to_string(index_budget) + " passes the threshold");
}

/// Margin of the overlap condition q_{m+1} <= b0 e^{(C0/n) q_m} in log form;
/// positive means a hole after the interval built on q_m.
inline double overlap_condition_margin(const BigInt& q_m, const BigInt& q_next, double C0, double b0, int goth_n) {
  return log_abs(q_next) - std::log(b0) - (C0 / goth_n) * q_as_double(q_m);
}

/// frakJ_n for n = 0..n_max, merged, with the hole predicate checked both ways.
struct FrakJResult {
  OptimalConstants constants;
  AdmissibleSet set;
  std::vector<double> condition_margin;     // per n < n_max, > 0 means hole
  std::vector<GapStatus> predicate_status;  // decided from condition_margin
  std::vector<GapStatus> endpoint_status;   // decided from the endpoints directly
};

inline FrakJResult build_frakJ(const PartialQuotientSource& src, const RegularityBudget& b, std::size_t n_max) {
  FrakJResult out;
  out.constants = choose_C1_star_and_N(src, b);
  const auto& k = out.constants;
  const int gn = b.goth_n;
  const auto c = convergents(src, k.N + n_max + 2);
  std::vector<EpsilonInterval> pieces;
  for (std::size_t n = 0; n <= n_max; ++n) {
    EpsilonInterval iv;
    iv.n = n;
    iv.convergent = k.N + n;
    iv.q = c[k.N + n].q;
    iv.log_lower = -k.C0 * q_as_double(iv.q);
    iv.log_upper = std::log(k.a0) - gn * log_abs(iv.q);
    iv.constants = "a0,C0";
    pieces.push_back(iv);
  }
  for (std::size_t n = 0; n < n_max; ++n) {
    const double m = overlap_condition_margin(c[k.N + n].q, c[k.N + n + 1].q, k.C0, k.b0, gn);
    out.condition_margin.push_back(m);
    const double scale = std::max(1.0, std::fabs(log_abs(c[k.N + n + 1].q)));
    out.predicate_status.push_back(std::isinf(m) ? (m > 0 ? GapStatus::Hole : GapStatus::Overlap)
                                   : std::fabs(m) <= kIndeterminateMargin * scale ? GapStatus::Indeterminate
                                   : m > 0                                        ? GapStatus::Hole
                                                                                  : GapStatus::Overlap);
    out.endpoint_status.push_back(compare_logs(pieces[n].log_lower, pieces[n + 1].log_upper));
  }
  out.set = merge_intervals(std::move(pieces));
  out.set.N = k.N;
  out.set.n_max = n_max;
  out.set.constants = "a0=" + std::to_string(k.a0) + ",C0=" + std::to_string(k.C0);
  return out;
}

/// Best Diophantine constants over the tested convergents:
/// |q_n alpha - p_n| >= gamma q_n^{-tau} for every tested n.
struct DiophantineFit {
  double gamma = 0.0;
  double tau = 1.0;
  std::size_t tested = 0;
};

struct BrjunoSummary {
  std::vector<double> terms;
  std::vector<double> partial_sums;
  bool appears_divergent = false;  // heuristic over the tested range only
};

struct OverlapRow {
  std::size_t n = 0;
  double margin = 0.0;  // > 0 violates the overlap condition (hole)
  bool holds = false;
  bool indeterminate = false;
};

struct FrequencyClassification {
  std::size_t depth = 0;
  DiophantineFit diophantine;
  BrjunoSummary brjuno;
  OptimalConstants constants;
  std::vector<OverlapRow> overlap;  // n from N to depth - 1
  std::vector<double> log_distance;  // log |q_n alpha - p_n|, n < depth
};

inline double log_rational(const Rational& r) {
  return log_abs(boost::multiprecision::numerator(r)) - log_abs(boost::multiprecision::denominator(r));
}

inline FrequencyClassification classify(const PartialQuotientSource& src, const RegularityBudget& b,
                                        std::size_t depth) {
  if (depth < 3) fail(ErrorKind::InvalidArgument, "classify needs depth >= 3");
  FrequencyClassification fc;
  fc.depth = depth;
  const auto c = convergents(src, depth + 1);

  // (i) Diophantine fit on log |q_n alpha - p_n| = log gamma - tau log q_n.
  std::vector<double> lx, ly;
  for (std::size_t n = 0; n < depth; ++n) {
    const auto g = approximation_gap(src, n);
    const double ld = log_rational(g.value.lo) + log_abs(c[n].q);  // lower end, certified
    fc.log_distance.push_back(ld);
    lx.push_back(log_abs(c[n].q));
    ly.push_back(-ld);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    if (lx[i] <= 0) continue;
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
    ++m;
  }
  double tau = 1.0;
  if (m >= 2 && sxx * m - sx * sx > 0) tau = std::max(1.0, (m * sxy - sx * sy) / (m * sxx - sx * sx));
  double log_gamma = INFINITY;
  for (std::size_t i = 0; i < lx.size(); ++i) log_gamma = std::min(log_gamma, fc.log_distance[i] + tau * lx[i]);
  fc.diophantine = {std::exp(log_gamma), tau, depth};

  // (ii) Bryuno partial sums.
  fc.brjuno.terms = brjuno_terms(src, depth);
  double s = 0;
  for (double t : fc.brjuno.terms) fc.brjuno.partial_sums.push_back(s += t);
  {
    const auto& t = fc.brjuno.terms;
    const std::size_t tail = std::min<std::size_t>(4, t.size() - 1);
    bool shrinking = true;
    for (std::size_t i = t.size() - tail; i < t.size(); ++i) {
      if (!(t[i] < 0.9 * t[i - 1])) shrinking = false;
    }
    fc.brjuno.appears_divergent = !shrinking && t.back() > 1e-12 * s;
  }

  // (iii) Overlap condition from N on.
  fc.constants = choose_C1_star_and_N(src, b);
  for (std::size_t n = fc.constants.N; n + 1 < c.size(); ++n) {
    OverlapRow row;
    row.n = n;
    row.margin = overlap_condition_margin(c[n].q, c[n + 1].q, fc.constants.C0, fc.constants.b0, b.goth_n);
    const double scale = std::max(1.0, std::fabs(log_abs(c[n + 1].q)));
    row.indeterminate = std::isfinite(row.margin) && std::fabs(row.margin) <= kIndeterminateMargin * scale;
    row.holds = row.margin <= 0;
    fc.overlap.push_back(row);
  }
  return fc;
}

}  // namespace resp
