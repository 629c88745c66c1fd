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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "resp/resp.hpp"
#include "test_inputs.hpp"

using namespace resp;

namespace {

struct Outcome {
  bool pass = true;
  bool warn_only = false;
  std::ostringstream note;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) note << "; ";
      else note.str("");
      pass = false;
      note << what;
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && dt > limit_s) o.check(false, "runtime " + std::to_string(dt) + " s over limit");
  const char* tag = o.pass ? "PASS" : o.warn_only ? "WARN" : "FAIL";
  if (!o.pass && !o.warn_only) ++failures;
  std::printf("criterion %d %s: %s (%.2f s)%s%s\n", id, tag, title, dt, o.note.str().empty() ? "" : " | ",
              o.note.str().c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const std::vector<std::pair<const char*, PartialQuotientSource>>& alphas() {
  static const std::vector<std::pair<const char*, PartialQuotientSource>> a{
      {"golden", PartialQuotientSource::golden()},
      {"sqrt2", PartialQuotientSource::sqrt2()},
      {"e(200 digits)", testing::e_from_200_digits()},
      {"2^k", testing::liouville_pow2()}};
  return a;
}

RegularityBudget hole_budget() {
  RegularityBudget b;
  b.goth_n = 3;
  b.xi = 4;
  b.eta0 = 1e-4;
  return b;
}

SolveConfig solve_config(double eps) {
  SolveConfig c;
  c.epsilon = eps;
  c.N_modes = 16;
  c.tol_range = 1e-12;
  c.tol_bif = 1e-13;
  return c;
}

// Upper endpoint of frakJ_0 (golden, n = 3, xi = 4).
double eps_top() {
  const auto r = build_frakJ(PartialQuotientSource::golden(), hole_budget(), 0);
  return r.set.intervals.front().upper();
}

}  // namespace

int main() {
  criterion(1, "continued-fraction identities, first 20 convergents", 5.0, [](Outcome& o) {
    for (const auto& [name, src] : alphas()) {
      const std::string tag = std::string(name) + ": ";
      const auto c = convergents(src, 21);
      const Enclosure a = alpha_enclosure(src, 400);
      Enclosure prev;
      for (std::size_t k = 0; k < 20; ++k) {
        if (k > 0) {
          const BigInt det = c[k].p * c[k - 1].q - c[k - 1].p * c[k].q;
          o.check(det == ((k % 2 == 1) ? 1 : -1), tag + "determinant at k=" + std::to_string(k));
        }
        const bool side = (k % 2 == 0) ? a.above(c[k].value()) : a.below(c[k].value());
        o.check(side, tag + "bracketing at k=" + std::to_string(k));
        if (k >= 2)
          o.check((k % 2 == 0) ? c[k - 2].value() < c[k].value() : c[k - 2].value() > c[k].value(),
                  tag + "alternating monotone convergents at k=" + std::to_string(k));
        const auto g = approximation_gap(src, k);
        o.check(g.strictly_inside(), tag + "sandwich at k=" + std::to_string(k));
        if (k > 0)
          o.check(g.value.hi * c[k].q <= prev.lo * c[k - 1].q, tag + "|q_k alpha - p_k| not decreasing at k=" +
                                                                   std::to_string(k));
        prev = g.value;
      }
    }
  });

  criterion(2, "small-divisor brute force, n <= 10, q_n <= 1e5", 30.0, [](Outcome& o) {
    int checked = 0;
    for (const auto& [name, src] : alphas()) {
      const auto c = convergents(src, 11);
      for (std::size_t n = 1; n <= 10; ++n) {
        if (c[n].q > 100000) break;
        const auto r = verify_best_approx(src, n);
        ++checked;
        o.check(r.holds, std::string(name) + " fails at n=" + std::to_string(n));
      }
    }
    o.note << checked << " (alpha, n) pairs";
  });

  criterion(3, "C0 exact values and the C1* identity", 0.0, [](Outcome& o) {
    RegularityBudget b3, b5;
    b5.goth_n = 5;
    o.check(compute_C0(b3) == Rational(1, 14), "C0(n=3) = " + compute_C0(b3).str());
    o.check(compute_C0(b5) == Rational(3, 68), "C0(n=5) = " + compute_C0(b5).str());
    double worst = 0;
    for (const auto& b : {b3, b5, hole_budget()}) {
      for (const auto& [name, src] : alphas()) {
        const auto k = choose_C1_star_and_N(src, b);
        const double q = q_as_double(k.q_N);
        const double lhs = std::pow(k.C1_star * q, -(b.goth_n + 1.0));
        const double rhs = k.a0 / std::pow(q, b.goth_n);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
      }
    }
    o.check(worst <= 1e-13, "identity relative error " + fmt("%.3e", worst));
    if (o.pass) o.note << "max relative error " << fmt("%.2e", worst);
  });

  criterion(4, "hole dichotomy (golden hole-free, 2^(2^k) has holes, predicate == endpoints)", 5.0, [](Outcome& o) {
    const auto b = hole_budget();
    const auto g = build_frakJ(PartialQuotientSource::golden(), b, 20);
    o.check(g.set.hole_free(), "golden: " + std::to_string(g.set.holes.size()) + " hole(s), first after frakJ_" +
                                   (g.set.holes.empty() ? std::string("-") : std::to_string(g.set.holes[0].after_n)));
    for (std::size_t n = 0; n < g.condition_margin.size(); ++n)
      if (g.condition_margin[n] > 0)
        o.check(false, "golden: overlap condition violated at N+" + std::to_string(n) + ", margin " +
                           fmt("%.4f", g.condition_margin[n]));
    const auto d = build_frakJ(testing::double_exponential(), b, 20);
    o.check(!d.set.hole_free(), "2^(2^k): no hole");
    for (const auto* r : {&g, &d})
      for (std::size_t n = 0; n < r->predicate_status.size(); ++n)
        o.check(r->predicate_status[n] == r->endpoint_status[n] &&
                    r->predicate_status[n] != GapStatus::Indeterminate,
                std::string(r == &g ? "golden" : "2^(2^k)") + ": predicate/endpoint mismatch at n=" +
                    std::to_string(n));
  });

  SolveResult top;
  criterion(5, "solver residuals and decay of sup|u|, |zeta| over eps, eps/2, eps/4", 60.0, [&](Outcome& o) {
    const auto spec = monomial_model(3);
    const double eps = eps_top();
    double prev_sup = INFINITY, prev_zeta = INFINITY;
    for (double e : {eps, eps / 2, eps / 4}) {
      const auto r = solve_response(spec, solve_config(e));
      if (e == eps) top = r;
      const std::string at = " at eps=" + fmt("%.4e", e);
      o.check(r.range_residual <= 1e-10, "range residual " + fmt("%.2e", r.range_residual) + at);
      o.check(std::abs(r.bif_residual) <= 1e-12, "|H| " + fmt("%.2e", r.bif_residual) + at);
      o.check(r.ode_residual <= 1e-8, "ODE residual " + fmt("%.2e", r.ode_residual) + at);
      const double s = sup_norm(r.u, 128);
      o.check(s < prev_sup, "sup|u| not decreasing" + at);
      o.check(std::abs(r.zeta) < prev_zeta, "|zeta| = " + fmt("%.3e", std::abs(r.zeta)) + " not below previous " +
                                                fmt("%.3e", prev_zeta) + at);
      prev_sup = s;
      prev_zeta = std::abs(r.zeta);
    }
  });

  criterion(6, "tree sums equal the Picard oracle, k <= 7, |nu|_1 <= 3", 60.0, [&](Outcome& o) {
    const auto spec = monomial_model(3);
    const double eps = eps_top(), zeta = top.zeta;
    const double C1 = choose_C1_star_and_N(PartialQuotientSource::golden(), hole_budget()).C1_star;
    const TreeEvaluator ev(spec, eps, zeta, C1);
    const auto W = picard_bookkeeping(spec, eps, zeta, 7);
    double worst = 0;
    for (int k = 1; k <= 7; ++k)
      for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) {
          const Mode nu{a, b};
          if (nu.l1() > 3) continue;
          const auto s = series_coefficient(ev, k, nu);
          const cplx w = sparse_at(W[static_cast<std::size_t>(k)], nu);
          const double scale = std::max({std::abs(s.value), std::abs(w), 1e-3 * s.abs_sum, 1e-300});
          worst = std::max(worst, std::abs(s.value - w) / scale);
          if (k >= 2 && k <= spec.goth_n)
            o.check(s.trees == 0 && s.value == cplx{} && w == cplx{},
                    "order " + std::to_string(k) + " not identically zero");
        }
    o.check(worst <= 1e-12, "max relative error " + fmt("%.3e", worst));
    if (o.pass) o.note << "max relative error " << fmt("%.2e", worst);
  });

  criterion(7, "self-energy real, x-independent, lower bound over a 6-point sweep", 0.0, [](Outcome& o) {
    const auto spec = monomial_model(3);
    const TreeEvaluator ev(spec, 1e-3, 0.01, 2.0);
    const double thr = ev.threshold();
    const cplx ref = ev.self_energy(0.0, 3);
    for (double x : {-0.9 * thr, -0.3 * thr, 0.1 * thr, 0.25 * thr, 0.8 * thr}) {
      const cplx M = ev.self_energy(x, 3);
      o.check(std::abs(M.imag()) <= 1e-14 * std::abs(M), "imaginary part at x=" + fmt("%.3e", x));
      o.check(std::abs(M - ref) <= 1e-14 * std::abs(ref), "x-dependence at x=" + fmt("%.3e", x));
    }
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 6; ++i) pts.emplace_back(1e-3 / std::pow(4.0, i), 0.05 / std::pow(2.0, i));
    const auto rep = lower_bound_check_M(spec, pts, 2.0);
    o.check(std::isfinite(rep.min_ratio) && rep.min_ratio > 0, "ratio not bounded below");
    double head = INFINITY, tail = INFINITY;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) (i < 3 ? head : tail) = std::min(i < 3 ? head : tail, rep.rows[i].ratio);
    o.check(tail >= 0.5 * head, "ratio decaying along the sweep");
    o.note << "min ratio " << fmt("%.4f", rep.min_ratio);
  });

  criterion(8, "n = 1 spectral solution vs stiff integrator, eps = 0.05", 30.0, [](Outcome& o) {
    const double eps = 0.05;
    const auto m = monomial_model(1);
    SolveConfig c;
    c.epsilon = eps;
    c.N_modes = 4;
    const auto r = solve_response(m, c);
    SimConfig sc;
    sc.epsilon = eps;
    sc.t_end = 400.0;
    sc.dt = 0.0025;
    sc.record_every = 8;
    const auto s = integrate(m, sc);
    const double t_tr = default_transient(m, eps, 1e-6);
    o.check(t_tr < sc.t_end, "transient longer than the run");
    const double dev = compare_with_spectral(m, s, r, t_tr);
    o.check(dev <= 1e-6, "sup deviation " + fmt("%.3e", dev));
    if (o.pass) o.note << "sup deviation " << fmt("%.2e", dev) << " after t=" << fmt("%.1f", t_tr);
  });

  criterion(9, "Fourier decay rate of the criterion 5 solution >= xi/4 (diagnostic)", 0.0, [&](Outcome& o) {
    o.warn_only = true;
    const double xi = hole_budget().xi;
    // The solution decays so fast that only a couple of shells clear round-off;
    // fall back to a straight fit through the resolved ones.
    std::vector<std::pair<int, double>> shells;
    double rate = 0;
    try {
      const auto fit = decay_fit(top.u);
      rate = fit.rate;
      shells = fit.shells;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TooFewShells) throw;
      // resolved: clearly above what the range residual can vouch for
      const double floor = std::max(100 * top.range_residual, 1e-300);
      std::map<int, double> best;
      for (std::size_t i = 0; i < top.u.data().size(); ++i) {
        const double a = std::abs(top.u.data()[i]);
        if (a > floor) best[top.u.mode_at(i).l1()] = std::max(best[top.u.mode_at(i).l1()], a);
      }
      shells.assign(best.begin(), best.end());
      if (shells.size() < 2) throw;
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double n = static_cast<double>(shells.size());
      for (auto [sh, a] : shells) {
        sx += sh;
        sy += std::log(a);
        sxx += double(sh) * sh;
        sxy += sh * std::log(a);
      }
      rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    o.check(rate >= xi / 4, "fitted rate " + fmt("%.3f", rate) + " below " + fmt("%.2f", xi / 4));
    o.note << "fitted rate " << fmt("%.3f", rate) << " over " << shells.size() << " resolved shells";
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
