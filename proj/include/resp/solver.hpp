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

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "resp/model.hpp"
#include "resp/parallel.hpp"

namespace resp {

struct SolveConfig {
  double epsilon = 0.0;
  int N_modes = 16;
  double tol_range = 1e-12;
  double tol_bif = 1e-13;
  int max_newton = 50;
  std::optional<std::pair<double, double>> zeta_bracket;
  double C1 = 1.0;
  int scan_points = 32;
  int max_bisection = 200;
  int ode_points = 4096;
  double ode_t_end = 200.0;
  bool picard = false;  // relaxed fixed-point iteration instead of Newton

  void validate() const {
    if (!(epsilon > 0) || !std::isfinite(epsilon)) fail(ErrorKind::InvalidArgument, "epsilon must be > 0");
    if (N_modes < 1) fail(ErrorKind::InvalidArgument, "N_modes must be >= 1");
    if (!(tol_range > 0) || !(tol_bif > 0)) fail(ErrorKind::InvalidArgument, "tolerances must be > 0");
    if (max_newton < 1) fail(ErrorKind::InvalidArgument, "max_newton must be >= 1");
    if (scan_points < 2) fail(ErrorKind::InvalidArgument, "scan_points must be >= 2");
    if (zeta_bracket && !(zeta_bracket->first < zeta_bracket->second))
      fail(ErrorKind::InvalidArgument, "zeta_bracket must satisfy lo < hi");
  }
};

struct RangeSolution {
  FourierField u;
  double residual = 0.0;  // max_nu |F_nu|
  int iterations = 0;
};

struct SolveResult {
  double zeta = 0.0;
  std::vector<double> roots;  // every bracketed root of H
  FourierField u;
  double range_residual = 0.0;
  double bif_residual = 0.0;
  double ode_residual = 0.0;
  std::vector<Mode> scale1_modes;
  int newton_iters = 0;
  int bisection_steps = 0;
};

namespace detail {

/// Restarted GMRES with right preconditioning, complex arithmetic.
template <class Op, class Prec>
bool gmres(const Op& A, const Prec& M_inv, const std::vector<cplx>& b, std::vector<cplx>& x, double tol,
           int restart = 50, int max_restarts = 20) {
  const std::size_t n = b.size();
  auto norm = [](const std::vector<cplx>& v) {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
  };
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), cplx{});
    return true;
  }
  for (int cycle = 0; cycle < max_restarts; ++cycle) {
    std::vector<cplx> r = A(M_inv(x));
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double beta = norm(r);
    if (beta <= tol * bnorm) return true;
    std::vector<std::vector<cplx>> V{r};
    for (auto& z : V[0]) z /= beta;
    std::vector<std::vector<cplx>> H(static_cast<std::size_t>(restart) + 1, std::vector<cplx>(restart));
    std::vector<cplx> cs(restart), sn(restart), g(static_cast<std::size_t>(restart) + 1);
    g[0] = beta;
    int k = 0;
    for (; k < restart; ++k) {
      std::vector<cplx> w = A(M_inv(V[k]));
      for (int j = 0; j <= k; ++j) {
        cplx h = 0;
        for (std::size_t i = 0; i < n; ++i) h += std::conj(V[j][i]) * w[i];
        H[j][k] = h;
        for (std::size_t i = 0; i < n; ++i) w[i] -= h * V[j][i];
      }
      const double hn = norm(w);
      H[k + 1][k] = hn;
      for (int j = 0; j < k; ++j) {
        const cplx t = std::conj(cs[j]) * H[j][k] + std::conj(sn[j]) * H[j + 1][k];
        H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
        H[j][k] = t;
      }
      const double den = std::hypot(std::abs(H[k][k]), hn);
      if (den == 0.0) return false;
      cs[k] = H[k][k] / den;
      sn[k] = hn / den;
      H[k][k] = den;
      H[k + 1][k] = 0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = std::conj(cs[k]) * g[k];
      if (hn != 0.0) {
        for (auto& z : w) z /= hn;
        V.push_back(std::move(w));
      }
      if (std::abs(g[k + 1]) <= tol * bnorm || hn == 0.0) {
        ++k;
        break;
      }
    }
    std::vector<cplx> y(k);
    for (int i = k - 1; i >= 0; --i) {
      cplx s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
      y[i] = s / H[i][i];
    }
    // x is kept in preconditioned coordinates
    for (int j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) x[i] += y[j] * V[j][i];
  }
  std::vector<cplx> r = A(M_inv(x));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  return norm(r) <= tol * bnorm;
}

}  // namespace detail

/// Range equation at fixed (eps, zeta):
///   i w.nu (1 + i eps w.nu) u_nu + eps [g(c + zeta + u)]_nu = eps f_nu,  nu != 0.
class RangeProblem {
 public:
  RangeProblem(const ModelSpec& spec, const SolveConfig& cfg)
      : spec_(spec), cfg_(cfg), N_(cfg.N_modes), divisors_(spec.alpha, cfg.N_modes), g_(spec.g_relative()),
        dg_(g_.derivative()) {
    cfg.validate();
    D_.resize(static_cast<std::size_t>((2 * N_ + 1) * (2 * N_ + 1)));
    FourierField tmp(N_);
    for (std::size_t i = 0; i < D_.size(); ++i) {
      const Mode m = tmp.mode_at(i);
      D_[i] = m.is_zero() ? cplx{} : bare_divisor(divisors_(m), cfg.epsilon);
    }
    f_ = spec.f.resized(N_);
    f_.set_zero_mean(true);
  }

  const DivisorTable& divisors() const { return divisors_; }
  const SolveConfig& config() const { return cfg_; }
  const ModelSpec& spec() const { return spec_; }
  cplx D(Mode m) const { return D_[f_.index(m)]; }

  /// One Picard step from zero: eps f_nu / D_nu.
  FourierField first_order() const {
    FourierField u(N_, true);
    for (std::size_t i = 0; i < D_.size(); ++i)
      if (D_[i] != cplx{}) u.data()[i] = cfg_.epsilon * f_.data()[i] / D_[i];
    return u;
  }

  FourierField residual(double zeta, const FourierField& u) const {
    const FourierField G = compose_poly(g_, zeta, u);
    FourierField F(N_, true);
    for (std::size_t i = 0; i < D_.size(); ++i) {
      if (D_[i] == cplx{}) continue;
      F.data()[i] = D_[i] * u.data()[i] + cfg_.epsilon * (G.data()[i] - f_.data()[i]);
    }
    return F;
  }

  /// [g(c + zeta + u)]_0 - f_0
  double H(double zeta, const FourierField& u) const { return compose_poly(g_, zeta, u).at({0, 0}).real(); }

  RangeSolution solve(double zeta) const { return cfg_.picard ? solve_picard(zeta) : solve_newton(zeta); }

  RangeSolution solve_newton(double zeta) const {
    RangeSolution s;
    s.u = first_order();
    FourierField F = residual(zeta, s.u);
    double res = F.max_abs();
    const double eps = cfg_.epsilon;
    const int M = alias_free_grid(N_, std::max(g_.degree(), 1));
    const std::size_t nn = static_cast<std::size_t>(M) * M;
    for (int it = 0; it < cfg_.max_newton; ++it) {
      if (res == 0.0) break;
      // w = g'(zeta + u) on the grid
      auto& grid = detail::grid_for(M);
      grid.synthesize(s.u);
      std::vector<cplx> w(nn);
      for (std::size_t i = 0; i < nn; ++i) w[i] = dg_(zeta + grid.data()[i]);
      cplx w0 = 0;
      for (const auto& z : w) w0 += z;
      w0 /= static_cast<double>(nn);
      std::vector<cplx> P(D_.size());
      for (std::size_t i = 0; i < D_.size(); ++i) {
        if (D_[i] == cplx{}) continue;
        P[i] = D_[i] + eps * w0;
        if (P[i] == cplx{}) fail(ErrorKind::SingularJacobian, "zero diagonal in Jacobian preconditioner");
      }
      auto A = [&](const std::vector<cplx>& v) {
        FourierField d(N_, true);
        d.data() = v;
        auto& gr = detail::grid_for(M);
        gr.synthesize(d);
        for (std::size_t i = 0; i < nn; ++i) gr.data()[i] *= w[i];
        FourierField Jd = gr.analyze(N_, true);
        std::vector<cplx> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
          if (D_[i] != cplx{}) out[i] = D_[i] * v[i] + eps * Jd.data()[i];
        return out;
      };
      auto Minv = [&](const std::vector<cplx>& v) {
        std::vector<cplx> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
          if (P[i] != cplx{}) out[i] = v[i] / P[i];
        return out;
      };
      std::vector<cplx> rhs(F.data().size());
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -F.data()[i];
      std::vector<cplx> y(rhs.size());
      if (!detail::gmres(A, Minv, rhs, y, 1e-14)) {
        // accept a partially converged step; the line search decides
      }
      const std::vector<cplx> delta = Minv(y);
      double step = 1.0;
      FourierField trial;
      FourierField Ft;
      double rt = std::numeric_limits<double>::infinity();
      for (int ls = 0; ls < 12; ++ls, step *= 0.5) {
        trial = s.u;
        for (std::size_t i = 0; i < delta.size(); ++i) trial.data()[i] += step * delta[i];
        trial.symmetrize();
        Ft = residual(zeta, trial);
        rt = Ft.max_abs();
        if (rt < res) break;
      }
      ++s.iterations;
      if (!(rt < res)) break;  // stagnated at round-off
      const bool small_gain = rt > 0.25 * res;
      s.u = std::move(trial);
      F = std::move(Ft);
      res = rt;
      if (res <= cfg_.tol_range && (small_gain || res <= 1e-3 * cfg_.tol_range)) break;
    }
    s.residual = res;
    if (!(res <= cfg_.tol_range))
      fail(ErrorKind::NoConvergence, "range equation residual " + std::to_string(res) + " after " +
                                         std::to_string(s.iterations) + " Newton steps");
    return s;
  }

  /// u_nu <- u_nu + r (eps f_nu - eps [g]_nu - D_nu u_nu) / D_nu, r = 0.5 on
  /// scale-1 modes and 1 elsewhere.
  RangeSolution solve_picard(double zeta, int max_iter = 2000) const {
    RangeSolution s;
    s.u = first_order();
    const double thr = scale_threshold(cfg_.C1, cfg_.epsilon, spec_.goth_n);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
      const FourierField F = residual(zeta, s.u);
      res = F.max_abs();
      s.iterations = it;
      if (res <= cfg_.tol_range) break;
      for (std::size_t i = 0; i < D_.size(); ++i) {
        if (D_[i] == cplx{}) continue;
        const double r = std::abs(divisors_(s.u.mode_at(i))) < thr ? 0.5 : 1.0;
        s.u.data()[i] -= r * F.data()[i] / D_[i];
      }
      s.u.symmetrize();
      if (!std::isfinite(s.u.max_abs())) break;
    }
    s.residual = res;
    if (!(res <= cfg_.tol_range))
      fail(ErrorKind::NoConvergence, "Picard iteration residual " + std::to_string(res));
    return s;
  }

 private:
  ModelSpec spec_;
  SolveConfig cfg_;
  int N_;
  DivisorTable divisors_;
  Polynomial g_;
  Polynomial dg_;
  std::vector<cplx> D_;
  FourierField f_;
};

inline FourierField solve_range(const ModelSpec& spec, double zeta, const SolveConfig& cfg) {
  spec.validate();
  return RangeProblem(spec, cfg).solve(zeta).u;
}

inline double bifurcation_H(const ModelSpec& spec, double epsilon, double zeta, SolveConfig cfg) {
  spec.validate();
  if (epsilon == 0.0) return spec.g_relative()(zeta);
  cfg.epsilon = epsilon;
  RangeProblem rp(spec, cfg);
  return rp.H(zeta, rp.solve(zeta).u);
}

/// Modes nu != 0 in the truncation with |omega . nu| below the partition threshold.
inline std::vector<Mode> scale1_modes(const DivisorTable& d, double C1, double eps, int goth_n) {
  const double thr = scale_threshold(C1, eps, goth_n);
  std::vector<Mode> out;
  const int N = d.N_modes();
  for (int a = -N; a <= N; ++a)
    for (int b = -N; b <= N; ++b) {
      const Mode m{a, b};
      if (!m.is_zero() && std::abs(d(m)) < thr) out.push_back(m);
    }
  return out;
}

/// Time-domain residual sup_t |eps x'' + x' + eps g(x) - eps f(omega t)| of
/// x(t) = c + zeta + u(omega t), derivatives taken term by term.
struct OdeResidual {
  double sup = 0.0;
  std::vector<double> t, x, r;
};

inline OdeResidual ode_residual(const ModelSpec& spec, const DivisorTable& d, double eps, double zeta,
                                const FourierField& u, int points, double t_end) {
  OdeResidual out;
  out.t.resize(static_cast<std::size_t>(points));
  out.x.resize(out.t.size());
  out.r.resize(out.t.size());
  const Polynomial g = spec.g_relative();
  const auto su = u.support();
  const auto sf = spec.f.support();
  auto w = [&](Mode m) {
    if (m.is_zero()) return 0.0;
    if (m.linf() <= d.N_modes()) return d(m);
    return small_divisor(spec.alpha, m, 1e-15).signed_value();
  };
  std::vector<double> wu, wf;
  for (Mode m : su) wu.push_back(w(m));
  for (Mode m : sf) wf.push_back(w(m));
  parallel_for(out.t.size(), [&](std::size_t k) {
    const double t = t_end * static_cast<double>(k) / static_cast<double>(points - 1 > 0 ? points - 1 : 1);
    cplx U = 0, dU = 0, ddU = 0, Fv = 0;
    for (std::size_t i = 0; i < su.size(); ++i) {
      const cplx e = u[su[i]] * std::polar(1.0, wu[i] * t);
      U += e;
      dU += cplx(0, wu[i]) * e;
      ddU += -wu[i] * wu[i] * e;
    }
    for (std::size_t i = 0; i < sf.size(); ++i) {
      if (sf[i].is_zero()) continue;  // f_0 cancels against g(c)
      Fv += spec.f[sf[i]] * std::polar(1.0, wf[i] * t);
    }
    const double xr = zeta + U.real();
    out.t[k] = t;
    out.x[k] = spec.c + xr;
    out.r[k] = eps * ddU.real() + dU.real() + eps * (g(xr) - Fv.real());
  });
  for (double r : out.r) out.sup = std::max(out.sup, std::abs(r));
  return out;
}

/// Outer bisection on zeta with an inner range solve.
inline SolveResult solve_response(const ModelSpec& spec, const SolveConfig& cfg) {
  spec.validate();
  cfg.validate();
  const RangeProblem rp(spec, cfg);
  SolveResult res;
  auto H_at = [&](double z, RangeSolution* keep = nullptr) {
    RangeSolution s = rp.solve(z);
    const double h = rp.H(z, s.u);
    res.newton_iters += s.iterations;
    if (keep) *keep = std::move(s);
    return h;
  };

  double lo, hi;
  if (cfg.zeta_bracket) {
    std::tie(lo, hi) = *cfg.zeta_bracket;
  } else {
    const double gn = std::abs(spec.g_lead());
    double V = std::pow(2.0 * cfg.epsilon * spec.phi_f() / gn, 1.0 / spec.goth_n);
    if (V == 0.0) V = std::pow(cfg.epsilon, 1.0 / spec.goth_n);
    lo = -V;
    hi = V;
  }

  // scan for sign changes
  const int K = cfg.scan_points;
  std::vector<double> zs(static_cast<std::size_t>(K)), hs(zs.size());
  for (int k = 0; k < K; ++k) {
    zs[k] = lo + (hi - lo) * k / (K - 1);
    hs[k] = H_at(zs[k]);
  }
  std::vector<std::pair<double, double>> brackets;
  for (int k = 0; k < K; ++k) {
    if (hs[k] == 0.0) brackets.emplace_back(zs[k], zs[k]);
    if (k + 1 < K && ((hs[k] < 0 && hs[k + 1] > 0) || (hs[k] > 0 && hs[k + 1] < 0)))
      brackets.emplace_back(zs[k], zs[k + 1]);
  }
  if (brackets.empty()) {
    double hmin = hs[0], hmax = hs[0];
    for (double h : hs) hmin = std::min(hmin, h), hmax = std::max(hmax, h);
    fail(ErrorKind::NoBracket, "H(eps, zeta) has no sign change on [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "], range [" + std::to_string(hmin) + ", " +
                                   std::to_string(hmax) + "]");
  }

  for (auto [a, b] : brackets) {
    double ha = H_at(a);
    double z = a;
    double hz = ha;
    for (int it = 0; it < cfg.max_bisection && a != b; ++it) {
      z = 0.5 * (a + b);
      hz = H_at(z);
      ++res.bisection_steps;
      if (std::abs(hz) <= cfg.tol_bif || z == a || z == b) break;
      if ((hz < 0) == (ha < 0)) {
        a = z;
        ha = hz;
      } else {
        b = z;
      }
    }
    res.roots.push_back(z);
  }
  std::sort(res.roots.begin(), res.roots.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  res.zeta = res.roots.front();

  RangeSolution s;
  const double h = H_at(res.zeta, &s);
  res.u = std::move(s.u);
  res.range_residual = s.residual;
  res.bif_residual = std::abs(h);
  if (!(res.bif_residual <= cfg.tol_bif))
    fail(ErrorKind::NoConvergence, "bifurcation residual " + std::to_string(res.bif_residual));
  res.scale1_modes = scale1_modes(rp.divisors(), cfg.C1, cfg.epsilon, spec.goth_n);
  res.ode_residual =
      ode_residual(spec, rp.divisors(), cfg.epsilon, res.zeta, res.u, cfg.ode_points, cfg.ode_t_end).sup;
  return res;
}

struct ScanRow {
  double epsilon = 0.0;
  bool ok = false;
  std::string error;
  double zeta = 0.0;
  double sup_u = 0.0;
  double range_residual = 0.0;
  double bif_residual = 0.0;
};

/// Solves at each epsilon; failures are recorded per row.
inline std::vector<ScanRow> continuity_scan(const ModelSpec& spec, const SolveConfig& cfg,
                                            const std::vector<double>& eps_list, int grid = 128) {
  std::vector<ScanRow> rows;
  for (double e : eps_list) {
    ScanRow row;
    row.epsilon = e;
    SolveConfig c = cfg;
    c.epsilon = e;
    try {
      const SolveResult r = solve_response(spec, c);
      row.ok = true;
      row.zeta = r.zeta;
      row.sup_u = sup_norm(r.u, grid);
      row.range_residual = r.range_residual;
      row.bif_residual = r.bif_residual;
    } catch (const Error& err) {
      row.error = std::string(to_string(err.kind())) + ": " + err.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace resp
