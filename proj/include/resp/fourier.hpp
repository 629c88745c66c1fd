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

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "resp/errors.hpp"
#include "resp/mode.hpp"

namespace resp {

using cplx = std::complex<double>;

/// Truncated Fourier series on the two-torus, modes |nu|_inf <= N, dense
/// (2N+1)^2 storage.
class FourierField {
 public:
  FourierField() : FourierField(0) {}
  explicit FourierField(int N, bool zero_mean = false)
      : N_(N), zero_mean_(zero_mean), c_(static_cast<std::size_t>((2 * N + 1) * (2 * N + 1))) {
    if (N < 0) fail(ErrorKind::InvalidArgument, "negative truncation");
  }

  int N_modes() const { return N_; }
  int side() const { return 2 * N_ + 1; }
  bool zero_mean() const { return zero_mean_; }
  void set_zero_mean(bool z) {
    zero_mean_ = z;
    if (z) c_[index({0, 0})] = 0.0;
  }

  bool contains(Mode m) const { return m.linf() <= N_; }
  cplx at(Mode m) const { return contains(m) ? c_[index(m)] : cplx{}; }
  cplx& operator[](Mode m) { return c_[index(m)]; }
  const cplx& operator[](Mode m) const { return c_[index(m)]; }

  /// Sets u_m and u_{-m} = conj(u_m).
  void set_real_pair(Mode m, cplx v) {
    if (m.is_zero()) {
      c_[index(m)] = v.real();
      return;
    }
    c_[index(m)] = v;
    c_[index(-m)] = std::conj(v);
  }

  const std::vector<cplx>& data() const { return c_; }
  std::vector<cplx>& data() { return c_; }

  Mode mode_at(std::size_t i) const {
    const int s = side();
    return {static_cast<int>(i) / s - N_, static_cast<int>(i) % s - N_};
  }
  std::size_t index(Mode m) const {
    return static_cast<std::size_t>((m.n1 + N_) * side() + (m.n2 + N_));
  }

  /// All modes in the truncation, lexicographic.
  std::vector<Mode> modes() const {
    std::vector<Mode> out;
    out.reserve(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) out.push_back(mode_at(i));
    return out;
  }

  /// Modes with nonzero coefficient.
  std::vector<Mode> support() const {
    std::vector<Mode> out;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != cplx{}) out.push_back(mode_at(i));
    return out;
  }

  /// Copy re-truncated to radius M (zero-filled if larger).
  FourierField resized(int M) const {
    FourierField out(M, zero_mean_);
    const int r = std::min(M, N_);
    for (int a = -r; a <= r; ++a)
      for (int b = -r; b <= r; ++b) out[{a, b}] = (*this)[{a, b}];
    return out;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
  }
  double l1_norm() const {
    double s = 0;
    for (const auto& v : c_) s += std::abs(v);
    return s;
  }
  double l2_squared() const {
    double s = 0;
    for (const auto& v : c_) s += std::norm(v);
    return s;
  }

  /// max |u_nu - conj(u_{-nu})|
  double reality_defect() const {
    double m = 0;
    for (std::size_t i = 0; i < c_.size(); ++i) m = std::max(m, std::abs(c_[i] - std::conj(at(-mode_at(i)))));
    return m;
  }
  void symmetrize() {
    for (std::size_t i = 0; i < c_.size(); ++i) {
      const Mode m = mode_at(i);
      if (m < -m) continue;
      const cplx v = 0.5 * (c_[i] + std::conj(c_[index(-m)]));
      c_[i] = v;
      c_[index(-m)] = std::conj(v);
    }
  }

  /// u(psi) at one point, real part.
  double evaluate(double psi1, double psi2) const {
    double s = 0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == cplx{}) continue;
      const Mode m = mode_at(i);
      s += (c_[i] * std::polar(1.0, m.n1 * psi1 + m.n2 * psi2)).real();
    }
    return s;
  }

  FourierField& operator+=(const FourierField& o) {
    const int r = std::min(N_, o.N_);
    for (int a = -r; a <= r; ++a)
      for (int b = -r; b <= r; ++b) (*this)[{a, b}] += o[{a, b}];
    return *this;
  }
  FourierField& operator-=(const FourierField& o) {
    const int r = std::min(N_, o.N_);
    for (int a = -r; a <= r; ++a)
      for (int b = -r; b <= r; ++b) (*this)[{a, b}] -= o[{a, b}];
    return *this;
  }
  FourierField& operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
  friend FourierField operator*(cplx s, FourierField a) { return a *= s; }

  static FourierField constant(int N, double v) {
    FourierField f(N);
    f[{0, 0}] = v;
    return f;
  }
  /// amp * cos(nu . psi)
  static FourierField cosine(int N, Mode nu, double amp = 1.0) {
    FourierField f(N);
    f.set_real_pair(nu, nu.is_zero() ? amp : 0.5 * amp);
    return f;
  }

 private:
  int N_;
  bool zero_mean_;
  std::vector<cplx> c_;
};

inline double max_abs_diff(const FourierField& a, const FourierField& b) {
  const int r = std::max(a.N_modes(), b.N_modes());
  double m = 0;
  for (int x = -r; x <= r; ++x)
    for (int y = -r; y <= r; ++y) m = std::max(m, std::abs(a.at({x, y}) - b.at({x, y})));
  return m;
}

namespace detail {

// fftw planning is not thread-safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

/// M x M complex transform pair with owned buffer.
class SpectralGrid {
 public:
  explicit SpectralGrid(int M) : M_(M) {
    buf_.reset(fftw_alloc_complex(static_cast<std::size_t>(M) * M));
    std::lock_guard lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_2d(M, M, buf_.get(), buf_.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(M, M, buf_.get(), buf_.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~SpectralGrid() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int size() const { return M_; }
  cplx* data() { return reinterpret_cast<cplx*>(buf_.get()); }

  /// Coefficients -> grid values u(2 pi j / M). Modes beyond M/2 fold.
  void synthesize(const FourierField& u) {
    std::fill(data(), data() + static_cast<std::size_t>(M_) * M_, cplx{});
    const int N = u.N_modes();
    for (int a = -N; a <= N; ++a)
      for (int b = -N; b <= N; ++b) {
        const cplx v = u[{a, b}];
        if (v == cplx{}) continue;
        data()[slot(a) * M_ + slot(b)] += v;
      }
    fftw_execute(bwd_);
  }

  /// Grid values -> coefficients, truncated to radius N.
  FourierField analyze(int N, bool zero_mean = false) {
    fftw_execute(fwd_);
    FourierField out(N, zero_mean);
    const double scale = 1.0 / (static_cast<double>(M_) * M_);
    for (int a = -N; a <= N; ++a)
      for (int b = -N; b <= N; ++b) out[{a, b}] = data()[slot(a) * M_ + slot(b)] * scale;
    if (zero_mean) out[{0, 0}] = 0.0;
    return out;
  }

 private:
  std::size_t slot(int k) const { return static_cast<std::size_t>(((k % M_) + M_) % M_); }

  int M_;
  std::unique_ptr<fftw_complex, FftwDeleter> buf_;
  fftw_plan fwd_{};
  fftw_plan bwd_{};
};

/// Per-thread cache, one grid per size.
inline SpectralGrid& grid_for(int M) {
  thread_local std::map<int, std::unique_ptr<SpectralGrid>> cache;
  auto& slot = cache[M];
  if (!slot) slot = std::make_unique<SpectralGrid>(M);
  return *slot;
}

inline int next_pow2(int x) {
  int p = 1;
  while (p < x) p <<= 1;
  return p;
}

}  // namespace detail

/// Grid size with no aliasing for a degree-`degree` polynomial of fields of radius N.
inline int alias_free_grid(int N, int degree) { return detail::next_pow2(std::max(2 * degree * N + 1, 4)); }

/// Direct O(M^2) convolution, truncated to max radius.
inline FourierField multiply_direct(const FourierField& a, const FourierField& b, int N_out = -1) {
  if (N_out < 0) N_out = std::max(a.N_modes(), b.N_modes());
  FourierField out(N_out);
  for (const Mode m : a.support())
    for (const Mode n : b.support()) {
      const Mode s = m + n;
      if (out.contains(s)) out[s] += a[m] * b[n];
    }
  return out;
}

/// Spectral product truncated to the larger radius.
inline FourierField multiply(const FourierField& a, const FourierField& b) {
  const int N = std::max(a.N_modes(), b.N_modes());
  auto& g = detail::grid_for(alias_free_grid(N, 2));
  const std::size_t n = static_cast<std::size_t>(g.size()) * g.size();
  g.synthesize(a);
  std::vector<cplx> va(g.data(), g.data() + n);
  g.synthesize(b);
  for (std::size_t i = 0; i < n; ++i) g.data()[i] *= va[i];
  return g.analyze(N);
}

/// Polynomial nonlinearity g(c + x) = g_c + sum_{p>=1} coeffs[p] x^p.
struct Polynomial {
  double g_c = 0.0;
  std::vector<double> coeffs;  // coeffs[0] unused

  int degree() const {
    for (int p = static_cast<int>(coeffs.size()) - 1; p >= 1; --p)
      if (coeffs[static_cast<std::size_t>(p)] != 0.0) return p;
    return 0;
  }
  double operator()(double x) const {
    double s = 0;
    for (int p = degree(); p >= 1; --p) s = (s + coeffs[static_cast<std::size_t>(p)]) * x;
    return s + g_c;
  }
  cplx operator()(cplx x) const {
    cplx s = 0;
    for (int p = degree(); p >= 1; --p) s = (s + coeffs[static_cast<std::size_t>(p)]) * x;
    return s + g_c;
  }
  Polynomial derivative() const {
    Polynomial d;
    const int P = degree();
    d.g_c = P >= 1 ? coeffs[1] : 0.0;
    d.coeffs.assign(static_cast<std::size_t>(std::max(P, 1)), 0.0);
    for (int p = 2; p <= P; ++p) d.coeffs[static_cast<std::size_t>(p - 1)] = p * coeffs[static_cast<std::size_t>(p)];
    return d;
  }
};

/// [g(c + zeta + u)]_nu for |nu|_inf <= N(u), one truncation at the end.
inline FourierField compose_poly(const Polynomial& g, double zeta, const FourierField& u) {
  const int N = u.N_modes();
  const int P = std::max(g.degree(), 1);
  auto& grid = detail::grid_for(alias_free_grid(N, P));
  const std::size_t n = static_cast<std::size_t>(grid.size()) * grid.size();
  grid.synthesize(u);
  cplx* d = grid.data();
  for (std::size_t i = 0; i < n; ++i) d[i] = g(zeta + d[i]);
  return grid.analyze(N);
}

/// Oracle path: binomial expansion with exact direct powers, truncated at the end.
inline FourierField compose_poly_direct(const Polynomial& g, double zeta, const FourierField& u) {
  const int N = u.N_modes();
  const int P = g.degree();
  std::vector<FourierField> powers;  // u^q untruncated
  powers.push_back(FourierField::constant(0, 1.0));
  for (int q = 1; q <= P; ++q) powers.push_back(multiply_direct(powers.back(), u, q * N));
  FourierField out(P * N);
  out[{0, 0}] += g.g_c;
  for (int p = 1; p <= P; ++p) {
    const double gp = g.coeffs[static_cast<std::size_t>(p)];
    if (gp == 0.0) continue;
    double binom = 1;
    for (int q = 0; q <= p; ++q) {
      const cplx w = gp * binom * std::pow(zeta, p - q);
      out += (w * powers[static_cast<std::size_t>(q)]);
      binom = binom * (p - q) / (q + 1);
    }
  }
  return out.resized(N);
}

/// max |u(psi)| on a uniform M x M grid, M rounded up to a power of two so
/// that grids are nested and the result is nondecreasing in grid_size.
inline double sup_norm(const FourierField& u, int grid_size) {
  const int M = detail::next_pow2(std::max(grid_size, 1));
  auto& g = detail::grid_for(M);
  g.synthesize(u);
  double m = 0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(M) * M; ++i) m = std::max(m, std::abs(g.data()[i]));
  return m;
}

/// Mean of |u|^2 over an M x M grid.
inline double grid_mean_square(const FourierField& u, int grid_size) {
  auto& g = detail::grid_for(grid_size);
  g.synthesize(u);
  const std::size_t n = static_cast<std::size_t>(grid_size) * grid_size;
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(g.data()[i]);
  return s / static_cast<double>(n);
}

struct DecayFit {
  double amplitude = 0;  // K
  double rate = 0;       // lambda in K e^{-lambda s}
  std::vector<std::pair<int, double>> shells;  // (|nu|_1, max |u_nu|) used in the fit
};

/// Least squares of log max_{|nu|_1 = s} |u_nu| against s. Shells below
/// rel_floor * (largest coefficient) are treated as round-off and dropped.
inline DecayFit decay_fit(const FourierField& u, double rel_floor = 1e-15) {
  std::map<int, double> shell;
  for (std::size_t i = 0; i < u.data().size(); ++i) {
    const double a = std::abs(u.data()[i]);
    if (a == 0.0) continue;
    auto& s = shell[u.mode_at(i).l1()];
    s = std::max(s, a);
  }
  const double top = u.max_abs();
  DecayFit fit;
  for (const auto& [s, a] : shell)
    if (a > rel_floor * top) fit.shells.emplace_back(s, a);
  if (fit.shells.size() < 5) fail(ErrorKind::TooFewShells, std::to_string(fit.shells.size()) + " nonzero shells");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(fit.shells.size());
  for (const auto& [s, a] : fit.shells) {
    const double y = std::log(a);
    sx += s;
    sy += y;
    sxx += double(s) * s;
    sxy += s * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.rate = -slope;
  fit.amplitude = std::exp((sy - slope * sx) / n);
  return fit;
}

}  // namespace resp
