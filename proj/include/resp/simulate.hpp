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
#include <string>
#include <vector>

#include "resp/model.hpp"
#include "resp/solver.hpp"

namespace resp {

enum class Integrator { ImplicitMidpoint, ImplicitEuler };

struct SimConfig {
  double epsilon = 0.0;
  double t_end = 100.0;
  double dt = 1e-3;
  double x0 = 0.0;
  double v0 = 0.0;
  Integrator method = Integrator::ImplicitMidpoint;
  int record_every = 1;

  void validate() const {
    if (!(epsilon > 0)) fail(ErrorKind::InvalidArgument, "epsilon must be > 0");
    if (!(dt > 0) || !(t_end > 0)) fail(ErrorKind::InvalidArgument, "dt and t_end must be > 0");
    if (record_every < 1) fail(ErrorKind::InvalidArgument, "record_every must be >= 1");
  }
};

struct TimeSeries {
  std::vector<double> t, x, v;
  std::vector<std::string> warnings;
};

/// Right-hand side of eps x'' + x' + eps g(x) = eps f(omega t) as a first
/// order system in (x, v).
class ForcedOscillator {
 public:
  ForcedOscillator(const ModelSpec& spec, double eps) : c_(spec.c), eps_(eps), g_(spec.g_relative()), dg_(g_.derivative()) {
    for (Mode m : spec.f.support()) {
      if (m.is_zero()) continue;  // f_0 balances g(c)
      modes_.push_back(spec.f[m]);
      freq_.push_back(small_divisor(spec.alpha, m, 1e-15).signed_value());
    }
  }

  /// f(omega t) - f_0
  double forcing(double t) const {
    double s = 0;
    for (std::size_t i = 0; i < modes_.size(); ++i) s += (modes_[i] * std::polar(1.0, freq_[i] * t)).real();
    return s;
  }
  /// v' = f~(t) - G(x - c) - v / eps
  double accel(double t, double x, double v) const { return forcing(t) - g_(x - c_) - v / eps_; }
  double dG(double x) const { return dg_(x - c_); }
  double eps() const { return eps_; }

 private:
  double c_, eps_;
  Polynomial g_, dg_;
  std::vector<cplx> modes_;
  std::vector<double> freq_;
};

/// Fixed-step implicit integration with a 2x2 Newton solve per step.
inline TimeSeries integrate(const ModelSpec& spec, const SimConfig& sim) {
  sim.validate();
  const ForcedOscillator ode(spec, sim.epsilon);
  TimeSeries out;
  if (sim.dt > sim.epsilon / 2)
    out.warnings.push_back("dt > eps/2: step exceeds the fast relaxation scale");
  const auto steps = static_cast<long long>(std::ceil(sim.t_end / sim.dt - 1e-9));
  const double h = sim.t_end / static_cast<double>(steps);
  double x = sim.x0, v = sim.v0;
  auto record = [&](double t) {
    out.t.push_back(t);
    out.x.push_back(x);
    out.v.push_back(v);
  };
  record(0.0);
  const bool mid = sim.method == Integrator::ImplicitMidpoint;
  const double theta = mid ? 0.5 : 1.0;
  for (long long n = 0; n < steps; ++n) {
    const double t = n * h;
    const double ts = mid ? t + 0.5 * h : t + h;
    double X = x + h * v, V = v;  // predictor
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      const double xs = (1 - theta) * x + theta * X;
      const double vs = (1 - theta) * v + theta * V;
      const double r1 = X - x - h * vs;
      const double r2 = V - v - h * ode.accel(ts, xs, vs);
      // J = I - h theta [[0, 1], [-g'(xs), -1/eps]]
      const double a = 1.0, b = -h * theta;
      const double c = h * theta * ode.dG(xs), d = 1.0 + h * theta / sim.epsilon;
      const double det = a * d - b * c;
      if (det == 0.0 || !std::isfinite(det)) break;
      const double dx = (d * r1 - b * r2) / det;
      const double dv = (a * r2 - c * r1) / det;
      X -= dx;
      V -= dv;
      if (std::abs(dx) <= 1e-12 * (1 + std::abs(X)) && std::abs(dv) <= 1e-12 * (1 + std::abs(V))) {
        ok = true;
        break;
      }
    }
    if (!ok || !std::isfinite(X) || !std::isfinite(V))
      fail(ErrorKind::NewtonStepFailure, "implicit step failed at t = " + std::to_string(t));
    x = X;
    v = V;
    if ((n + 1) % sim.record_every == 0 || n + 1 == steps) record((n + 1) * h);
  }
  return out;
}

/// Default transient cutoff: 20 eps log(1/tol), plus log(1/tol) / (eps g_1)
/// when g'(c) != 0 (slow relaxation along the x direction).
inline double default_transient(const ModelSpec& spec, double eps, double tol) {
  double t = 20 * eps * std::log(1 / tol);
  if (spec.g_coeffs.size() > 1 && spec.g_coeffs[1] > 0) t += std::log(1 / tol) / (eps * spec.g_coeffs[1]);
  return t;
}

/// sup over t > t_transient of |x_sim(t) - (c + zeta + u(omega t))|.
inline double compare_with_spectral(const ModelSpec& spec, const TimeSeries& series, double zeta,
                                    const FourierField& u, double t_transient) {
  std::vector<Mode> su = u.support();
  std::vector<double> w;
  for (Mode m : su) w.push_back(small_divisor(spec.alpha, m, 1e-15).signed_value());
  double dev = 0;
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    if (series.t[k] <= t_transient) continue;
    cplx U = 0;
    for (std::size_t i = 0; i < su.size(); ++i) U += u[su[i]] * std::polar(1.0, w[i] * series.t[k]);
    dev = std::max(dev, std::abs(series.x[k] - (spec.c + zeta + U.real())));
  }
  return dev;
}

inline double compare_with_spectral(const ModelSpec& spec, const TimeSeries& series, const SolveResult& r,
                                    double t_transient) {
  return compare_with_spectral(spec, series, r.zeta, r.u, t_transient);
}

}  // namespace resp
