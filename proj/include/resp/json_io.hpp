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

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "resp/admissible.hpp"
#include "resp/simulate.hpp"
#include "resp/solver.hpp"

namespace resp {

using Json = nlohmann::ordered_json;

namespace detail {

inline void write_json(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string pad_end(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent, depth + 1);
      }
      os << '\n' << pad_end << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent, depth + 1);
      }
      os << '\n' << pad_end << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.16e", v);
      os << buf;
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Deterministic text: insertion-ordered keys, floats as %.16e.
inline std::string dump_json(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  os << '\n';
  return os.str();
}

/// Parses JSON text; syntax errors carry line and column.
inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorKind::ConfigError, "JSON syntax error at line " + std::to_string(line) + ", column " +
                                     std::to_string(col) + ": " + e.what());
  }
}

struct TreeConfig {
  int k_max = 7;
  int nu_l1_max = 3;
  std::optional<double> zeta;  // 0 when absent
  bool renormalized = false;
  double budget = 5e6;
};

struct OutputConfig {
  std::string json;  // empty: stdout
  std::string csv;   // empty: no CSV
};

struct SimulateSection {
  SimConfig sim;
  bool has_epsilon = false;
  std::optional<double> t_transient;
  bool compare = true;
};

struct ExperimentConfig {
  Json alpha_json;
  PartialQuotientSource alpha = PartialQuotientSource::golden();
  ModelSpec model;
  RegularityBudget budget;
  std::size_t n_max = 20;
  std::size_t depth = 30;
  SolveConfig solve;
  bool has_epsilon = false;
  SimulateSection simulate;
  TreeConfig trees;
  OutputConfig output;
  Json echo;  // normalised input, echoed into every output
};

namespace detail {

inline void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(ErrorKind::ConfigError, where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) fail(ErrorKind::ConfigError, where + ": unknown key '" + it.key() + "'");
}

template <class T>
T get_or(const Json& obj, const char* key, T def, const std::string& where) {
  if (!obj.contains(key)) return def;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::ConfigError, where + "." + key + ": wrong type");
  }
}

inline BigInt big_from_json(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return BigInt(v.get<long long>());
  if (v.is_string()) {
    try {
      return BigInt(v.get<std::string>());
    } catch (...) {
    }
  }
  fail(ErrorKind::ConfigError, where + ": expected an integer");
}

inline BigInt euler_quotient(std::size_t k) {
  if (k == 0) return 2;
  return k % 3 == 2 ? BigInt(2 * (k + 1) / 3) : BigInt(1);
}

}  // namespace detail

/// Frequency from its JSON description.
inline PartialQuotientSource alpha_from_json(const Json& a) {
  using detail::get_or;
  if (a.is_string()) return alpha_from_json(Json{{"kind", a.get<std::string>()}});
  detail::check_keys(a, "alpha", {"kind", "a0", "quotients", "strict", "A", "B", "C", "sign", "digits",
                                  "certified_digits"});
  const auto kind = get_or<std::string>(a, "kind", "golden", "alpha");
  try {
    if (kind == "golden") return PartialQuotientSource::golden();
    if (kind == "sqrt2") return PartialQuotientSource::sqrt2();
    if (kind == "euler")
      return PartialQuotientSource::sequence(detail::euler_quotient, "e = [2;1,2,1,1,4,...]");
    if (kind == "liouville")
      return PartialQuotientSource::sequence([](std::size_t k) { return k == 0 ? BigInt(0) : BigInt(1) << k; },
                                             "a_k = 2^k");
    if (kind == "double_exponential")
      return PartialQuotientSource::sequence(
          [](std::size_t k) { return k == 0 ? BigInt(0) : BigInt(1) << (std::size_t{1} << std::min<std::size_t>(k, 20)); },
          "a_k = 2^(2^k)");
    if (kind == "factorial")
      return PartialQuotientSource::sequence(
          [](std::size_t k) {
            BigInt f = 1;
            for (std::size_t i = 2; i <= k; ++i) f *= i;
            return k == 0 ? BigInt(0) : f;
          },
          "a_k = k!");
    if (kind == "list") {
      if (!a.contains("quotients") || !a["quotients"].is_array() || a["quotients"].empty())
        fail(ErrorKind::ConfigError, "alpha.quotients: non-empty array required");
      std::vector<BigInt> tail;
      for (const auto& q : a["quotients"]) tail.push_back(detail::big_from_json(q, "alpha.quotients"));
      const BigInt a0 = a.contains("a0") ? detail::big_from_json(a["a0"], "alpha.a0") : BigInt(0);
      return PartialQuotientSource::list(a0, tail, get_or<bool>(a, "strict", false, "alpha"));
    }
    if (kind == "quadratic") {
      return PartialQuotientSource::quadratic(detail::big_from_json(a.value("A", Json()), "alpha.A"),
                                              detail::big_from_json(a.value("B", Json()), "alpha.B"),
                                              detail::big_from_json(a.value("C", Json()), "alpha.C"),
                                              get_or<int>(a, "sign", 1, "alpha"));
    }
    if (kind == "decimal") {
      const auto digits = get_or<std::string>(a, "digits", "", "alpha");
      const int cd = get_or<int>(a, "certified_digits", static_cast<int>(digits.size()), "alpha");
      return PartialQuotientSource::decimal(digits, cd);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    fail(ErrorKind::ConfigError, std::string("alpha: ") + e.what());
  }
  fail(ErrorKind::ConfigError, "alpha.kind: unknown kind '" + kind + "'");
}

/// f from [{nu:[a,b], re, im}] or [{nu, amp}] (amp cos(nu . psi)); missing
/// conjugate partners are filled in.
inline FourierField field_from_json(const Json& arr, const std::string& where) {
  if (!arr.is_array()) fail(ErrorKind::ConfigError, where + ": expected an array");
  int N = 0;
  for (const auto& e : arr) {
    detail::check_keys(e, where + "[]", {"nu", "re", "im", "amp"});
    if (!e.contains("nu") || !e["nu"].is_array() || e["nu"].size() != 2)
      fail(ErrorKind::ConfigError, where + "[].nu: expected [n1, n2]");
    N = std::max({N, std::abs(e["nu"][0].get<int>()), std::abs(e["nu"][1].get<int>())});
  }
  FourierField f(std::max(N, 1));
  std::vector<char> given(f.data().size(), 0);
  for (const auto& e : arr) {
    const Mode m{e["nu"][0].get<int>(), e["nu"][1].get<int>()};
    cplx v;
    if (e.contains("amp")) {
      const double amp = detail::get_or<double>(e, "amp", 0.0, where);
      if (m.is_zero()) {
        f[m] += amp;
      } else {
        f[m] += 0.5 * amp;
        f[-m] += 0.5 * amp;
      }
      given[f.index(m)] = given[f.index(-m)] = 1;
      continue;
    }
    v = {detail::get_or<double>(e, "re", 0.0, where), detail::get_or<double>(e, "im", 0.0, where)};
    f[m] = v;
    given[f.index(m)] = 1;
  }
  for (std::size_t i = 0; i < given.size(); ++i) {
    const Mode m = f.mode_at(i);
    if (given[i] && !given[f.index(-m)]) f[-m] = std::conj(f.data()[i]);
  }
  if (f.reality_defect() > 1e-14 * std::max(1.0, f.max_abs()))
    fail(ErrorKind::ConfigError, where + ": coefficients violate f_{-nu} = conj(f_nu)");
  return f;
}

inline Json field_to_json(const FourierField& u) {
  Json coeffs = Json::array();
  for (Mode m : u.support())
    coeffs.push_back(Json{{"nu", {m.n1, m.n2}}, {"re", u[m].real()}, {"im", u[m].imag()}});
  return Json{{"N_modes", u.N_modes()}, {"coeffs", coeffs}};
}

inline ExperimentConfig parse_config(const Json& root) {
  using detail::get_or;
  detail::check_keys(root, "config", {"alpha", "model", "budget", "solve", "simulate", "trees", "output"});
  ExperimentConfig cfg;
  cfg.alpha_json = root.value("alpha", Json("golden"));
  cfg.alpha = alpha_from_json(cfg.alpha_json);
  cfg.model.alpha = cfg.alpha;

  if (root.contains("model")) {
    const auto& m = root["model"];
    detail::check_keys(m, "model", {"goth_n", "c", "g", "f", "xi"});
    cfg.model.goth_n = get_or<int>(m, "goth_n", 3, "model");
    cfg.model.c = get_or<double>(m, "c", 0.0, "model");
    cfg.model.xi = get_or<double>(m, "xi", 1.0, "model");
    if (m.contains("g")) {
      cfg.model.g_coeffs = get_or<std::vector<double>>(m, "g", {}, "model");
    } else {
      cfg.model.g_coeffs.assign(static_cast<std::size_t>(cfg.model.goth_n) + 1, 0.0);
      cfg.model.g_coeffs.back() = 1.0;
    }
    if (m.contains("f")) cfg.model.f = field_from_json(m["f"], "model.f");
    else cfg.model.f = monomial_model(1).f;
  } else {
    cfg.model = monomial_model(3, cfg.alpha);
  }
  try {
    cfg.model.validate();
  } catch (const Error& e) {
    fail(ErrorKind::ConfigError, std::string("model: ") + e.what());
  }

  cfg.budget.goth_n = cfg.model.goth_n;
  cfg.budget.xi = cfg.model.xi;
  if (root.contains("budget")) {
    const auto& b = root["budget"];
    detail::check_keys(b, "budget", {"eta0", "Phi", "Gamma", "rho", "n_max", "depth"});
    cfg.budget.eta0 = get_or<double>(b, "eta0", cfg.budget.eta0, "budget");
    cfg.budget.Phi = get_or<double>(b, "Phi", cfg.budget.Phi, "budget");
    cfg.budget.Gamma = get_or<double>(b, "Gamma", cfg.budget.Gamma, "budget");
    cfg.budget.rho = get_or<double>(b, "rho", cfg.budget.rho, "budget");
    cfg.n_max = get_or<std::size_t>(b, "n_max", cfg.n_max, "budget");
    cfg.depth = get_or<std::size_t>(b, "depth", cfg.depth, "budget");
  }

  if (root.contains("solve")) {
    const auto& s = root["solve"];
    detail::check_keys(s, "solve", {"epsilon", "N_modes", "tol_range", "tol_bif", "max_newton", "zeta_bracket", "C1",
                                    "scan_points", "ode_points", "ode_t_end", "method"});
    auto& c = cfg.solve;
    cfg.has_epsilon = s.contains("epsilon");
    c.epsilon = get_or<double>(s, "epsilon", 0.0, "solve");
    c.N_modes = get_or<int>(s, "N_modes", c.N_modes, "solve");
    c.tol_range = get_or<double>(s, "tol_range", c.tol_range, "solve");
    c.tol_bif = get_or<double>(s, "tol_bif", c.tol_bif, "solve");
    c.max_newton = get_or<int>(s, "max_newton", c.max_newton, "solve");
    c.C1 = get_or<double>(s, "C1", c.C1, "solve");
    c.scan_points = get_or<int>(s, "scan_points", c.scan_points, "solve");
    c.ode_points = get_or<int>(s, "ode_points", c.ode_points, "solve");
    c.ode_t_end = get_or<double>(s, "ode_t_end", c.ode_t_end, "solve");
    if (s.contains("zeta_bracket")) {
      const auto zb = get_or<std::vector<double>>(s, "zeta_bracket", {}, "solve");
      if (zb.size() != 2) fail(ErrorKind::ConfigError, "solve.zeta_bracket: expected [lo, hi]");
      c.zeta_bracket = {{zb[0], zb[1]}};
    }
    const auto method = get_or<std::string>(s, "method", "newton", "solve");
    if (method != "newton" && method != "picard") fail(ErrorKind::ConfigError, "solve.method: newton or picard");
    c.picard = method == "picard";
  }

  if (root.contains("simulate")) {
    const auto& s = root["simulate"];
    detail::check_keys(s, "simulate", {"epsilon", "t_end", "dt", "x0", "v0", "method", "record_every",
                                       "t_transient", "compare"});
    auto& sim = cfg.simulate.sim;
    cfg.simulate.has_epsilon = s.contains("epsilon");
    sim.epsilon = get_or<double>(s, "epsilon", 0.0, "simulate");
    sim.t_end = get_or<double>(s, "t_end", sim.t_end, "simulate");
    sim.dt = get_or<double>(s, "dt", sim.dt, "simulate");
    sim.x0 = get_or<double>(s, "x0", sim.x0, "simulate");
    sim.v0 = get_or<double>(s, "v0", sim.v0, "simulate");
    sim.record_every = get_or<int>(s, "record_every", sim.record_every, "simulate");
    const auto method = get_or<std::string>(s, "method", "implicit-midpoint", "simulate");
    if (method == "implicit-midpoint") sim.method = Integrator::ImplicitMidpoint;
    else if (method == "implicit-euler") sim.method = Integrator::ImplicitEuler;
    else fail(ErrorKind::ConfigError, "simulate.method: implicit-midpoint or implicit-euler");
    if (s.contains("t_transient")) cfg.simulate.t_transient = get_or<double>(s, "t_transient", 0.0, "simulate");
    cfg.simulate.compare = get_or<bool>(s, "compare", true, "simulate");
  }

  if (root.contains("trees")) {
    const auto& t = root["trees"];
    detail::check_keys(t, "trees", {"k_max", "nu_l1_max", "zeta", "renormalized", "budget"});
    cfg.trees.k_max = get_or<int>(t, "k_max", cfg.trees.k_max, "trees");
    cfg.trees.nu_l1_max = get_or<int>(t, "nu_l1_max", cfg.trees.nu_l1_max, "trees");
    if (t.contains("zeta")) cfg.trees.zeta = get_or<double>(t, "zeta", 0.0, "trees");
    cfg.trees.renormalized = get_or<bool>(t, "renormalized", false, "trees");
    cfg.trees.budget = get_or<double>(t, "budget", cfg.trees.budget, "trees");
  }

  if (root.contains("output")) {
    const auto& o = root["output"];
    detail::check_keys(o, "output", {"json", "csv"});
    cfg.output.json = get_or<std::string>(o, "json", "", "output");
    cfg.output.csv = get_or<std::string>(o, "csv", "", "output");
  }
  cfg.echo = root;
  return cfg;
}

inline Json admissible_to_json(const AdmissibleSet& s) {
  Json iv = Json::array(), holes = Json::array();
  for (const auto& m : s.intervals)
    iv.push_back(Json{{"lower", m.lower()}, {"upper", m.upper()}, {"n", m.n_first}, {"n_last", m.n_last}});
  for (const auto& h : s.holes)
    holes.push_back(Json{{"from", h.from()}, {"to", h.to()}, {"width", h.width()}, {"after_n", h.after_n}});
  return Json{{"intervals", iv},           {"holes", holes},
              {"hole_free", s.hole_free()}, {"N", s.N},
              {"n_max", s.n_max},           {"truncated", s.truncated},
              {"contains_zero_closure", s.contains_zero_closure},
              {"indeterminate", s.indeterminate_count()},
              {"constants", s.constants}};
}

inline Json solve_result_to_json(const SolveResult& r) {
  Json s1 = Json::array();
  for (Mode m : r.scale1_modes) s1.push_back({m.n1, m.n2});
  return Json{{"zeta", r.zeta},
              {"roots", r.roots},
              {"range_residual", r.range_residual},
              {"bif_residual", r.bif_residual},
              {"ode_residual", r.ode_residual},
              {"scale1_modes", s1},
              {"newton_iters", r.newton_iters},
              {"bisection_steps", r.bisection_steps},
              {"u", field_to_json(r.u)}};
}

}  // namespace resp
