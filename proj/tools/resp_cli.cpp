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


// resp: command-line front end. Subcommands classify, admissible, solve,
// trees, simulate; each reads a JSON config plus a few shorthand flags.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "resp/resp.hpp"

namespace {

using namespace resp;

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kNoBracket = 3, kNoConvergence = 4, kBudget = 5 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidArgument: return kConfig;
    case ErrorKind::NoBracket: return kNoBracket;
    case ErrorKind::NoConvergence:
    case ErrorKind::SingularJacobian:
    case ErrorKind::NewtonStepFailure: return kNoConvergence;
    case ErrorKind::BudgetExceeded: return kBudget;
    default: return kOther;
  }
}

struct Flags {
  std::string config;
  std::string alpha;
  std::string quotients;
  std::optional<double> eps;
  std::optional<int> gothn;
  std::string out;
  std::string csv;
};

Json load_config(const Flags& fl) {
  Json root = Json::object();
  if (!fl.config.empty()) {
    std::ifstream in(fl.config);
    if (!in) fail(ErrorKind::ConfigError, "cannot open " + fl.config);
    std::stringstream ss;
    ss << in.rdbuf();
    root = parse_json_text(ss.str());
    if (!root.is_object()) fail(ErrorKind::ConfigError, "config: top level must be an object");
  }
  if (!fl.alpha.empty()) {
    const std::string k = fl.alpha == "e" ? "euler" : fl.alpha;
    root["alpha"] = Json{{"kind", k}};
  }
  if (!fl.quotients.empty()) {
    Json q = Json::array();
    std::stringstream ss(fl.quotients);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        q.push_back(std::stoll(tok));
      } catch (...) {
        fail(ErrorKind::ConfigError, "--quotients: not an integer: '" + tok + "'");
      }
    }
    if (q.size() < 2) fail(ErrorKind::ConfigError, "--quotients: need a0 and at least one more term");
    Json tail(q.begin() + 1, q.end());
    root["alpha"] = Json{{"kind", "list"}, {"a0", q[0]}, {"quotients", tail}};
  }
  if (fl.gothn) {
    if (!root.contains("model")) root["model"] = Json::object();
    root["model"]["goth_n"] = *fl.gothn;
    if (root["model"].contains("g")) root["model"].erase("g");
  }
  if (fl.eps) {
    for (const char* sec : {"solve", "simulate"}) {
      if (!root.contains(sec)) root[sec] = Json::object();
      root[sec]["epsilon"] = *fl.eps;
    }
  }
  if (!fl.out.empty() || !fl.csv.empty()) {
    if (!root.contains("output")) root["output"] = Json::object();
    if (!fl.out.empty()) root["output"]["json"] = fl.out;
    if (!fl.csv.empty()) root["output"]["csv"] = fl.csv;
  }
  return root;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream o(path);
  if (!o) fail(ErrorKind::ConfigError, "cannot write " + path);
  o << text;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

Json constants_json(const OptimalConstants& k) {
  return Json{{"C0", k.C0}, {"C0_exact", k.C0_exact.str()}, {"a0", k.a0},       {"b0", k.b0},
              {"x_star", k.x_star}, {"N", k.N},           {"q_N", k.q_N.str()}, {"C1_star", k.C1_star}};
}

Json header(const char* cmd, const ExperimentConfig& cfg) {
  return Json{{"command", cmd}, {"alpha", cfg.alpha.describe()}, {"config", cfg.echo}};
}

// classify: convergents, Bryuno terms, Diophantine fit, overlap table.
int cmd_classify(const ExperimentConfig& cfg) {
  const auto fc = classify(cfg.alpha, cfg.budget, cfg.depth);
  const auto c = convergents(cfg.alpha, cfg.depth);
  PartialQuotientSource::Stream st(cfg.alpha);
  Json conv = Json::array();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto a = st.next();
    Json row{{"k", k}, {"a", a ? a->str() : std::string()}, {"p", c[k].p.str()}, {"q", c[k].q.str()},
             {"log_distance", fc.log_distance[k]}};
    // growth rate log(q_k)/k; tends to log(phi) for the golden mean
    row["log_q_over_k"] = k ? log_abs(c[k].q) / static_cast<double>(k) : 0.0;
    conv.push_back(row);
  }
  Json overlap = Json::array();
  for (const auto& r : fc.overlap)
    overlap.push_back(Json{{"n", r.n}, {"margin", r.margin}, {"holds", r.holds}, {"indeterminate", r.indeterminate}});
  Json out = header("classify", cfg);
  out["depth"] = fc.depth;
  out["convergents"] = conv;
  out["brjuno"] = Json{{"terms", fc.brjuno.terms},
                       {"partial_sums", fc.brjuno.partial_sums},
                       {"appears_divergent", fc.brjuno.appears_divergent}};
  out["diophantine"] = Json{{"gamma", fc.diophantine.gamma}, {"tau", fc.diophantine.tau},
                            {"tested", fc.diophantine.tested}};
  out["constants"] = constants_json(fc.constants);
  out["overlap"] = overlap;
  write_text(cfg.output.json, dump_json(out));
  return kOk;
}

int cmd_admissible(const ExperimentConfig& cfg) {
  const auto r = build_frakJ(cfg.alpha, cfg.budget, cfg.n_max);
  Json out = header("admissible", cfg);
  out["set"] = admissible_to_json(r.set);
  out["constants"] = constants_json(r.constants);
  Json cond = Json::array();
  for (std::size_t n = 0; n < r.condition_margin.size(); ++n)
    cond.push_back(Json{{"n", n},
                        {"margin", r.condition_margin[n]},
                        {"predicate", to_string(r.predicate_status[n])},
                        {"endpoints", to_string(r.endpoint_status[n])}});
  out["condition"] = cond;
  write_text(cfg.output.json, dump_json(out));
  if (!cfg.output.csv.empty()) {
    std::string csv = "lower,upper,n,hole_to_next\n";
    for (const auto& iv : r.set.intervals) {
      double gap = 0.0;
      for (const auto& h : r.set.holes)
        if (h.after_n == iv.n_last) gap = h.width();
      csv += num(iv.lower()) + "," + num(iv.upper()) + "," + std::to_string(iv.n_first) + "," + num(gap) + "\n";
    }
    write_text(cfg.output.csv, csv);
  }
  return kOk;
}

SolveConfig solve_config(const ExperimentConfig& cfg, double eps) {
  SolveConfig s = cfg.solve;
  s.epsilon = eps;
  return s;
}

int cmd_solve(const ExperimentConfig& cfg) {
  if (!cfg.has_epsilon) fail(ErrorKind::ConfigError, "solve.epsilon is required (or pass --eps)");
  const SolveConfig sc = solve_config(cfg, cfg.solve.epsilon);
  Json out = header("solve", cfg);

  // Where does epsilon sit relative to the admissible set?
  std::string warning;
  try {
    const auto fr = build_frakJ(cfg.alpha, cfg.budget, cfg.n_max);
    if (!fr.set.contains(sc.epsilon)) {
      bool in_hole = false;
      for (const auto& h : fr.set.holes)
        if (sc.epsilon > h.from() && sc.epsilon < h.to()) in_hole = true;
      warning = in_hole ? "epsilon lies in a hole of the admissible set"
                        : "epsilon lies outside the admissible set";
    }
  } catch (const Error& e) {
    warning = std::string("admissible set unavailable: ") + e.what();
  }
  if (!warning.empty()) out["warning"] = warning;

  const SolveResult r = solve_response(cfg.model, sc);
  out["result"] = solve_result_to_json(r);
  write_text(cfg.output.json, dump_json(out));
  if (!cfg.output.csv.empty()) {
    const DivisorTable d(cfg.model.alpha, 2 * sc.N_modes);
    const auto od = ode_residual(cfg.model, d, sc.epsilon, r.zeta, r.u, sc.ode_points, sc.ode_t_end);
    std::string csv = "t,x,residual\n";
    for (std::size_t i = 0; i < od.t.size(); ++i) csv += num(od.t[i]) + "," + num(od.x[i]) + "," + num(od.r[i]) + "\n";
    write_text(cfg.output.csv, csv);
  }
  return kOk;
}

// trees: u^{[k]}_nu from tree sums, with the Picard bookkeeping as oracle.
int cmd_trees(const ExperimentConfig& cfg) {
  if (!cfg.has_epsilon) fail(ErrorKind::ConfigError, "solve.epsilon is required (or pass --eps)");
  const auto& tc = cfg.trees;
  if (tc.k_max < 1 || tc.nu_l1_max < 0) fail(ErrorKind::ConfigError, "trees: need k_max >= 1, nu_l1_max >= 0");
  const double eps = cfg.solve.epsilon, zeta = tc.zeta.value_or(0.0);
  TreeEvaluator ev(cfg.model, eps, zeta, cfg.solve.C1);
  ev.set_budget(tc.budget);

  std::vector<SparseField> oracle;
  if (!tc.renormalized) oracle = picard_bookkeeping(cfg.model, eps, zeta, tc.k_max);

  std::vector<Mode> modes;
  for (int a = -tc.nu_l1_max; a <= tc.nu_l1_max; ++a)
    for (int b = -tc.nu_l1_max; b <= tc.nu_l1_max; ++b)
      if (std::abs(a) + std::abs(b) <= tc.nu_l1_max) modes.push_back({a, b});

  Json rows = Json::array();
  std::string csv = "k,nu1,nu2,re,im,trees,excluded,oracle_diff\n";
  bool exceeded = false;
  std::string exceeded_msg;
  double worst = 0.0;
  for (int k = 1; k <= tc.k_max && !exceeded; ++k) {
    for (Mode m : modes) {
      SeriesTerm t;
      try {
        t = series_coefficient(ev, k, m, tc.renormalized);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BudgetExceeded) throw;
        exceeded = true;
        exceeded_msg = e.what();
        break;
      }
      const cplx ref = oracle.empty() ? cplx{} : sparse_at(oracle[static_cast<std::size_t>(k)], m);
      if (t.trees == 0 && t.excluded == 0 && ref == cplx{}) continue;
      Json row{{"k", k}, {"nu", {m.n1, m.n2}}, {"re", t.value.real()}, {"im", t.value.imag()},
               {"trees", t.trees}, {"excluded", t.excluded}};
      std::string diff;
      if (!oracle.empty()) {
        const double d = std::abs(t.value - ref) /
                         std::max(1.0, t.abs_sum);
        worst = std::max(worst, d);
        row["oracle_diff"] = d;
        diff = num(d);
      }
      rows.push_back(row);
      csv += std::to_string(k) + "," + std::to_string(m.n1) + "," + std::to_string(m.n2) + "," +
             num(t.value.real()) + "," + num(t.value.imag()) + "," + std::to_string(t.trees) + "," +
             std::to_string(t.excluded) + "," + diff + "\n";
    }
  }
  Json out = header("trees", cfg);
  out["epsilon"] = eps;
  out["zeta"] = zeta;
  out["renormalized"] = tc.renormalized;
  out["rows"] = rows;
  if (!oracle.empty()) out["max_oracle_diff"] = worst;
  out["budget_exceeded"] = exceeded;
  if (exceeded) out["budget_message"] = exceeded_msg;
  write_text(cfg.output.json, dump_json(out));
  if (!cfg.output.csv.empty()) write_text(cfg.output.csv, csv);
  return exceeded ? kBudget : kOk;
}

int cmd_simulate(const ExperimentConfig& cfg) {
  const auto& s = cfg.simulate;
  if (!s.has_epsilon) fail(ErrorKind::ConfigError, "simulate.epsilon is required (or pass --eps)");
  const TimeSeries ts = integrate(cfg.model, s.sim);
  Json out = header("simulate", cfg);
  out["samples"] = ts.t.size();
  out["warnings"] = ts.warnings;
  out["final"] = Json{{"t", ts.t.back()}, {"x", ts.x.back()}, {"v", ts.v.back()}};
  if (s.compare) {
    const SolveResult r = solve_response(cfg.model, solve_config(cfg, s.sim.epsilon));
    const double t_tr = s.t_transient.value_or(default_transient(cfg.model, s.sim.epsilon, 1e-6));
    const auto compared = std::count_if(ts.t.begin(), ts.t.end(), [&](double t) { return t > t_tr; });
    out["comparison"] = Json{{"zeta", r.zeta},
                             {"t_transient", t_tr},
                             {"compared_samples", compared},
                             {"sup_deviation", compare_with_spectral(cfg.model, ts, r, t_tr)}};
    if (compared == 0) out["comparison"]["warning"] = "t_transient >= t_end, nothing compared";
  }
  write_text(cfg.output.json, dump_json(out));
  if (!cfg.output.csv.empty()) {
    std::string csv = "t,x,v\n";
    for (std::size_t i = 0; i < ts.t.size(); ++i) csv += num(ts.t[i]) + "," + num(ts.x[i]) + "," + num(ts.v[i]) + "\n";
    write_text(cfg.output.csv, csv);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Response solutions of eps x'' + x' + eps g(x) = eps f(omega t)"};
  app.require_subcommand(1);
  Flags fl;
  std::function<int(const ExperimentConfig&)> run;

  auto add = [&](const char* name, const char* help, int (*fn)(const ExperimentConfig&)) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", fl.config, "JSON config file");
    sub->add_option("--alpha", fl.alpha, "golden|sqrt2|e|liouville|double_exponential|factorial");
    sub->add_option("--quotients", fl.quotients, "a0,a1,... (tail repeats)");
    sub->add_option("--eps", fl.eps, "epsilon");
    sub->add_option("--gothn", fl.gothn, "degree n of g = x^n");
    sub->add_option("--out,-o", fl.out, "JSON output path (default stdout)");
    sub->add_option("--csv", fl.csv, "CSV output path");
    sub->callback([&run, fn] { run = fn; });
  };
  add("classify", "continued fraction, Bryuno sums, Diophantine fit", cmd_classify);
  add("admissible", "admissible epsilon set with holes", cmd_admissible);
  add("solve", "range + bifurcation solve", cmd_solve);
  add("trees", "tree-expansion coefficients vs Picard oracle", cmd_trees);
  add("simulate", "direct time integration", cmd_simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  try {
    return run(parse_config(load_config(fl)));
  } catch (const Error& e) {
    std::cerr << "resp: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "resp: " << e.what() << '\n';
    return kOther;
  }
}
