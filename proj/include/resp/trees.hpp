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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "resp/model.hpp"
#include "resp/parallel.hpp"

namespace resp {

enum class NodeKind { Internal, E0, E1, Stub };

struct TreeNode;
using TreePtr = std::shared_ptr<const TreeNode>;

/// Plane rooted tree; children are ordered. Subtrees are shared.
struct TreeNode {
  NodeKind kind = NodeKind::E0;
  Mode nu{};                     // E1 mode label
  std::vector<TreePtr> children;
  int order = 1;                 // node count, stub excluded
  Mode momentum{};               // sum of E1 labels below (conservation law)
  bool has_stub = false;

  int arity() const { return static_cast<int>(children.size()); }
};

inline TreePtr make_leaf(NodeKind kind, Mode nu = {}) {
  auto n = std::make_shared<TreeNode>();
  n->kind = kind;
  n->nu = kind == NodeKind::E1 ? nu : Mode{};
  n->momentum = n->nu;
  n->order = kind == NodeKind::Stub ? 0 : 1;
  n->has_stub = kind == NodeKind::Stub;
  return n;
}

inline TreePtr make_internal(std::vector<TreePtr> children) {
  auto n = std::make_shared<TreeNode>();
  n->kind = NodeKind::Internal;
  for (const auto& c : children) {
    n->order += c->order;
    n->momentum += c->momentum;
    n->has_stub = n->has_stub || c->has_stub;
  }
  n->children = std::move(children);
  return n;
}

/// V(...) internal, E0, E1<a,b>, S for the stub.
inline void dump_tree(std::ostream& os, const TreePtr& t) {
  switch (t->kind) {
    case NodeKind::E0: os << "E0"; return;
    case NodeKind::E1: os << "E1<" << t->nu.n1 << ',' << t->nu.n2 << '>'; return;
    case NodeKind::Stub: os << 'S'; return;
    case NodeKind::Internal:
      os << "V(";
      for (std::size_t i = 0; i < t->children.size(); ++i) {
        if (i) os << ' ';
        dump_tree(os, t->children[i]);
      }
      os << ')';
  }
}
inline std::string tree_string(const TreePtr& t) {
  std::ostringstream os;
  dump_tree(os, t);
  return os.str();
}

/// Momentum of every line, listed in preorder (root line first), computed
/// from the set of E1 labels below each line rather than by accumulation.
inline std::vector<Mode> line_momenta_by_filter(const TreePtr& root) {
  std::vector<Mode> out;
  std::vector<const TreeNode*> stack{root.get()};
  while (!stack.empty()) {
    const TreeNode* n = stack.back();
    stack.pop_back();
    std::vector<Mode> labels;
    std::vector<const TreeNode*> sub{n};
    while (!sub.empty()) {
      const TreeNode* s = sub.back();
      sub.pop_back();
      if (s->kind == NodeKind::E1) labels.push_back(s->nu);
      for (const auto& c : s->children) sub.push_back(c.get());
    }
    Mode m{};
    for (Mode l : labels) m += l;
    out.push_back(m);
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(it->get());
  }
  return out;
}

inline std::vector<Mode> line_momenta_stored(const TreePtr& root) {
  std::vector<Mode> out;
  std::vector<const TreeNode*> stack{root.get()};
  while (!stack.empty()) {
    const TreeNode* n = stack.back();
    stack.pop_back();
    out.push_back(n->momentum);
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(it->get());
  }
  return out;
}

/// Memoised enumeration of labelled plane trees by order. Internal nodes
/// have arity p with p >= goth_n and g_p != 0; E1 labels range over the
/// support of f without the zero mode.
class TreeEnumerator {
 public:
  explicit TreeEnumerator(const ModelSpec& spec, double budget = 5e6) : budget_(budget) {
    for (std::size_t p = static_cast<std::size_t>(std::max(spec.goth_n, 1)); p < spec.g_coeffs.size(); ++p)
      if (spec.g_coeffs[p] != 0.0) arities_.push_back(static_cast<int>(p));
    for (Mode m : spec.f.support())
      if (!m.is_zero()) support_.push_back(m);
  }

  const std::vector<int>& arities() const { return arities_; }
  const std::vector<Mode>& support() const { return support_; }

  /// Number of trees of order k (no stub), without building them.
  double count(int k) {
    if (k < 1) return 0;
    if (auto it = counts_.find(k); it != counts_.end()) return it->second;
    double c = k == 1 ? 1.0 + support_.size() : 0.0;
    if (k > 1)
      for (int p : arities_) c += compositions_count(k - 1, p, false);
    return counts_[k] = c;
  }
  /// Number of stub trees with k non-stub nodes.
  double count_stub(int k) {
    if (k < 0) return 0;
    if (k == 0) return 1;
    if (auto it = stub_counts_.find(k); it != stub_counts_.end()) return it->second;
    double c = 0;
    for (int p : arities_) c += compositions_count(k - 1, p, true);
    return stub_counts_[k] = c;
  }

  /// All trees of order k, every root momentum.
  const std::vector<TreePtr>& of_order(int k) { return build(k, false); }
  /// Trees with exactly one stub leaf and k other nodes.
  const std::vector<TreePtr>& with_stub(int k) { return build(k, true); }

  std::vector<TreePtr> enumerate(int k, Mode target) {
    std::vector<TreePtr> out;
    for (const auto& t : of_order(k))
      if (t->momentum == target) out.push_back(t);
    return out;
  }

 private:
  // sum over ordered p-tuples of subtree orders summing to m
  double compositions_count(int m, int p, bool stub) {
    // f[j][s]: tuples of length j summing to s, with (stub) one stub slot used
    std::vector<std::vector<double>> plain(p + 1, std::vector<double>(m + 1, 0.0));
    std::vector<std::vector<double>> marked(p + 1, std::vector<double>(m + 1, 0.0));
    plain[0][0] = 1;
    for (int j = 1; j <= p; ++j)
      for (int s = 0; s <= m; ++s)
        for (int a = 0; a <= s; ++a) {
          if (a >= 1) plain[j][s] += plain[j - 1][s - a] * count(a);
          if (stub) {
            if (a >= 1) marked[j][s] += marked[j - 1][s - a] * count(a);
            marked[j][s] += plain[j - 1][s - a] * count_stub(a);
          }
        }
    return stub ? marked[p][m] : plain[p][m];
  }

  const std::vector<TreePtr>& build(int k, bool stub) {
    auto& memo = stub ? stub_trees_ : trees_;
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    const double est = stub ? count_stub(k) : count(k);
    if (est > budget_)
      fail(ErrorKind::BudgetExceeded, "tree enumeration of order " + std::to_string(k) + " needs about " +
                                          std::to_string(static_cast<long long>(est)) + " trees");
    std::vector<TreePtr> out;
    if (stub && k == 0) {
      out.push_back(make_leaf(NodeKind::Stub));
    } else if (!stub && k == 1) {
      out.push_back(make_leaf(NodeKind::E0));
      for (Mode m : support_) out.push_back(make_leaf(NodeKind::E1, m));
    }
    if (k >= 1) {
      for (int p : arities_) {
        std::vector<TreePtr> kids;
        fill(out, kids, p, k - 1, stub, false);
      }
    }
    return memo[k] = std::move(out);
  }

  void fill(std::vector<TreePtr>& out, std::vector<TreePtr>& kids, int slots, int remaining, bool stub,
            bool stub_used) {
    if (slots == 0) {
      if (remaining == 0 && stub_used == stub) out.push_back(make_internal(kids));
      return;
    }
    for (int a = 0; a <= remaining; ++a) {
      if (a >= 1 && remaining - a >= slots - 1 - (stub && !stub_used ? 1 : 0)) {
        for (const auto& t : build(a, false)) {
          kids.push_back(t);
          fill(out, kids, slots - 1, remaining - a, stub, stub_used);
          kids.pop_back();
        }
      }
      if (stub && !stub_used) {
        for (const auto& t : build(a, true)) {
          kids.push_back(t);
          fill(out, kids, slots - 1, remaining - a, stub, true);
          kids.pop_back();
        }
      }
    }
  }

  double budget_;
  std::vector<int> arities_;
  std::vector<Mode> support_;
  std::map<int, double> counts_, stub_counts_;
  std::map<int, std::vector<TreePtr>> trees_, stub_trees_;
};

/// Val(theta) with its recorded factors; value is their ordered product.
struct TreeValue {
  cplx value{};
  std::vector<cplx> node_factors;  // preorder
  std::vector<cplx> propagators;   // preorder, root line first
  std::vector<int> scales;         // per line, same order

  cplx recompute() const {
    cplx v = 1.0;
    for (const auto& f : node_factors) v *= f;
    for (const auto& g : propagators) v *= g;
    return v;
  }
};

/// A scale-0 cluster with one entering line of the same momentum as the exit.
struct SelfEnergyCluster {
  const TreeNode* top = nullptr;    // node whose exit line leaves the cluster
  const TreeNode* entry = nullptr;  // node whose exit line enters the cluster
  Mode momentum{};
  int order = 0;                    // nodes in the cluster
  Mode end_mode_sum{};              // sum of E1 labels inside
  bool internal_lines_scale0 = true;
};

/// Evaluates tree values at fixed (eps, zeta, C1).
class TreeEvaluator {
 public:
  TreeEvaluator(const ModelSpec& spec, double eps, double zeta, double C1)
      : spec_(spec), eps_(eps), zeta_(zeta), thr_(scale_threshold(C1, eps, spec.goth_n)) {}

  double threshold() const { return thr_; }
  double eps() const { return eps_; }
  double zeta() const { return zeta_; }
  const ModelSpec& spec() const { return spec_; }

  double omega_dot(Mode m) const {
    if (m.is_zero()) return 0.0;
    std::lock_guard lock(mu_);
    if (auto it = wdot_.find(m); it != wdot_.end()) return it->second;
    double v;
    try {
      v = small_divisor(spec_.alpha, m, 1e-15).signed_value();
    } catch (const Error&) {
      fail(ErrorKind::DivisorUnderflow, "omega . nu below certified precision");
    }
    return wdot_[m] = v;
  }

  /// 1 iff nu != 0 and |w.nu| < (C1/4) eps^{1/(n+1)}
  int scale(Mode m) const { return !m.is_zero() && std::abs(omega_dot(m)) < thr_ ? 1 : 0; }

  cplx node_factor(const TreeNode& n) const {
    switch (n.kind) {
      case NodeKind::Internal: return -eps_ * spec_.g_coeffs[static_cast<std::size_t>(n.arity())];
      case NodeKind::E1: return eps_ * spec_.f.at(n.nu);
      case NodeKind::E0: return zeta_;
      case NodeKind::Stub: return 1.0;
    }
    return 0.0;
  }

  /// Bare: 1/D on every nu != 0 line. Renormalised: 1/(D - M) on scale-1 lines.
  TreeValue value(const TreePtr& t, bool renormalized = false, int order_cap = -1) const {
    TreeValue tv;
    std::vector<const TreeNode*> stack{t.get()};
    while (!stack.empty()) {
      const TreeNode* n = stack.back();
      stack.pop_back();
      tv.node_factors.push_back(node_factor(*n));
      const Mode m = n->momentum;
      const int s = scale(m);
      tv.scales.push_back(s);
      cplx G = 1.0;
      if (!m.is_zero()) {
        const double x = omega_dot(m);
        cplx D = bare_divisor(x, eps_);
        if (renormalized && s == 1) D -= self_energy(x, order_cap);
        G = 1.0 / D;
      }
      tv.propagators.push_back(G);
      for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(it->get());
    }
    tv.value = tv.recompute();
    return tv;
  }

  /// Val(T, x) of a stub tree read as a cluster entered at the stub; nullopt
  /// if some internal line is not on scale 0 or the labels do not sum to 0.
  std::optional<cplx> cluster_value(const TreePtr& t, double x) const {
    if (!t->has_stub || !t->momentum.is_zero()) return std::nullopt;
    cplx v = node_factor(*t);
    std::vector<const TreeNode*> stack;
    for (const auto& c : t->children) stack.push_back(c.get());
    while (!stack.empty()) {
      const TreeNode* n = stack.back();
      stack.pop_back();
      if (n->kind == NodeKind::Stub) continue;  // entering line is external
      v *= node_factor(*n);
      const Mode m = n->momentum;
      if (n->has_stub) {
        const double d = x + omega_dot(m);
        if (std::abs(d) < thr_) return std::nullopt;
        v /= bare_divisor(d, eps_);
      } else if (!m.is_zero()) {
        if (scale(m) != 0) return std::nullopt;
        v /= bare_divisor(omega_dot(m), eps_);
      }
      for (const auto& c : n->children) stack.push_back(c.get());
    }
    return v;
  }

  /// chi(|x|) sum of Val(T, x) over self-energy clusters with goth_n <= k_T <= order_cap.
  cplx self_energy(double x, int order_cap = -1) const {
    if (order_cap < 0) order_cap = spec_.goth_n + 2;
    if (std::abs(x) >= thr_) return 0.0;
    std::lock_guard lock(mu_);
    if (auto it = M_cache_.find({x, order_cap}); it != M_cache_.end()) return it->second;
    cplx M = 0;
    for (int k = 1; k <= order_cap; ++k)
      for (const auto& t : enumerator().with_stub(k))
        if (auto v = cluster_value(t, x)) M += *v;
    return M_cache_[{x, order_cap}] = M;
  }

  /// First self-energy cluster found in a full tree, if any.
  std::optional<SelfEnergyCluster> find_self_energy(const TreePtr& t) const {
    // tops: root and every node whose exit line is on scale 1
    std::vector<const TreeNode*> tops{t.get()};
    std::vector<const TreeNode*> stack{t.get()};
    while (!stack.empty()) {
      const TreeNode* n = stack.back();
      stack.pop_back();
      for (const auto& c : n->children) {
        if (scale(c->momentum) == 1) tops.push_back(c.get());
        stack.push_back(c.get());
      }
    }
    for (const TreeNode* top : tops) {
      SelfEnergyCluster sc;
      sc.top = top;
      sc.momentum = top->momentum;
      int entering = 0;
      std::vector<const TreeNode*> comp{top};
      while (!comp.empty()) {
        const TreeNode* n = comp.back();
        comp.pop_back();
        ++sc.order;
        if (n->kind == NodeKind::E1) sc.end_mode_sum += n->nu;
        for (const auto& c : n->children) {
          if (scale(c->momentum) == 1) {
            ++entering;
            sc.entry = c.get();
          } else {
            comp.push_back(c.get());
          }
        }
      }
      if (entering == 1 && sc.entry->momentum == top->momentum) return sc;
    }
    return std::nullopt;
  }

  TreeEnumerator& enumerator() const {
    std::lock_guard lock(mu_);
    if (!enum_) enum_ = std::make_shared<TreeEnumerator>(spec_, budget_);
    return *enum_;
  }
  void set_budget(double b) { budget_ = b; }

 private:
  ModelSpec spec_;
  double eps_, zeta_, thr_;
  double budget_ = 5e6;
  mutable std::recursive_mutex mu_;
  mutable std::map<Mode, double> wdot_;
  mutable std::map<std::pair<double, int>, cplx> M_cache_;
  mutable std::shared_ptr<TreeEnumerator> enum_;
};

struct SeriesTerm {
  cplx value{};
  std::size_t trees = 0;
  std::size_t excluded = 0;  // trees dropped for containing a self-energy cluster
  double abs_sum = 0.0;      // sum |Val|, scale for relative comparisons
};

/// u^{[k]}_nu as the sum of Val over trees of order k with root momentum nu.
inline SeriesTerm series_coefficient(const TreeEvaluator& ev, int k, Mode nu, bool renormalized = false) {
  SeriesTerm out;
  if (k < 1) return out;
  const auto trees = ev.enumerator().enumerate(k, nu);
  std::vector<cplx> vals(trees.size());
  std::vector<char> keep(trees.size(), 1);
  if (renormalized) {
    for (std::size_t i = 0; i < trees.size(); ++i)
      if (ev.find_self_energy(trees[i])) keep[i] = 0;
  }
  parallel_for(trees.size(), [&](std::size_t i) {
    if (keep[i]) vals[i] = ev.value(trees[i], renormalized).value;
  });
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (!keep[i]) {
      ++out.excluded;
      continue;
    }
    ++out.trees;
    out.value += vals[i];
    out.abs_sum += std::abs(vals[i]);
  }
  return out;
}

inline SeriesTerm series_coefficient(const ModelSpec& spec, double eps, double zeta, double C1, int k, Mode nu,
                                     bool renormalized = false) {
  return series_coefficient(TreeEvaluator(spec, eps, zeta, C1), k, nu, renormalized);
}

/// -eps n g_n [(u1 + zeta)^{n-1}]_0 with u1_nu = eps f_nu / D(w.nu): the
/// lowest-order self-energy assembled by hand (stub in any of n slots).
inline cplx minimal_self_energy_formula(const TreeEvaluator& ev) {
  const auto& spec = ev.spec();
  const int n = spec.goth_n;
  std::map<Mode, cplx> w{{Mode{0, 0}, ev.zeta()}};
  for (Mode m : spec.f.support())
    if (!m.is_zero()) w[m] += ev.eps() * spec.f[m] / bare_divisor(ev.omega_dot(m), ev.eps());
  std::map<Mode, cplx> pw{{Mode{0, 0}, 1.0}};
  for (int j = 0; j < n - 1; ++j) {
    std::map<Mode, cplx> nx;
    for (const auto& [a, va] : pw)
      for (const auto& [b, vb] : w) nx[a + b] += va * vb;
    pw = std::move(nx);
  }
  return -ev.eps() * n * spec.g_coeffs[static_cast<std::size_t>(n)] * pw[Mode{0, 0}];
}

struct MLowerBoundRow {
  double eps = 0, zeta = 0, eta = 0;
  cplx M{};
  double ratio = 0;  // |M| / (eps eta^{n-1})
};
struct MLowerBoundReport {
  std::vector<MLowerBoundRow> rows;
  double min_ratio = 0;
};

/// |M_n| / (eps eta^{n-1}), eta = max(eps, |zeta|), over given (eps, zeta) pairs.
inline MLowerBoundReport lower_bound_check_M(const ModelSpec& spec, const std::vector<std::pair<double, double>>& pts,
                                             double C1) {
  if (spec.goth_n < 3) fail(ErrorKind::PreconditionViolated, "self-energy lower bound needs goth_n >= 3");
  MLowerBoundReport rep;
  rep.min_ratio = INFINITY;
  for (auto [e, z] : pts) {
    const TreeEvaluator ev(spec, e, z, C1);
    MLowerBoundRow r;
    r.eps = e;
    r.zeta = z;
    r.eta = std::max(e, std::abs(z));
    r.M = ev.self_energy(0.0, spec.goth_n);
    r.ratio = std::abs(r.M) / (e * std::pow(r.eta, spec.goth_n - 1));
    rep.min_ratio = std::min(rep.min_ratio, r.ratio);
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace resp
