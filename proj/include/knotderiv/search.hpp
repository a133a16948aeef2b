#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "knotderiv/config.hpp"
#include "knotderiv/permutation.hpp"
#include "knotderiv/quandle.hpp"

namespace knotderiv {

// v[z] = v[x] * t(v[y])   (use_ldiv = false)
// v[z] = v[x] *' t(v[y])  (use_ldiv = true, *' = left division in the target)
// where t is an optional twist permutation of the target's elements.
struct TernaryConstraint {
  int z = 0, x = 0, y = 0;
  bool use_ldiv = false;
  int twist = -1;  // index into EnumerationProblem::twists, -1 = none
};

// v[p] = pi(v[q]) for a fixed permutation pi of the target's elements.
struct LinkConstraint {
  int p = 0, q = 0;
  int pi = 0;  // index into EnumerationProblem::twists
};

// Finite CSP over variables valued in a quandle's element set.  Solutions are
// returned as flat assignments, sorted lexicographically, so output order is
// independent of search heuristics and of how work was split across threads.
struct EnumerationProblem {
  const FiniteQuandle* target = nullptr;
  int var_count = 0;
  std::vector<std::vector<int>> domains;  // empty inner vector = unrestricted
  std::vector<TernaryConstraint> ternary;
  std::vector<LinkConstraint> links;
  std::vector<Permutation> twists;
  bool all_different = false;
};

namespace detail {

class Solver {
 public:
  Solver(const EnumerationProblem& p, long long budget) : p_(p), budget_(budget) {
    int n = p.var_count;
    value_.assign(n, -1);
    in_domain_.assign(n, {});
    const int m = p.target->size();
    for (int v = 0; v < n; ++v) {
      in_domain_[v].assign(m, 1);
      if (v < static_cast<int>(p.domains.size()) && !p.domains[v].empty()) {
        std::fill(in_domain_[v].begin(), in_domain_[v].end(), 0);
        for (int val : p.domains[v]) in_domain_[v][val] = 1;
      }
    }
    if (p.all_different) used_.assign(m, 0);
    by_var_t_.assign(n, {});
    for (int c = 0; c < static_cast<int>(p.ternary.size()); ++c) {
      const auto& t = p.ternary[c];
      for (int v : {t.z, t.x, t.y}) {
        auto& lst = by_var_t_[v];
        if (lst.empty() || lst.back() != c) lst.push_back(c);
      }
    }
    by_var_l_.assign(n, {});
    for (int c = 0; c < static_cast<int>(p.links.size()); ++c) {
      by_var_l_[p.links[c].p].push_back(c);
      if (p.links[c].q != p.links[c].p) by_var_l_[p.links[c].q].push_back(c);
    }
    // Branch on the most constrained variables first.
    order_.resize(n);
    std::vector<int> degree(n, 0);
    for (const auto& t : p.ternary) {
      ++degree[t.z];
      ++degree[t.x];
      ++degree[t.y];
    }
    for (const auto& l : p.links) {
      ++degree[l.p];
      ++degree[l.q];
    }
    for (int i = 0; i < n; ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return degree[a] > degree[b]; });
  }

  // Enumerate with the first branch variable optionally pinned to seed_value.
  std::vector<std::vector<int>> run(std::optional<int> seed_value) {
    solutions_.clear();
    if (p_.var_count == 0) {
      solutions_.push_back({});
      return std::move(solutions_);
    }
    if (seed_value) {
      int v0 = order_[0];
      trail_.clear();
      if (try_assign(v0, *seed_value)) descend(1);
      undo_to(0);
    } else {
      descend(0);
    }
    return std::move(solutions_);
  }

  int first_branch_var() const { return order_.empty() ? -1 : order_[0]; }

 private:
  bool assigned(int v) const { return value_[v] >= 0; }

  bool try_assign(int v, int val) {
    if (++nodes_ > budget_) throw budget_exceeded(budget_);
    if (!in_domain_[v][val]) return false;
    if (p_.all_different) {
      if (used_[val]) return false;
      used_[val] = 1;
    }
    value_[v] = val;
    trail_.push_back(v);
    // Worklist propagation over everything this assignment completes.
    for (std::size_t t = trail_.size() - 1; t < trail_.size(); ++t) {
      if (!propagate_from(trail_[t])) return false;
    }
    return true;
  }

  bool propagate_from(int v) {
    const FiniteQuandle& T = *p_.target;
    for (int ci : by_var_t_[v]) {
      const auto& c = p_.ternary[ci];
      bool hx = assigned(c.x), hy = assigned(c.y), hz = assigned(c.z);
      if (hx && hy) {
        int b = value_[c.y];
        if (c.twist >= 0) b = p_.twists[c.twist](b);
        int want = c.use_ldiv ? T.ldiv(value_[c.x], b) : T.op(value_[c.x], b);
        if (hz) {
          if (value_[c.z] != want) return false;
        } else if (!push(c.z, want)) {
          return false;
        }
      } else if (hz && hy && !hx) {
        int b = value_[c.y];
        if (c.twist >= 0) b = p_.twists[c.twist](b);
        int want = c.use_ldiv ? T.op(value_[c.z], b) : T.ldiv(value_[c.z], b);
        if (!push(c.x, want)) return false;
      }
      // x and z known with y open: no unique inverse, the branch on y checks it.
    }
    for (int ci : by_var_l_[v]) {
      const auto& l = p_.links[ci];
      bool hp = assigned(l.p), hq = assigned(l.q);
      if (hq) {
        int want = p_.twists[l.pi](value_[l.q]);
        if (hp) {
          if (value_[l.p] != want) return false;
        } else if (!push(l.p, want)) {
          return false;
        }
      } else if (hp) {
        int want = p_.twists[l.pi].inverse()(value_[l.p]);
        if (!push(l.q, want)) return false;
      }
    }
    return true;
  }

  bool push(int v, int val) {
    if (!in_domain_[v][val]) return false;
    if (p_.all_different) {
      if (used_[val]) return false;
      used_[val] = 1;
    }
    value_[v] = val;
    trail_.push_back(v);
    return true;
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      int v = trail_.back();
      trail_.pop_back();
      if (p_.all_different) used_[value_[v]] = 0;
      value_[v] = -1;
    }
  }

  void descend(int depth) {
    int n = p_.var_count;
    while (depth < n && assigned(order_[depth])) ++depth;
    if (depth == n) {
      emit();
      return;
    }
    int v = order_[depth];
    const int m = p_.target->size();
    for (int val = 0; val < m; ++val) {
      std::size_t mark = trail_.size();
      if (try_assign(v, val)) descend(depth + 1);
      undo_to(mark);
    }
  }

  void emit() {
    // Propagation enforced every completed constraint; re-check as a guard
    // against future edits to the propagation rules.
    const FiniteQuandle& T = *p_.target;
    for (const auto& c : p_.ternary) {
      int b = value_[c.y];
      if (c.twist >= 0) b = p_.twists[c.twist](b);
      int want = c.use_ldiv ? T.ldiv(value_[c.x], b) : T.op(value_[c.x], b);
      if (value_[c.z] != want) return;
    }
    for (const auto& l : p_.links)
      if (value_[l.p] != p_.twists[l.pi](value_[l.q])) return;
    solutions_.push_back(value_);
  }

  const EnumerationProblem& p_;
  long long budget_;
  long long nodes_ = 0;
  std::vector<int> value_;
  std::vector<std::vector<char>> in_domain_;
  std::vector<char> used_;
  std::vector<std::vector<int>> by_var_t_;
  std::vector<std::vector<int>> by_var_l_;
  std::vector<int> order_;
  std::vector<int> trail_;
  std::vector<std::vector<int>> solutions_;
};

}  // namespace detail

inline std::vector<std::vector<int>> enumerate_solutions(const EnumerationProblem& p,
                                                         const RunConfig& cfg = {}) {
  if (!p.target || p.target->size() == 0)
    throw std::invalid_argument("enumeration needs a nonempty target quandle");
  std::vector<std::vector<int>> all;
  int workers = effective_workers(cfg);
  if (workers > 1 && p.var_count > 0) {
    // Split the forest at the first decision level; each worker owns a value.
    const int m = p.target->size();
    auto chunks = parallel_map<std::vector<std::vector<int>>>(m, workers, [&](int val) {
      detail::Solver s(p, cfg.node_budget);
      return s.run(val);
    });
    for (auto& ch : chunks)
      for (auto& sol : ch) all.push_back(std::move(sol));
  } else {
    detail::Solver s(p, cfg.node_budget);
    all = s.run(std::nullopt);
  }
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace knotderiv
