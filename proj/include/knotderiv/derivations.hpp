#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "knotderiv/autgroup.hpp"
#include "knotderiv/coloring.hpp"
#include "knotderiv/diagram.hpp"
#include "knotderiv/polynomial.hpp"

namespace knotderiv {

// Everything derivation-related for a fixed target X lives against its
// automorphism group and the conjugation quandle on it.  Built once per X and
// shared; the conjugation table is what action colorings are colored into.
struct ConjAutContext {
  FiniteQuandle target;
  PermutationGroup aut;
  ConjQuandle conj;

  const Permutation& aut_element(int index) const { return aut.elements[index]; }
};

inline std::shared_ptr<const ConjAutContext> conj_aut_context(const FiniteQuandle& X,
                                                              const RunConfig& cfg = {}) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::shared_ptr<const ConjAutContext>> cache;
  std::uint64_t key = X.content_hash();
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end() && it->second->target == X) return it->second;
  }
  auto ctx = std::make_shared<ConjAutContext>();
  ctx->target = X;
  ctx->aut = automorphism_group(X, cfg);
  ctx->conj = conj_quandle(ctx->aut);
  if (!ctx->aut.elements.front().is_identity())
    throw std::logic_error("sorted automorphism list must start with the identity");
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(ctx)).first->second;
}

// An action assigns an automorphism of the target to every arc (or source
// element), stored as indices into the sorted automorphism list.  Index 0 is
// the identity, so the trivial action is the all-zero assignment.
struct ActionColoring {
  std::vector<int> values;
  bool trivial = false;
  bool constant = false;

  static ActionColoring from_values(std::vector<int> v) {
    ActionColoring a;
    a.trivial = std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
    a.constant = std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
    a.values = std::move(v);
    return a;
  }
};

inline ActionColoring constant_action(const ConjAutContext& ctx, const Permutation& g,
                                      int var_count) {
  int idx = ctx.aut.index_of(g);
  if (idx < 0)
    throw std::invalid_argument("permutation " + g.cycles() +
                                " is not an automorphism of the target quandle");
  return ActionColoring::from_values(std::vector<int>(var_count, idx));
}

inline std::vector<ActionColoring> enumerate_actions(const ArcPresentation& pres,
                                                     const ConjAutContext& ctx,
                                                     const RunConfig& cfg = {}) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::shared_ptr<const std::vector<ActionColoring>>> cache;
  std::uint64_t key = fnv1a(pres.content_hash(), ctx.target.content_hash());
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto sols = enumerate_homs_diagram(pres, ctx.conj.quandle, cfg);
  auto out = std::make_shared<std::vector<ActionColoring>>();
  out->reserve(sols.size());
  for (auto& s : sols) out->push_back(ActionColoring::from_values(std::move(s)));
  std::lock_guard<std::mutex> lock(mu);
  return *cache.emplace(key, std::move(out)).first->second;
}

inline std::vector<ActionColoring> enumerate_actions_finite(const FiniteQuandle& q,
                                                            const ConjAutContext& ctx,
                                                            const RunConfig& cfg = {}) {
  auto sols = enumerate_homs_finite(q, ctx.conj.quandle, cfg);
  std::vector<ActionColoring> out;
  out.reserve(sols.size());
  for (auto& s : sols) out.push_back(ActionColoring::from_values(std::move(s)));
  return out;
}

// Re-verification used by tests and debug paths: the assignment must color
// the conjugation quandle, and composing the automorphisms around each
// relation must commute the way the action axioms demand.
inline bool verify_action(const ArcPresentation& pres, const ConjAutContext& ctx,
                          const ActionColoring& phi) {
  const auto& conj = ctx.conj.quandle;
  auto check_pair = [&](int prod, int left, int right) {
    // prod = left * right in the source: conjugation at index level plus the
    // evaluated compatibility phi(prod) o phi(right) == phi(right) o phi(left).
    if (phi.values[prod] != conj.op(phi.values[left], phi.values[right])) return false;
    const Permutation& p = ctx.aut_element(phi.values[prod]);
    const Permutation& l = ctx.aut_element(phi.values[left]);
    const Permutation& r = ctx.aut_element(phi.values[right]);
    for (int x = 0; x < ctx.target.size(); ++x)
      if (p(r(x)) != r(l(x))) return false;
    return true;
  };
  for (const auto& rel : pres.relations) {
    bool ok = rel.sign > 0 ? check_pair(rel.z, rel.x, rel.y) : check_pair(rel.x, rel.z, rel.y);
    if (!ok) return false;
  }
  return true;
}

inline bool verify_action_finite(const FiniteQuandle& q, const ConjAutContext& ctx,
                                 const ActionColoring& phi) {
  const auto& conj = ctx.conj.quandle;
  for (int a = 0; a < q.size(); ++a)
    for (int b = 0; b < q.size(); ++b) {
      int prod = q.op(a, b);
      if (phi.values[prod] != conj.op(phi.values[a], phi.values[b])) return false;
      const Permutation& p = ctx.aut_element(phi.values[prod]);
      const Permutation& l = ctx.aut_element(phi.values[a]);
      const Permutation& r = ctx.aut_element(phi.values[b]);
      for (int x = 0; x < ctx.target.size(); ++x)
        if (p(r(x)) != r(l(x))) return false;
    }
  return true;
}

namespace detail {

// Twist slots: constraints reference automorphisms through a compact list.
struct TwistTable {
  std::vector<Permutation> perms;
  std::map<int, int> slot_of_aut;

  int slot(const ConjAutContext& ctx, int aut_index) {
    auto [it, fresh] = slot_of_aut.emplace(aut_index, static_cast<int>(perms.size()));
    if (fresh) perms.push_back(ctx.aut_element(aut_index));
    return it->second;
  }
};

// Values a single position may take: those fixed by the twisted idempotency
// v * g(v) = v, which every derivation satisfies at a generator.
inline std::vector<int> idempotent_domain(const FiniteQuandle& X, const Permutation& g) {
  std::vector<int> dom;
  for (int v = 0; v < X.size(); ++v)
    if (X.op(v, g(v)) == v) dom.push_back(v);
  return dom;
}

}  // namespace detail

// Arc assignments f with f(z) = f(x) * phi(x)(f(y)) at positive crossings and
// f(x) = f(z) * phi(z)(f(y)) at negative ones, plus the per-arc idempotency
// filter.  Constraints are the derivation condition instantiated at the
// diagram's relations; see verify_derivation_closure for the word-level
// diagnostic behind this finite presentation.
inline std::vector<Coloring> enumerate_derivations_diagram(const ArcPresentation& pres,
                                                           const ConjAutContext& ctx,
                                                           const ActionColoring& phi,
                                                           const RunConfig& cfg = {}) {
  const FiniteQuandle& X = ctx.target;
  EnumerationProblem p;
  p.target = &X;
  p.var_count = pres.arc_count;
  p.domains.resize(pres.arc_count);
  for (int a = 0; a < pres.arc_count; ++a) {
    p.domains[a] = detail::idempotent_domain(X, ctx.aut_element(phi.values[a]));
    if (p.domains[a].empty()) return {};
  }
  detail::TwistTable twists;
  for (const auto& r : pres.relations) {
    if (r.sign > 0)
      p.ternary.push_back({r.z, r.x, r.y, false, twists.slot(ctx, phi.values[r.x])});
    else
      p.ternary.push_back({r.z, r.x, r.y, true, twists.slot(ctx, phi.values[r.z])});
  }
  p.twists = std::move(twists.perms);
  return enumerate_solutions(p, cfg);
}

// Finite-source derivations: the full binary condition over every ordered
// pair; the diagonal pairs are the idempotency filter applied as domains.
inline std::vector<Coloring> enumerate_derivations_finite(const FiniteQuandle& q,
                                                          const ConjAutContext& ctx,
                                                          const ActionColoring& phi,
                                                          const RunConfig& cfg = {}) {
  const FiniteQuandle& X = ctx.target;
  EnumerationProblem p;
  p.target = &X;
  p.var_count = q.size();
  p.domains.resize(q.size());
  for (int a = 0; a < q.size(); ++a) {
    p.domains[a] = detail::idempotent_domain(X, ctx.aut_element(phi.values[a]));
    if (p.domains[a].empty()) return {};
  }
  detail::TwistTable twists;
  for (int a = 0; a < q.size(); ++a)
    for (int b = 0; b < q.size(); ++b)
      if (a != b) p.ternary.push_back({q.op(a, b), a, b, false, twists.slot(ctx, phi.values[a])});
  p.twists = std::move(twists.perms);
  return enumerate_solutions(p, cfg);
}

// One pass over every action of a source on X: the actions in enumeration
// order and the full derivation set of each.  Index 0 is always the trivial
// action, whose derivations are exactly the colorings/homs.
struct DerivationSurvey {
  std::shared_ptr<const ConjAutContext> ctx;
  std::vector<ActionColoring> actions;
  std::vector<std::vector<Coloring>> ders;

  const std::vector<Coloring>& homs() const { return ders.front(); }
};

namespace detail {

template <typename DerFn>
DerivationSurvey run_survey(std::shared_ptr<const ConjAutContext> ctx,
                            std::vector<ActionColoring> actions, const RunConfig& cfg,
                            DerFn der_of) {
  if (actions.empty() || !actions.front().trivial)
    throw std::logic_error("action enumeration must start with the trivial action");
  DerivationSurvey s;
  s.ctx = std::move(ctx);
  s.actions = std::move(actions);
  RunConfig task_cfg = serial(cfg);
  s.ders = parallel_map<std::vector<Coloring>>(
      static_cast<int>(s.actions.size()), effective_workers(cfg),
      [&](int i) { return der_of(*s.ctx, s.actions[i], task_cfg); });
  return s;
}

}  // namespace detail

inline DerivationSurvey survey_derivations(const ArcPresentation& pres, const FiniteQuandle& X,
                                           const RunConfig& cfg = {}) {
  auto ctx = conj_aut_context(X, cfg);
  auto actions = enumerate_actions(pres, *ctx, cfg);
  return detail::run_survey(std::move(ctx), std::move(actions), cfg,
                            [&pres](const ConjAutContext& c, const ActionColoring& a,
                                    const RunConfig& task_cfg) {
                              return enumerate_derivations_diagram(pres, c, a, task_cfg);
                            });
}

inline DerivationSurvey survey_derivations(const KnotDiagram& dia, const FiniteQuandle& X,
                                           const RunConfig& cfg = {}) {
  return survey_derivations(arcs_and_relations(dia), X, cfg);
}

inline DerivationSurvey survey_derivations_finite(const FiniteQuandle& q, const FiniteQuandle& X,
                                                  const RunConfig& cfg = {}) {
  auto ctx = conj_aut_context(X, cfg);
  auto actions = enumerate_actions_finite(q, *ctx, cfg);
  return detail::run_survey(std::move(ctx), std::move(actions), cfg,
                            [&q](const ConjAutContext& c, const ActionColoring& a,
                                 const RunConfig& task_cfg) {
                              return enumerate_derivations_finite(q, c, a, task_cfg);
                            });
}

inline DerivationPolynomial derivation_polynomial(const DerivationSurvey& s) {
  DerivationPolynomial poly;
  poly.add(0, static_cast<long long>(s.homs().size()));
  for (std::size_t i = 1; i < s.ders.size(); ++i)
    poly.add(static_cast<int>(s.ders[i].size()) + 1, 1);
  return poly;
}

inline DerivationPolynomial derivation_polynomial(const KnotDiagram& dia, const FiniteQuandle& X,
                                                  const RunConfig& cfg = {}) {
  return derivation_polynomial(survey_derivations(dia, X, cfg));
}

inline PointwiseQuandle derivation_quandle(const std::vector<Coloring>& derivs,
                                           const FiniteQuandle& X) {
  return pointwise_quandle(derivs, X);
}

// Hom block first (the trivial action), then each nonempty derivation set
// over nontrivial actions in enumeration order, glued by disjoint union.
struct TotalDerivationQuandle {
  FiniteQuandle quandle;
  std::vector<int> block_action;  // survey action index per block
  std::vector<int> block_size;
};

inline long long total_derivation_size(const DerivationSurvey& s) {
  long long total = 0;
  for (const auto& d : s.ders) total += static_cast<long long>(d.size());
  return total;
}

inline TotalDerivationQuandle total_derivation_quandle(const DerivationSurvey& s) {
  const FiniteQuandle& X = s.ctx->target;
  if (!check_properties(X).abelian)
    throw not_abelian_error("total derivation quandle needs an abelian target");
  TotalDerivationQuandle total;
  std::vector<FiniteQuandle> blocks;
  for (std::size_t i = 0; i < s.ders.size(); ++i) {
    if (s.ders[i].empty()) continue;
    blocks.push_back(pointwise_quandle(s.ders[i], X, /*require_abelian=*/false).quandle);
    total.block_action.push_back(static_cast<int>(i));
    total.block_size.push_back(static_cast<int>(s.ders[i].size()));
  }
  total.quandle = disjoint_union_many(blocks);
  return total;
}

// The derivation sets of all actions (trivial included) up to isomorphism,
// with empty sets tallied separately since they carry no table.
struct DerivationMultiset {
  long long empty_count = 0;
  std::vector<FiniteQuandle> members;  // nonempty, in action order
};

inline DerivationMultiset derivation_multiset(const DerivationSurvey& s) {
  const FiniteQuandle& X = s.ctx->target;
  if (!check_properties(X).abelian)
    throw not_abelian_error("derivation multiset needs an abelian target");
  DerivationMultiset m;
  for (const auto& d : s.ders) {
    if (d.empty())
      ++m.empty_count;
    else
      m.members.push_back(pointwise_quandle(d, X, /*require_abelian=*/false).quandle);
  }
  return m;
}

struct MultisetClass {
  FiniteQuandle representative;
  int count = 0;
};

inline std::vector<MultisetClass> multiset_classes(const DerivationMultiset& m) {
  std::vector<const FiniteQuandle*> sorted;
  sorted.reserve(m.members.size());
  for (const auto& q : m.members) sorted.push_back(&q);
  std::sort(sorted.begin(), sorted.end(), [](const FiniteQuandle* a, const FiniteQuandle* b) {
    if (a->size() != b->size()) return a->size() < b->size();
    return a->flat() < b->flat();
  });
  std::vector<MultisetClass> classes;
  for (const auto* q : sorted) {
    bool placed = false;
    for (auto& cls : classes) {
      if (cls.representative.size() != q->size()) continue;
      if (are_isomorphic(cls.representative, *q)) {
        ++cls.count;
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({*q, 1});
  }
  return classes;
}

inline bool multiset_equivalent(const DerivationMultiset& a, const DerivationMultiset& b) {
  if (a.empty_count != b.empty_count) return false;
  if (a.members.size() != b.members.size()) return false;
  auto ca = multiset_classes(a);
  auto cb = multiset_classes(b);
  if (ca.size() != cb.size()) return false;
  std::vector<char> used(cb.size(), 0);
  for (const auto& cls : ca) {
    bool found = false;
    for (std::size_t j = 0; j < cb.size(); ++j) {
      if (used[j] || cb[j].count != cls.count) continue;
      if (cb[j].representative.size() != cls.representative.size()) continue;
      if (are_isomorphic(cb[j].representative, cls.representative)) {
        used[j] = 1;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

class compatibility_error : public std::runtime_error {
 public:
  compatibility_error(int q, int a)
      : std::runtime_error("action compatibility fails at source element " + std::to_string(q) +
                           ", target element " + std::to_string(a) + " (1-based)"),
        q(q),
        a(a) {}
  int q, a;  // 1-based witness
};

// Pushes a derivation along a source homomorphism sigma: src2 -> src1 and a
// target homomorphism tau: tgt1 -> tgt2, after checking the compatibility
// tau(a^{phi1(sigma(q))}) = tau(a)^{phi2(q)} exhaustively.  The result
// tau o f o sigma is re-verified against phi2 before being returned.
inline std::vector<int> transport_derivation(
    const FiniteQuandle& src2, const FiniteQuandle& src1, const FiniteQuandle& tgt1,
    const FiniteQuandle& tgt2, const std::vector<int>& sigma, const std::vector<int>& tau,
    const std::vector<Permutation>& phi1, const std::vector<Permutation>& phi2,
    const std::vector<int>& f) {
  auto expect = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  expect(static_cast<int>(sigma.size()) == src2.size(), "sigma must cover the new source");
  expect(static_cast<int>(tau.size()) == tgt1.size(), "tau must cover the old target");
  expect(static_cast<int>(phi1.size()) == src1.size(), "phi1 must cover the old source");
  expect(static_cast<int>(phi2.size()) == src2.size(), "phi2 must cover the new source");
  expect(static_cast<int>(f.size()) == src1.size(), "f must cover the old source");
  for (int x = 0; x < src2.size(); ++x)
    for (int y = 0; y < src2.size(); ++y)
      expect(sigma[src2.op(x, y)] == src1.op(sigma[x], sigma[y]),
             "sigma is not a quandle homomorphism");
  for (int x = 0; x < tgt1.size(); ++x)
    for (int y = 0; y < tgt1.size(); ++y)
      expect(tau[tgt1.op(x, y)] == tgt2.op(tau[x], tau[y]), "tau is not a quandle homomorphism");
  for (int q = 0; q < src2.size(); ++q)
    for (int a = 0; a < tgt1.size(); ++a)
      if (tau[phi1[sigma[q]](a)] != phi2[q](tau[a])) throw compatibility_error(q + 1, a + 1);
  std::vector<int> g(src2.size());
  for (int q = 0; q < src2.size(); ++q) g[q] = tau[f[sigma[q]]];
  for (int x = 0; x < src2.size(); ++x)
    for (int y = 0; y < src2.size(); ++y)
      if (g[src2.op(x, y)] != tgt2.op(g[x], phi2[x](g[y])))
        throw std::logic_error("transported map is not a derivation");
  return g;
}

struct ClosureReport {
  bool consistent = true;
  int depth = 0;
  long long words = 0;
  std::string witness;
};

// Diagnostic behind the diagram-level derivation definition: extend f and phi
// from the arcs to formal words built with * and its left inverse, rewriting
// at the top level through the crossing relations and w*w = w, and flag any
// pair whose extended values disagree with the derivation condition.
inline ClosureReport verify_derivation_closure(const ArcPresentation& pres,
                                               const ConjAutContext& ctx,
                                               const ActionColoring& phi, const Coloring& f,
                                               int depth) {
  const FiniteQuandle& X = ctx.target;
  struct Node {
    std::string key;
    int length = 1;
    Permutation act;
    int val = 0;
  };
  std::vector<Node> nodes;
  std::map<std::string, int> index;
  std::map<std::pair<int, int>, int> mul_rw, div_rw;  // arc-pair rewrites
  for (const auto& r : pres.relations) {
    if (r.sign > 0) {
      mul_rw.emplace(std::make_pair(r.x, r.y), r.z);
      div_rw.emplace(std::make_pair(r.z, r.y), r.x);
    } else {
      mul_rw.emplace(std::make_pair(r.z, r.y), r.x);
      div_rw.emplace(std::make_pair(r.x, r.y), r.z);
    }
  }
  for (int a = 0; a < pres.arc_count; ++a) {
    Node n{"a" + std::to_string(a + 1), 1, ctx.aut_element(phi.values[a]), f[a]};
    index.emplace(n.key, a);
    nodes.push_back(std::move(n));
  }
  ClosureReport report;
  report.depth = depth;
  auto describe = [&](const Node& u, const Node& v, char op, int expect_val, int got_val) {
    return "pair (" + u.key + (op == '*' ? " * " : " /bar ") + v.key + "): value " +
           std::to_string(got_val + 1) + " but the derivation condition gives " +
           std::to_string(expect_val + 1);
  };
  // Combines nodes u and v; returns false once a violation is recorded.
  auto combine = [&](int ui, int vi, bool division, bool may_create) {
    const Node& u = nodes[ui];
    const Node& v = nodes[vi];
    Permutation act = division ? conjugate(u.act, v.act.inverse()) : conjugate(u.act, v.act);
    int val;
    if (division) {
      val = X.ldiv(u.val, act(v.val));
    } else {
      val = X.op(u.val, u.act(v.val));
    }
    int target = -1;
    if (ui == vi) {
      target = ui;
    } else if (u.length == 1 && v.length == 1) {
      const auto& rw = division ? div_rw : mul_rw;
      auto it = rw.find({ui, vi});
      if (it != rw.end()) target = it->second;
    }
    std::string key;
    if (target < 0) {
      key = "(" + u.key + (division ? "/" : "*") + v.key + ")";
      auto it = index.find(key);
      if (it != index.end()) target = it->second;
    }
    if (target >= 0) {
      if (nodes[target].val != val) {
        report.consistent = false;
        report.witness = describe(u, v, division ? '/' : '*', val, nodes[target].val);
        return false;
      }
      return true;
    }
    if (!may_create) return true;
    Node n{std::move(key), u.length + v.length, std::move(act), val};
    index.emplace(n.key, static_cast<int>(nodes.size()));
    nodes.push_back(std::move(n));
    return true;
  };
  for (int total = 2; total <= depth; ++total) {
    std::size_t limit = nodes.size();  // nodes created this round have length == total
    for (std::size_t ui = 0; ui < limit; ++ui) {
      for (std::size_t vi = 0; vi < limit; ++vi) {
        if (nodes[ui].length + nodes[vi].length != total) continue;
        if (nodes.size() > (1u << 20)) throw budget_exceeded(1 << 20);
        if (!combine(static_cast<int>(ui), static_cast<int>(vi), false, true)) goto done;
        if (!combine(static_cast<int>(ui), static_cast<int>(vi), true, true)) goto done;
      }
    }
  }
  // Pairs whose product exceeds the depth still collapse when both sides are
  // equal or an arc rewrite applies; check those without creating nodes.
  for (std::size_t ui = 0; ui < nodes.size() && report.consistent; ++ui) {
    if (!combine(static_cast<int>(ui), static_cast<int>(ui), false, false)) break;
    if (!combine(static_cast<int>(ui), static_cast<int>(ui), true, false)) break;
  }
  for (const auto& [pair, target] : mul_rw) {
    if (!report.consistent) break;
    (void)target;
    combine(pair.first, pair.second, false, false);
  }
  for (const auto& [pair, target] : div_rw) {
    if (!report.consistent) break;
    (void)target;
    combine(pair.first, pair.second, true, false);
  }
done:
  report.words = static_cast<long long>(nodes.size());
  return report;
}

}  // namespace knotderiv
