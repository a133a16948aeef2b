#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotderiv/derivations.hpp"

namespace knotderiv {

class not_automorphism_error : public std::runtime_error {
 public:
  not_automorphism_error(int x, int y)
      : std::runtime_error("structure map is not an automorphism: breaks at the pair (" +
                           std::to_string(x) + ", " + std::to_string(y) + ") (1-based)"),
        x(x),
        y(y) {}
  int x, y;
};

// A quandle with a distinguished automorphism; colorings of virtual diagrams
// land in these, with the automorphism applied across virtual crossings.
struct VirtualQuandle {
  FiniteQuandle quandle;
  Permutation alpha;
};

inline void validate_virtual(const VirtualQuandle& v) {
  if (v.alpha.degree() != v.quandle.size())
    throw std::invalid_argument("structure map degree " + std::to_string(v.alpha.degree()) +
                                " does not match the quandle size " +
                                std::to_string(v.quandle.size()));
  for (int x = 0; x < v.quandle.size(); ++x)
    for (int y = 0; y < v.quandle.size(); ++y)
      if (v.alpha(v.quandle.op(x, y)) != v.quandle.op(v.alpha(x), v.alpha(y)))
        throw not_automorphism_error(x + 1, y + 1);
}

inline VirtualQuandle make_virtual(FiniteQuandle q, Permutation alpha) {
  VirtualQuandle v{std::move(q), std::move(alpha)};
  validate_virtual(v);
  return v;
}

// Maps g -> beta g beta^-1 on the sorted automorphism list, as a permutation
// of indices.  This is how the structure map acts on action values: a value
// twist v -> beta(v) across a virtual crossing conjugates the attached
// automorphism by beta the same way, so that the twisted idempotency and
// crossing constraints transport across the crossing instead of stacking up.
inline Permutation conj_index_map(const ConjAutContext& ctx, const Permutation& beta) {
  Permutation binv = beta.inverse();
  std::vector<int> values(ctx.aut.elements.size());
  for (std::size_t i = 0; i < ctx.aut.elements.size(); ++i) {
    int j = ctx.aut.index_of(compose(beta, compose(ctx.aut.elements[i], binv)));
    if (j < 0)
      throw std::logic_error("conjugation by the structure map escapes the automorphism group");
    values[i] = j;
  }
  return Permutation(values);
}

// Maps with f(alpha(x)) = beta(f(x)) on top of the quandle homomorphism
// condition.
inline std::vector<Coloring> enumerate_virtual_homs_finite(const VirtualQuandle& q,
                                                           const VirtualQuandle& X,
                                                           const RunConfig& cfg = {}) {
  validate_virtual(q);
  validate_virtual(X);
  EnumerationProblem p;
  p.target = &X.quandle;
  p.var_count = q.quandle.size();
  for (int a = 0; a < q.quandle.size(); ++a)
    for (int b = 0; b < q.quandle.size(); ++b)
      if (a != b) p.ternary.push_back({q.quandle.op(a, b), a, b, false, -1});
  p.twists.push_back(X.alpha);
  for (int x = 0; x < q.quandle.size(); ++x) p.links.push_back({q.alpha(x), x, 0});
  return enumerate_solutions(p, cfg);
}

inline std::vector<ActionColoring> enumerate_virtual_actions_finite(const VirtualQuandle& q,
                                                                    const VirtualQuandle& X,
                                                                    const RunConfig& cfg = {}) {
  validate_virtual(q);
  validate_virtual(X);
  auto ctx = conj_aut_context(X.quandle, cfg);
  EnumerationProblem p;
  p.target = &ctx->conj.quandle;
  p.var_count = q.quandle.size();
  for (int a = 0; a < q.quandle.size(); ++a)
    for (int b = 0; b < q.quandle.size(); ++b)
      if (a != b) p.ternary.push_back({q.quandle.op(a, b), a, b, false, -1});
  p.twists.push_back(conj_index_map(*ctx, X.alpha));
  for (int x = 0; x < q.quandle.size(); ++x) p.links.push_back({q.alpha(x), x, 0});
  auto sols = enumerate_solutions(p, cfg);
  std::vector<ActionColoring> out;
  out.reserve(sols.size());
  for (auto& s : sols) out.push_back(ActionColoring::from_values(std::move(s)));
  return out;
}

inline std::vector<Coloring> enumerate_virtual_derivations_finite(const VirtualQuandle& q,
                                                                  const VirtualQuandle& X,
                                                                  const ActionColoring& phi,
                                                                  const RunConfig& cfg = {}) {
  auto ctx = conj_aut_context(X.quandle, cfg);
  EnumerationProblem p;
  p.target = &X.quandle;
  p.var_count = q.quandle.size();
  p.domains.resize(q.quandle.size());
  for (int a = 0; a < q.quandle.size(); ++a) {
    p.domains[a] = detail::idempotent_domain(X.quandle, ctx->aut_element(phi.values[a]));
    if (p.domains[a].empty()) return {};
  }
  detail::TwistTable twists;
  for (int a = 0; a < q.quandle.size(); ++a)
    for (int b = 0; b < q.quandle.size(); ++b)
      if (a != b)
        p.ternary.push_back({q.quandle.op(a, b), a, b, false, twists.slot(*ctx, phi.values[a])});
  int beta_slot = static_cast<int>(twists.perms.size());
  twists.perms.push_back(X.alpha);
  for (int x = 0; x < q.quandle.size(); ++x) p.links.push_back({q.alpha(x), x, beta_slot});
  p.twists = std::move(twists.perms);
  return enumerate_solutions(p, cfg);
}

// The induced shuffle of a derivation set: f -> beta^-1 o f o alpha.
// Derivation sets of virtual actions are closed under it; anything else is a
// hard failure.
inline Permutation gamma_map(const std::vector<Coloring>& ders, const VirtualQuandle& q,
                             const VirtualQuandle& X) {
  Permutation binv = X.alpha.inverse();
  std::vector<int> values(ders.size());
  for (std::size_t i = 0; i < ders.size(); ++i) {
    Coloring g(ders[i].size());
    for (std::size_t y = 0; y < g.size(); ++y) g[y] = binv(ders[i][q.alpha(static_cast<int>(y))]);
    auto it = std::lower_bound(ders.begin(), ders.end(), g);
    if (it == ders.end() || *it != g)
      throw std::logic_error("derivation set is not closed under the induced shuffle");
    values[i] = static_cast<int>(it - ders.begin());
  }
  return Permutation(values);
}

// Virtual planar diagrams: classical crossings plus virtual ones.  At a
// virtual crossing the strands pass through, but colorings pick up the
// target's structure map: looking along either strand, crossing traffic from
// the right multiplies the value by beta, traffic from the left by beta^-1.
struct VirtualCrossing {
  int a = 0, b = 0, c = 0, d = 0;
  bool second_to_b = false;  // second strand runs d -> b when set, b -> d otherwise
};

struct VirtualDiagram {
  std::vector<Crossing> crossings;
  std::vector<VirtualCrossing> virtuals;
  int edge_count = 0;
  bool unknot = false;
  int components = 1;

  std::string pd() const {
    if (unknot) return "";
    std::string out;
    auto tuple = [&](char kind, int a, int b, int c, int d) {
      if (!out.empty()) out += ' ';
      out += std::string(1, kind) + "(" + std::to_string(a) + "," + std::to_string(b) + "," +
             std::to_string(c) + "," + std::to_string(d) + ")";
    };
    for (const auto& c : crossings) tuple('X', c.a, c.b, c.c, c.d);
    for (const auto& v : virtuals) tuple('V', v.a, v.b, v.c, v.d);
    return out;
  }
};

namespace detail {

inline VirtualDiagram virtual_from_raw(const std::vector<RawCrossing>& raw,
                                       const std::optional<int>& assume_sign) {
  int edge_count = 2 * static_cast<int>(raw.size());
  auto rr = resolve_roles(raw, edge_count, assume_sign);
  VirtualDiagram dia;
  dia.edge_count = edge_count;
  std::vector<Crossing> all;  // strand successors for the component count
  for (int ci = 0; ci < static_cast<int>(raw.size()); ++ci) {
    bool b_is_out = rr.role[ci][1] == 1;
    const auto& e = raw[ci].e;
    if (raw[ci].virtual_crossing) {
      dia.virtuals.push_back({e[0], e[1], e[2], e[3], b_is_out});
    } else {
      Crossing c;
      c.a = e[0];
      c.b = e[1];
      c.c = e[2];
      c.d = e[3];
      c.sign = b_is_out ? +1 : -1;
      c.over_in = b_is_out ? c.d : c.b;
      c.over_out = b_is_out ? c.b : c.d;
      dia.crossings.push_back(c);
    }
    Crossing strands;  // only the two in/out pairs matter here
    strands.a = e[0];
    strands.c = e[2];
    strands.over_in = b_is_out ? e[3] : e[1];
    strands.over_out = b_is_out ? e[1] : e[3];
    all.push_back(strands);
  }
  dia.components = count_components(all, edge_count);
  return dia;
}

}  // namespace detail

inline VirtualDiagram parse_virtual(const std::string& text, const PdParseOptions& opts = {}) {
  auto raw = detail::tokenize_pd(text, /*accept_virtual=*/true);
  if (raw.empty()) {
    if (!opts.allow_empty)
      throw parse_error("empty planar diagram (pass the unknot flag for the round diagram)");
    VirtualDiagram dia;
    dia.unknot = true;
    return dia;
  }
  return detail::virtual_from_raw(raw, opts.assume_sign);
}

inline VirtualDiagram as_virtual(const KnotDiagram& dia) {
  VirtualDiagram v;
  v.crossings = dia.crossings;
  v.edge_count = dia.edge_count;
  v.unknot = dia.unknot;
  v.components = dia.components;
  return v;
}

inline VirtualDiagram builtin_virtual(const std::string& name) {
  if (name == "virtual_trefoil") return parse_virtual("X(1,4,2,5) X(3,6,4,1) V(5,2,6,3)");
  return as_virtual(builtin(name));
}

inline std::vector<std::string> builtin_virtual_names() {
  auto names = builtin_names();
  names.push_back("virtual_trefoil");
  return names;
}

// val[to] = beta^power(val[from]) across a virtual crossing; power is +1 or -1.
struct ArcTwist {
  int to = 0, from = 0;
  int power = 0;
};

struct VirtualArcPresentation {
  int arc_count = 0;
  std::vector<int> arc_of_edge;
  std::vector<Relation> relations;
  std::vector<ArcTwist> twists;

  std::uint64_t content_hash() const {
    std::uint64_t h = fnv1a(kFnvSeed, static_cast<std::uint64_t>(arc_count));
    for (const auto& r : relations) {
      h = fnv1a(h, r.z);
      h = fnv1a(h, r.x);
      h = fnv1a(h, r.y);
      h = fnv1a(h, static_cast<std::uint64_t>(r.sign + 2));
    }
    for (const auto& t : twists) {
      h = fnv1a(h, t.to);
      h = fnv1a(h, t.from);
      h = fnv1a(h, static_cast<std::uint64_t>(t.power + 2));
    }
    return h;
  }
};

// Arcs merge through classical over-passages only; virtual crossings keep
// their four edges in distinct arcs and contribute twists instead.
inline VirtualArcPresentation virtual_arcs_and_relations(const VirtualDiagram& dia) {
  VirtualArcPresentation pres;
  if (dia.unknot || dia.edge_count == 0) {
    pres.arc_count = 1;
    return pres;
  }
  detail::Dsu dsu(dia.edge_count);
  for (const auto& c : dia.crossings) dsu.unite(c.over_in - 1, c.over_out - 1);
  std::map<int, int> arc_id;
  for (int e = 0; e < dia.edge_count; ++e) arc_id.emplace(dsu.find(e), 0);
  int next = 0;
  for (auto& [rep, id] : arc_id) id = next++;
  pres.arc_count = next;
  pres.arc_of_edge.resize(dia.edge_count);
  for (int e = 0; e < dia.edge_count; ++e) pres.arc_of_edge[e] = arc_id[dsu.find(e)];
  auto arc = [&](int label) { return pres.arc_of_edge[label - 1]; };
  for (const auto& c : dia.crossings)
    pres.relations.push_back({arc(c.c), arc(c.a), arc(c.over_in), c.sign});
  for (const auto& v : dia.virtuals) {
    if (v.second_to_b) {
      pres.twists.push_back({arc(v.b), arc(v.d), +1});
      pres.twists.push_back({arc(v.c), arc(v.a), -1});
    } else {
      pres.twists.push_back({arc(v.c), arc(v.a), +1});
      pres.twists.push_back({arc(v.d), arc(v.b), -1});
    }
  }
  return pres;
}

inline std::vector<Coloring> enumerate_virtual_homs_diagram(const VirtualArcPresentation& pres,
                                                            const VirtualQuandle& X,
                                                            const RunConfig& cfg = {}) {
  validate_virtual(X);
  EnumerationProblem p;
  p.target = &X.quandle;
  p.var_count = pres.arc_count;
  for (const auto& r : pres.relations) {
    if (r.sign > 0)
      p.ternary.push_back({r.z, r.x, r.y, false, -1});
    else
      p.ternary.push_back({r.x, r.z, r.y, false, -1});
  }
  p.twists.push_back(X.alpha);
  p.twists.push_back(X.alpha.inverse());
  for (const auto& t : pres.twists) p.links.push_back({t.to, t.from, t.power > 0 ? 0 : 1});
  return enumerate_solutions(p, cfg);
}

inline std::vector<Coloring> enumerate_virtual_homs_diagram(const VirtualDiagram& dia,
                                                            const VirtualQuandle& X,
                                                            const RunConfig& cfg = {}) {
  return enumerate_virtual_homs_diagram(virtual_arcs_and_relations(dia), X, cfg);
}

inline std::vector<ActionColoring> enumerate_virtual_actions(const VirtualArcPresentation& pres,
                                                             const ConjAutContext& ctx,
                                                             const Permutation& beta,
                                                             const RunConfig& cfg = {}) {
  EnumerationProblem p;
  p.target = &ctx.conj.quandle;
  p.var_count = pres.arc_count;
  for (const auto& r : pres.relations) {
    if (r.sign > 0)
      p.ternary.push_back({r.z, r.x, r.y, false, -1});
    else
      p.ternary.push_back({r.x, r.z, r.y, false, -1});
  }
  Permutation shuffle = conj_index_map(ctx, beta);
  p.twists.push_back(shuffle);
  p.twists.push_back(shuffle.inverse());
  for (const auto& t : pres.twists) p.links.push_back({t.to, t.from, t.power > 0 ? 0 : 1});
  auto sols = enumerate_solutions(p, cfg);
  std::vector<ActionColoring> out;
  out.reserve(sols.size());
  for (auto& s : sols) out.push_back(ActionColoring::from_values(std::move(s)));
  return out;
}

inline std::vector<Coloring> enumerate_virtual_derivations(const VirtualArcPresentation& pres,
                                                           const ConjAutContext& ctx,
                                                           const Permutation& beta,
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
  int plus = static_cast<int>(twists.perms.size());
  twists.perms.push_back(beta);
  twists.perms.push_back(beta.inverse());
  for (const auto& t : pres.twists) p.links.push_back({t.to, t.from, t.power > 0 ? plus : plus + 1});
  p.twists = std::move(twists.perms);
  return enumerate_solutions(p, cfg);
}

inline DerivationSurvey survey_virtual_derivations(const VirtualArcPresentation& pres,
                                                   const VirtualQuandle& X,
                                                   const RunConfig& cfg = {}) {
  validate_virtual(X);
  auto ctx = conj_aut_context(X.quandle, cfg);
  auto actions = enumerate_virtual_actions(pres, *ctx, X.alpha, cfg);
  const Permutation& beta = X.alpha;
  return detail::run_survey(std::move(ctx), std::move(actions), cfg,
                            [&pres, &beta](const ConjAutContext& c, const ActionColoring& a,
                                           const RunConfig& task_cfg) {
                              return enumerate_virtual_derivations(pres, c, beta, a, task_cfg);
                            });
}

inline DerivationSurvey survey_virtual_derivations(const VirtualDiagram& dia,
                                                   const VirtualQuandle& X,
                                                   const RunConfig& cfg = {}) {
  return survey_virtual_derivations(virtual_arcs_and_relations(dia), X, cfg);
}

inline DerivationSurvey survey_virtual_derivations_finite(const VirtualQuandle& q,
                                                          const VirtualQuandle& X,
                                                          const RunConfig& cfg = {}) {
  auto actions = enumerate_virtual_actions_finite(q, X, cfg);
  auto ctx = conj_aut_context(X.quandle, cfg);
  return detail::run_survey(std::move(ctx), std::move(actions), cfg,
                            [&q, &X](const ConjAutContext&, const ActionColoring& a,
                                     const RunConfig& task_cfg) {
                              return enumerate_virtual_derivations_finite(q, X, a, task_cfg);
                            });
}

// Slides two edges across each other through a pair of virtual crossings.
// Colorings transfer one-to-one whatever the structure map, which pins the
// left/right convention above: the two passes cancel.
inline VirtualDiagram vr2_add(const VirtualDiagram& dia, int edge1, int edge2) {
  std::vector<detail::RawCrossing> raw;
  if (dia.unknot) {
    raw.push_back({{1, 1, 2, 4}, true});
    raw.push_back({{2, 3, 3, 4}, true});
    return detail::virtual_from_raw(raw, std::nullopt);
  }
  if (edge1 == edge2) throw std::invalid_argument("the move needs two distinct edges");
  for (int e : {edge1, edge2})
    if (e < 1 || e > dia.edge_count) throw std::invalid_argument("edge out of range");
  detail::EdgeRemap rm{{edge1, edge2}};
  KnotDiagram classical;
  classical.crossings = dia.crossings;
  classical.edge_count = dia.edge_count;
  for (const auto& t : detail::remap_crossings(classical, rm)) raw.push_back({t, false});
  for (const auto& v : dia.virtuals) {
    std::array<int, 4> t{v.a, v.b, v.c, v.d};
    std::array<int, 4> roles{};
    roles[0] = 0;
    roles[2] = 1;
    roles[1] = v.second_to_b ? 1 : 0;
    roles[3] = v.second_to_b ? 0 : 1;
    for (int k = 0; k < 4; ++k) t[k] = roles[k] == 0 ? rm.in_label(t[k]) : rm.out_label(t[k]);
    raw.push_back({t, true});
  }
  int p = rm.shift(edge1);
  int u = rm.shift(edge2);
  raw.push_back({{p, u + 1, p + 1, u}, true});
  raw.push_back({{p + 1, u + 1, p + 2, u + 2}, true});
  return detail::virtual_from_raw(raw, std::nullopt);
}

}  // namespace knotderiv
