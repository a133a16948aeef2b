#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "knotderiv/knotderiv.hpp"

// Brute-force reference enumerators.  Everything here walks the full
// assignment space with a plain odometer and evaluates the defining equations
// directly, so none of the search engine's propagation or ordering is shared.
// Outputs are sorted, matching the engine's contract.
namespace oracle {

using knotderiv::ActionColoring;
using knotderiv::ArcPresentation;
using knotderiv::FiniteQuandle;
using knotderiv::KnotDiagram;
using knotderiv::Permutation;
using knotderiv::VirtualArcPresentation;
using knotderiv::VirtualDiagram;
using knotderiv::VirtualQuandle;

inline bool power_fits(long long base, int vars, long long limit) {
  long long total = 1;
  for (int i = 0; i < vars; ++i) {
    total *= base;
    if (total > limit) return false;
  }
  return true;
}

// Counts with the last variable fastest so tuples come out in ascending
// lexicographic order, matching the engine's output order.
template <typename Visit>
void odometer(int vars, int base, Visit visit) {
  std::vector<int> v(vars, 0);
  for (;;) {
    visit(const_cast<const std::vector<int>&>(v));
    int i = vars - 1;
    while (i >= 0 && ++v[i] == base) v[i--] = 0;
    if (i < 0) return;
  }
}

// Colorings by edges: every edge gets a value, the over strand passes its
// value through, and the under strand picks up the crossing rule.  Collapsing
// to arcs afterwards must reproduce the engine's arc colorings exactly.
inline std::vector<std::vector<int>> homs_by_edges(const KnotDiagram& dia,
                                                   const FiniteQuandle& X) {
  if (dia.unknot) throw std::invalid_argument("edge oracle needs at least one crossing");
  std::vector<std::vector<int>> out;
  odometer(dia.edge_count, X.size(), [&](const std::vector<int>& v) {
    for (const auto& c : dia.crossings) {
      if (v[c.over_out - 1] != v[c.over_in - 1]) return;
      int under_in = c.sign > 0 ? c.a : c.c;
      int under_out = c.sign > 0 ? c.c : c.a;
      if (v[under_out - 1] != X.op(v[under_in - 1], v[c.over_in - 1])) return;
    }
    out.push_back(v);
  });
  return out;
}

inline std::vector<std::vector<int>> virtual_homs_by_edges(const VirtualDiagram& dia,
                                                           const VirtualQuandle& X) {
  if (dia.unknot) throw std::invalid_argument("edge oracle needs at least one crossing");
  const FiniteQuandle& Q = X.quandle;
  std::vector<std::vector<int>> out;
  odometer(dia.edge_count, Q.size(), [&](const std::vector<int>& v) {
    for (const auto& c : dia.crossings) {
      if (v[c.over_out - 1] != v[c.over_in - 1]) return;
      int under_in = c.sign > 0 ? c.a : c.c;
      int under_out = c.sign > 0 ? c.c : c.a;
      if (v[under_out - 1] != Q.op(v[under_in - 1], v[c.over_in - 1])) return;
    }
    for (const auto& vc : dia.virtuals) {
      if (vc.second_to_b) {
        if (v[vc.b - 1] != X.alpha(v[vc.d - 1])) return;
        if (v[vc.a - 1] != X.alpha(v[vc.c - 1])) return;
      } else {
        if (v[vc.c - 1] != X.alpha(v[vc.a - 1])) return;
        if (v[vc.b - 1] != X.alpha(v[vc.d - 1])) return;
      }
    }
    out.push_back(v);
  });
  return out;
}

// Projects edge colorings onto arcs and drops the duplicates that never
// happen (edges of one arc always agree by construction).
inline std::vector<std::vector<int>> collapse_to_arcs(const std::vector<std::vector<int>>& edge_sols,
                                                      const std::vector<int>& arc_of_edge,
                                                      int arc_count) {
  std::vector<std::vector<int>> out;
  for (const auto& v : edge_sols) {
    std::vector<int> arcs(arc_count, -1);
    for (std::size_t e = 0; e < v.size(); ++e) {
      int a = arc_of_edge[e];
      if (arcs[a] >= 0 && arcs[a] != v[e])
        throw std::logic_error("edges of one arc disagree");
      arcs[a] = v[e];
    }
    out.push_back(std::move(arcs));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// All automorphisms by filtering every permutation; keeps the library's
// sorted one-line order.  Only sane for tiny quandles.
inline std::vector<Permutation> all_automorphisms(const FiniteQuandle& q) {
  int n = q.size();
  if (n > 7) throw std::invalid_argument("full permutation filter capped at order 7");
  std::vector<int> im(n);
  for (int i = 0; i < n; ++i) im[i] = i;
  std::vector<Permutation> out;
  do {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x)
      for (int y = 0; y < n; ++y)
        if (im[q.op(x, y)] != q.op(im[x], im[y])) {
          ok = false;
          break;
        }
    if (ok) out.emplace_back(im);
  } while (std::next_permutation(im.begin(), im.end()));
  return out;
}

inline Permutation conj_by(const Permutation& g, const Permutation& b) {
  return knotderiv::compose(b, knotderiv::compose(g, b.inverse()));
}

inline int index_of(const std::vector<Permutation>& auts, const Permutation& g) {
  for (std::size_t i = 0; i < auts.size(); ++i)
    if (auts[i] == g) return static_cast<int>(i);
  throw std::logic_error("permutation missing from the automorphism list");
}

// Arc assignments of automorphisms with the conjugation rule at every
// crossing, evaluated on the permutations themselves.
inline std::vector<std::vector<int>> actions_diagram(const ArcPresentation& pres,
                                                     const std::vector<Permutation>& auts) {
  std::vector<std::vector<int>> out;
  odometer(pres.arc_count, static_cast<int>(auts.size()), [&](const std::vector<int>& v) {
    for (const auto& r : pres.relations) {
      const Permutation& y = auts[v[r.y]];
      if (r.sign > 0) {
        if (!(auts[v[r.z]] == conj_by(auts[v[r.x]], y))) return;
      } else {
        if (!(auts[v[r.x]] == conj_by(auts[v[r.z]], y))) return;
      }
    }
    out.push_back(v);
  });
  return out;
}

inline std::vector<std::vector<int>> derivations_diagram(const ArcPresentation& pres,
                                                         const FiniteQuandle& X,
                                                         const std::vector<Permutation>& auts,
                                                         const std::vector<int>& phi) {
  std::vector<std::vector<int>> out;
  odometer(pres.arc_count, X.size(), [&](const std::vector<int>& f) {
    for (int a = 0; a < pres.arc_count; ++a)
      if (X.op(f[a], auts[phi[a]](f[a])) != f[a]) return;
    for (const auto& r : pres.relations) {
      if (r.sign > 0) {
        if (f[r.z] != X.op(f[r.x], auts[phi[r.x]](f[r.y]))) return;
      } else {
        if (f[r.x] != X.op(f[r.z], auts[phi[r.z]](f[r.y]))) return;
      }
    }
    out.push_back(f);
  });
  return out;
}

inline Permutation structure_power(const Permutation& beta, int power) {
  return power > 0 ? beta : beta.inverse();
}

inline std::vector<std::vector<int>> virtual_actions_diagram(const VirtualArcPresentation& pres,
                                                             const std::vector<Permutation>& auts,
                                                             const Permutation& beta) {
  std::vector<std::vector<int>> out;
  odometer(pres.arc_count, static_cast<int>(auts.size()), [&](const std::vector<int>& v) {
    for (const auto& r : pres.relations) {
      const Permutation& y = auts[v[r.y]];
      if (r.sign > 0) {
        if (!(auts[v[r.z]] == conj_by(auts[v[r.x]], y))) return;
      } else {
        if (!(auts[v[r.x]] == conj_by(auts[v[r.z]], y))) return;
      }
    }
    for (const auto& t : pres.twists)
      if (!(auts[v[t.to]] == conj_by(auts[v[t.from]], structure_power(beta, t.power)))) return;
    out.push_back(v);
  });
  return out;
}

inline std::vector<std::vector<int>> virtual_derivations_diagram(
    const VirtualArcPresentation& pres, const FiniteQuandle& X,
    const std::vector<Permutation>& auts, const Permutation& beta, const std::vector<int>& phi) {
  std::vector<std::vector<int>> out;
  odometer(pres.arc_count, X.size(), [&](const std::vector<int>& f) {
    for (int a = 0; a < pres.arc_count; ++a)
      if (X.op(f[a], auts[phi[a]](f[a])) != f[a]) return;
    for (const auto& r : pres.relations) {
      if (r.sign > 0) {
        if (f[r.z] != X.op(f[r.x], auts[phi[r.x]](f[r.y]))) return;
      } else {
        if (f[r.x] != X.op(f[r.z], auts[phi[r.z]](f[r.y]))) return;
      }
    }
    for (const auto& t : pres.twists)
      if (f[t.to] != structure_power(beta, t.power)(f[t.from])) return;
    out.push_back(f);
  });
  return out;
}

inline std::vector<std::vector<int>> homs_finite(const FiniteQuandle& q, const FiniteQuandle& X) {
  std::vector<std::vector<int>> out;
  odometer(q.size(), X.size(), [&](const std::vector<int>& f) {
    for (int a = 0; a < q.size(); ++a)
      for (int b = 0; b < q.size(); ++b)
        if (f[q.op(a, b)] != X.op(f[a], f[b])) return;
    out.push_back(f);
  });
  return out;
}

inline std::vector<std::vector<int>> virtual_homs_finite(const VirtualQuandle& q,
                                                         const VirtualQuandle& X) {
  std::vector<std::vector<int>> out;
  odometer(q.quandle.size(), X.quandle.size(), [&](const std::vector<int>& f) {
    for (int a = 0; a < q.quandle.size(); ++a) {
      if (f[q.alpha(a)] != X.alpha(f[a])) return;
      for (int b = 0; b < q.quandle.size(); ++b)
        if (f[q.quandle.op(a, b)] != X.quandle.op(f[a], f[b])) return;
    }
    out.push_back(f);
  });
  return out;
}

inline std::vector<std::vector<int>> actions_finite(const FiniteQuandle& q,
                                                    const std::vector<Permutation>& auts) {
  std::vector<std::vector<int>> out;
  odometer(q.size(), static_cast<int>(auts.size()), [&](const std::vector<int>& v) {
    for (int a = 0; a < q.size(); ++a)
      for (int b = 0; b < q.size(); ++b)
        if (!(auts[v[q.op(a, b)]] == conj_by(auts[v[a]], auts[v[b]]))) return;
    out.push_back(v);
  });
  return out;
}

inline std::vector<std::vector<int>> virtual_actions_finite(const VirtualQuandle& q,
                                                            const std::vector<Permutation>& auts,
                                                            const Permutation& beta) {
  std::vector<std::vector<int>> out;
  odometer(q.quandle.size(), static_cast<int>(auts.size()), [&](const std::vector<int>& v) {
    for (int a = 0; a < q.quandle.size(); ++a) {
      if (!(auts[v[q.alpha(a)]] == conj_by(auts[v[a]], beta))) return;
      for (int b = 0; b < q.quandle.size(); ++b)
        if (!(auts[v[q.quandle.op(a, b)]] == conj_by(auts[v[a]], auts[v[b]]))) return;
    }
    out.push_back(v);
  });
  return out;
}

// Ordered pairs cover the diagonal, so the idempotency filter is implicit.
inline std::vector<std::vector<int>> derivations_finite(const FiniteQuandle& q,
                                                        const FiniteQuandle& X,
                                                        const std::vector<Permutation>& auts,
                                                        const std::vector<int>& phi) {
  std::vector<std::vector<int>> out;
  odometer(q.size(), X.size(), [&](const std::vector<int>& f) {
    for (int a = 0; a < q.size(); ++a)
      for (int b = 0; b < q.size(); ++b)
        if (f[q.op(a, b)] != X.op(f[a], auts[phi[a]](f[b]))) return;
    out.push_back(f);
  });
  return out;
}

inline std::vector<std::vector<int>> virtual_derivations_finite(
    const VirtualQuandle& q, const VirtualQuandle& X, const std::vector<Permutation>& auts,
    const std::vector<int>& phi) {
  std::vector<std::vector<int>> out;
  odometer(q.quandle.size(), X.quandle.size(), [&](const std::vector<int>& f) {
    for (int a = 0; a < q.quandle.size(); ++a) {
      if (f[q.alpha(a)] != X.alpha(f[a])) return;
      for (int b = 0; b < q.quandle.size(); ++b)
        if (f[q.quandle.op(a, b)] != X.quandle.op(f[a], auts[phi[a]](f[b]))) return;
    }
    out.push_back(f);
  });
  return out;
}

inline std::vector<std::vector<int>> values_of(const std::vector<ActionColoring>& actions) {
  std::vector<std::vector<int>> out;
  out.reserve(actions.size());
  for (const auto& a : actions) out.push_back(a.values);
  return out;
}

}  // namespace oracle
