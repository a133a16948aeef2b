#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotderiv/diagram.hpp"
#include "knotderiv/quandle.hpp"
#include "knotderiv/search.hpp"

namespace knotderiv {

// A coloring assigns a target element to every arc (diagram sources) or to
// every element (finite sources).  Stored 0-based; lists coming out of the
// enumeration engine are sorted and duplicate-free.
using Coloring = std::vector<int>;

inline EnumerationProblem coloring_problem(const ArcPresentation& pres, const FiniteQuandle& X) {
  EnumerationProblem p;
  p.target = &X;
  p.var_count = pres.arc_count;
  for (const auto& r : pres.relations) {
    // z = x * y at positive crossings, x = z * y at negative ones.
    if (r.sign > 0)
      p.ternary.push_back({r.z, r.x, r.y, false, -1});
    else
      p.ternary.push_back({r.x, r.z, r.y, false, -1});
  }
  return p;
}

inline std::vector<Coloring> enumerate_homs_diagram(const ArcPresentation& pres,
                                                    const FiniteQuandle& X,
                                                    const RunConfig& cfg = {}) {
  auto p = coloring_problem(pres, X);
  return enumerate_solutions(p, cfg);
}

inline std::vector<Coloring> enumerate_homs_diagram(const KnotDiagram& dia, const FiniteQuandle& X,
                                                    const RunConfig& cfg = {}) {
  return enumerate_homs_diagram(arcs_and_relations(dia), X, cfg);
}

// All quandle homomorphisms Q -> X: one constraint per source pair.
inline std::vector<Coloring> enumerate_homs_finite(const FiniteQuandle& q, const FiniteQuandle& X,
                                                   const RunConfig& cfg = {}) {
  EnumerationProblem p;
  p.target = &X;
  p.var_count = q.size();
  for (int x = 0; x < q.size(); ++x)
    for (int y = 0; y < q.size(); ++y)
      if (x != y) p.ternary.push_back({q.op(x, y), x, y, false, -1});
  return enumerate_solutions(p, cfg);
}

class not_abelian_error : public std::runtime_error {
 public:
  explicit not_abelian_error(const std::string& what) : std::runtime_error(what) {}
};

class closure_error : public std::runtime_error {
 public:
  closure_error(const std::string& what, int f, int g)
      : std::runtime_error(what), f(f), g(g) {}
  int f, g;  // 0-based indices of the offending pair
};

// A set of maps into X closed under the pointwise operation, packaged as a
// quandle.  Element i of the table is maps[i].
struct PointwiseQuandle {
  FiniteQuandle quandle;
  std::vector<Coloring> maps;
};

// Builds the pointwise quandle on a sorted list of maps.  The hom set of any
// source into a medial target is closed under (f*g)(q) = f(q)*g(q); a lookup
// miss therefore indicates a corrupted input set and is reported as such.
inline PointwiseQuandle pointwise_quandle(std::vector<Coloring> maps, const FiniteQuandle& X,
                                          bool require_abelian = true) {
  if (maps.empty()) throw std::invalid_argument("pointwise quandle of an empty map set");
  if (require_abelian && !check_properties(X).abelian)
    throw not_abelian_error("pointwise quandle needs an abelian (medial) target");
  std::sort(maps.begin(), maps.end());
  maps.erase(std::unique(maps.begin(), maps.end()), maps.end());
  int n = static_cast<int>(maps.size());
  std::vector<int> flat(static_cast<std::size_t>(n) * n);
  Coloring prod(maps[0].size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = X.op(maps[i][k], maps[j][k]);
      auto it = std::lower_bound(maps.begin(), maps.end(), prod);
      if (it == maps.end() || *it != prod)
        throw closure_error("pointwise product leaves the map set", i, j);
      flat[static_cast<std::size_t>(i) * n + j] = static_cast<int>(it - maps.begin());
    }
  }
  return {FiniteQuandle::from_flat(n, flat), std::move(maps)};
}

inline PointwiseQuandle hom_quandle(const ArcPresentation& pres, const FiniteQuandle& X,
                                    const RunConfig& cfg = {}) {
  return pointwise_quandle(enumerate_homs_diagram(pres, X, cfg), X);
}

inline PointwiseQuandle hom_quandle(const KnotDiagram& dia, const FiniteQuandle& X,
                                    const RunConfig& cfg = {}) {
  return hom_quandle(arcs_and_relations(dia), X, cfg);
}

inline PointwiseQuandle hom_quandle(const FiniteQuandle& q, const FiniteQuandle& X,
                                    const RunConfig& cfg = {}) {
  return pointwise_quandle(enumerate_homs_finite(q, X, cfg), X);
}

// Index of the constant map at each target element, -1 where absent.  For
// knot diagrams every constant colors, so this is a full embedding of X.
inline std::vector<int> constant_map_indices(const std::vector<Coloring>& maps, int target_size) {
  std::vector<int> idx(target_size, -1);
  if (maps.empty()) return idx;
  Coloring probe(maps[0].size());
  for (int x = 0; x < target_size; ++x) {
    std::fill(probe.begin(), probe.end(), x);
    auto it = std::lower_bound(maps.begin(), maps.end(), probe);
    if (it != maps.end() && *it == probe) idx[x] = static_cast<int>(it - maps.begin());
  }
  return idx;
}

}  // namespace knotderiv
