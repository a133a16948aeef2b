#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotderiv/config.hpp"
#include "knotderiv/permutation.hpp"
#include "knotderiv/quandle.hpp"
#include "knotderiv/search.hpp"

namespace knotderiv {

inline bool is_automorphism(const FiniteQuandle& q, const Permutation& g) {
  if (g.degree() != q.size()) return false;
  for (int x = 0; x < q.size(); ++x)
    for (int y = 0; y < q.size(); ++y)
      if (g(q.op(x, y)) != q.op(g(x), g(y))) return false;
  return true;
}

namespace detail {

inline std::string aut_cache_path(const std::string& dir, const FiniteQuandle& q) {
  std::ostringstream os;
  os << dir << "/aut_" << std::hex << q.content_hash() << ".txt";
  return os.str();
}

inline std::optional<std::vector<Permutation>> load_aut_cache(const std::string& path,
                                                              const FiniteQuandle& q) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  int degree = 0;
  std::size_t count = 0;
  if (!(in >> degree >> count) || degree != q.size()) return std::nullopt;
  std::vector<Permutation> elements;
  elements.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<int> im(degree);
    for (int& v : im)
      if (!(in >> v)) return std::nullopt;
    Permutation p(std::move(im));
    if (!is_automorphism(q, p)) return std::nullopt;  // stale or corrupted entry
    elements.push_back(std::move(p));
  }
  return elements;
}

inline void store_aut_cache(const std::string& path, const std::vector<Permutation>& elements) {
  std::error_code ec;
  std::filesystem::create_directories(std::filesystem::path(path).parent_path(), ec);
  std::ofstream out(path);
  if (!out) return;
  out << (elements.empty() ? 0 : elements.front().degree()) << ' ' << elements.size() << '\n';
  for (const auto& p : elements) {
    for (int i = 0; i < p.degree(); ++i) out << p(i) << (i + 1 == p.degree() ? '\n' : ' ');
  }
}

}  // namespace detail

// All automorphisms, found as injective endomorphisms by the shared
// backtracking engine (finite + injective forces bijective, and a bijective
// homomorphism of quandles is invertible).
inline PermutationGroup automorphism_group(const FiniteQuandle& q, const RunConfig& cfg = {}) {
  if (cfg.cache_dir) {
    auto path = detail::aut_cache_path(*cfg.cache_dir, q);
    if (auto cached = detail::load_aut_cache(path, q)) {
      PermutationGroup grp;
      grp.degree = q.size();
      grp.elements = std::move(*cached);
      grp.generators = small_generating_set(grp);
      return grp;
    }
  }
  EnumerationProblem p;
  p.target = &q;
  p.var_count = q.size();
  p.all_different = true;
  for (int x = 0; x < q.size(); ++x)
    for (int y = 0; y < q.size(); ++y) {
      if (x == y) continue;  // idempotency holds automatically
      p.ternary.push_back({q.op(x, y), x, y, false, -1});
    }
  auto sols = enumerate_solutions(p, cfg);
  PermutationGroup grp;
  grp.degree = q.size();
  grp.elements.reserve(sols.size());
  for (auto& s : sols) grp.elements.emplace_back(std::move(s));
  grp.generators = small_generating_set(grp);
  if (cfg.cache_dir) detail::store_aut_cache(detail::aut_cache_path(*cfg.cache_dir, q), grp.elements);
  return grp;
}

inline PermutationGroup inner_subgroup(const FiniteQuandle& q) {
  std::set<Permutation> uniq;
  for (int x = 0; x < q.size(); ++x) uniq.insert(q.right_translation(x));
  return group_closure(q.size(), std::vector<Permutation>(uniq.begin(), uniq.end()));
}

struct ConjQuandle {
  FiniteQuandle quandle;
  std::vector<Permutation> labels;  // element i of the quandle is labels[i]
};

// Conjugation quandle of a permutation group: a * b = b a b^{-1}, elements in
// sorted one-line order (so the identity is always element 0).
inline ConjQuandle conj_quandle(const PermutationGroup& grp) {
  std::size_t n = grp.order();
  if (n == 0) throw std::invalid_argument("conjugation quandle of an empty group");
  if (n > 4096) throw std::invalid_argument("conjugation quandle table would exceed 4096 elements");
  std::vector<int> flat(n * n);
  std::vector<Permutation> inverses;
  inverses.reserve(n);
  for (const auto& g : grp.elements) inverses.push_back(g.inverse());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      Permutation w = compose(grp.elements[j], compose(grp.elements[i], inverses[j]));
      int idx = grp.index_of(w);
      if (idx < 0) throw std::logic_error("group is not closed under conjugation");
      flat[i * n + j] = idx;
    }
  }
  return {FiniteQuandle::from_flat(static_cast<int>(n), flat), grp.elements};
}

}  // namespace knotderiv
