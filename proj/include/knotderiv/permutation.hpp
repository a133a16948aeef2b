#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotderiv/config.hpp"

namespace knotderiv {

// Bijection on {0, ..., n-1} stored in one-line notation.  External text
// (cycle strings) is 1-based; everything else here is 0-based.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<char> seen(images_.size(), 0);
    for (int v : images_) {
      if (v < 0 || v >= static_cast<int>(images_.size()) || seen[v])
        throw std::invalid_argument("permutation images are not a bijection");
      seen[v] = 1;
    }
  }

  static Permutation identity(int n) {
    std::vector<int> im(n);
    std::iota(im.begin(), im.end(), 0);
    return Permutation(std::move(im));
  }

  int degree() const { return static_cast<int>(images_.size()); }
  int operator()(int x) const { return images_[x]; }
  const std::vector<int>& images() const { return images_; }

  bool is_identity() const {
    for (int i = 0; i < degree(); ++i)
      if (images_[i] != i) return false;
    return true;
  }

  Permutation inverse() const {
    std::vector<int> inv(images_.size());
    for (int i = 0; i < degree(); ++i) inv[images_[i]] = i;
    return Permutation(std::move(inv));
  }

  int order() const;

  // Cycle type as a descending list of cycle lengths (fixed points included).
  std::vector<int> cycle_type() const {
    std::vector<int> lens;
    std::vector<char> seen(images_.size(), 0);
    for (int i = 0; i < degree(); ++i) {
      if (seen[i]) continue;
      int len = 0;
      for (int j = i; !seen[j]; j = images_[j]) {
        seen[j] = 1;
        ++len;
      }
      lens.push_back(len);
    }
    std::sort(lens.rbegin(), lens.rend());
    return lens;
  }

  // 1-based cycle notation, fixed points omitted; identity prints as "()".
  std::string cycles() const {
    std::string out;
    std::vector<char> seen(images_.size(), 0);
    for (int i = 0; i < degree(); ++i) {
      if (seen[i] || images_[i] == i) continue;
      out += '(';
      bool first = true;
      for (int j = i; !seen[j]; j = images_[j]) {
        seen[j] = 1;
        if (!first) out += ',';
        out += std::to_string(j + 1);
        first = false;
      }
      out += ')';
    }
    return out.empty() ? "()" : out;
  }

  // Parses 1-based cycle notation such as "(2,12)(3,8)(5,15)"; "()" and the
  // empty string both give the identity.  Whitespace and space separators
  // inside cycles are accepted.
  static Permutation from_cycles(const std::string& text, int degree) {
    std::vector<int> im(degree);
    std::iota(im.begin(), im.end(), 0);
    std::size_t i = 0;
    auto skip_ws = [&] {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    while (i < text.size()) {
      if (text[i] != '(') throw std::invalid_argument("expected '(' in cycle notation: " + text);
      ++i;
      std::vector<int> cyc;
      skip_ws();
      while (i < text.size() && text[i] != ')') {
        if (text[i] == ',' || std::isspace(static_cast<unsigned char>(text[i]))) {
          ++i;
          continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(text[i])))
          throw std::invalid_argument("bad character in cycle notation: " + text);
        int v = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
          v = v * 10 + (text[i++] - '0');
        if (v < 1 || v > degree)
          throw std::invalid_argument("cycle entry " + std::to_string(v) +
                                      " out of range 1.." + std::to_string(degree));
        cyc.push_back(v - 1);
      }
      if (i >= text.size()) throw std::invalid_argument("unterminated cycle: " + text);
      ++i;  // ')'
      std::set<int> uniq(cyc.begin(), cyc.end());
      if (uniq.size() != cyc.size())
        throw std::invalid_argument("repeated entry within a cycle: " + text);
      for (std::size_t k = 0; k + 1 < cyc.size(); ++k) im[cyc[k]] = cyc[k + 1];
      if (!cyc.empty()) im[cyc.back()] = cyc.front();
      skip_ws();
    }
    return Permutation(std::move(im));
  }

  std::uint64_t content_hash() const { return fnv1a_ints(kFnvSeed, images_); }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) {
    return a.images_ <=> b.images_;
  }

 private:
  std::vector<int> images_;
};

// f after g: x -> f(g(x)).
inline Permutation compose(const Permutation& f, const Permutation& g) {
  std::vector<int> im(g.degree());
  for (int x = 0; x < g.degree(); ++x) im[x] = f(g(x));
  return Permutation(std::move(im));
}

// b a b^{-1}, the conjugation used by Conj(G).  With this orientation the
// inner action q -> S_q of a quandle on itself is a homomorphism into
// Conj(Aut): S_{x*y} = S_y S_x S_y^{-1}.
inline Permutation conjugate(const Permutation& a, const Permutation& b) {
  return compose(b, compose(a, b.inverse()));
}

inline int Permutation::order() const {
  Permutation p = *this;
  const Permutation id = identity(degree());
  int k = 1;
  while (!(p == id)) {
    p = compose(p, *this);
    ++k;
  }
  return k;
}

struct PermutationGroup {
  int degree = 0;
  std::vector<Permutation> elements;  // sorted one-line notation, closed, id first
  std::vector<Permutation> generators;

  std::size_t order() const { return elements.size(); }

  int index_of(const Permutation& p) const {
    auto it = std::lower_bound(elements.begin(), elements.end(), p);
    if (it == elements.end() || !(*it == p)) return -1;
    return static_cast<int>(it - elements.begin());
  }

  bool contains(const Permutation& p) const { return index_of(p) >= 0; }
};

// BFS closure over right multiplication by the generators.  Throws when the
// group would exceed `bound` elements, so runaway inputs fail loudly instead
// of exhausting memory.
inline PermutationGroup group_closure(int degree, std::vector<Permutation> generators,
                                      std::size_t bound = 1'000'000) {
  for (const auto& g : generators)
    if (g.degree() != degree) throw std::invalid_argument("generator degree mismatch");
  std::set<Permutation> seen;
  std::vector<Permutation> queue;
  seen.insert(Permutation::identity(degree));
  queue.push_back(Permutation::identity(degree));
  for (std::size_t q = 0; q < queue.size(); ++q) {
    for (const auto& g : generators) {
      Permutation w = compose(queue[q], g);
      if (seen.insert(w).second) {
        if (seen.size() > bound)
          throw std::runtime_error("group closure exceeded bound of " + std::to_string(bound));
        queue.push_back(std::move(w));
      }
    }
  }
  PermutationGroup grp;
  grp.degree = degree;
  grp.elements.assign(seen.begin(), seen.end());
  grp.generators = std::move(generators);
  return grp;
}

// Greedy generating subset, handy for compact display of large groups.
inline std::vector<Permutation> small_generating_set(const PermutationGroup& grp) {
  std::vector<Permutation> gens;
  std::set<Permutation> span;
  span.insert(Permutation::identity(grp.degree));
  for (const auto& el : grp.elements) {
    if (span.count(el)) continue;
    gens.push_back(el);
    auto closed = group_closure(grp.degree, gens, grp.order());
    span = std::set<Permutation>(closed.elements.begin(), closed.elements.end());
    if (span.size() == grp.order()) break;
  }
  return gens;
}

}  // namespace knotderiv
