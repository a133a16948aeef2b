#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotderiv/config.hpp"
#include "knotderiv/permutation.hpp"

namespace knotderiv {

// Which axiom failed and where.  Witness indices are 1-based to match the
// matrix file format; unused slots stay 0.
struct AxiomViolation {
  char axiom = '?';  // '1' idempotency, '2' right translations, '3' distributivity, 'E' shape
  std::array<int, 3> witness{0, 0, 0};
  std::string message;
};

class quandle_error : public std::runtime_error {
 public:
  explicit quandle_error(AxiomViolation v)
      : std::runtime_error(v.message), violation(std::move(v)) {}
  AxiomViolation violation;
};

// Finite quandle given by its operation table.  Entry (i, j) is x_i * x_j.
// Storage is 0-based and flat; the left division table (z with z * y = x) is
// precomputed since axiom Q2 guarantees it exists and enumeration leans on it.
class FiniteQuandle {
 public:
  FiniteQuandle() = default;

  static std::optional<AxiomViolation> check_rows(const std::vector<std::vector<int>>& rows) {
    int n = static_cast<int>(rows.size());
    if (n == 0)
      return AxiomViolation{'E', {0, 0, 0}, "empty table"};
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        return AxiomViolation{'E', {i + 1, 0, 0},
                              "row " + std::to_string(i + 1) + " does not have " +
                                  std::to_string(n) + " entries"};
      for (int j = 0; j < n; ++j)
        if (rows[i][j] < 1 || rows[i][j] > n)
          return AxiomViolation{'E', {i + 1, j + 1, 0},
                                "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                    ") = " + std::to_string(rows[i][j]) + " is outside 1.." +
                                    std::to_string(n)};
    }
    for (int i = 0; i < n; ++i)
      if (rows[i][i] != i + 1)
        return AxiomViolation{'1', {i + 1, 0, 0},
                              std::to_string(i + 1) + "*" + std::to_string(i + 1) + " = " +
                                  std::to_string(rows[i][i]) + ", expected " +
                                  std::to_string(i + 1)};
    for (int j = 0; j < n; ++j) {
      std::vector<char> hit(n, 0);
      for (int i = 0; i < n; ++i) {
        int v = rows[i][j] - 1;
        if (hit[v])
          return AxiomViolation{'2', {j + 1, rows[i][j], 0},
                                "column " + std::to_string(j + 1) + " repeats value " +
                                    std::to_string(rows[i][j])};
        hit[v] = 1;
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          int lhs = rows[rows[i][j] - 1][k];
          int rhs = rows[rows[i][k] - 1][rows[j][k] - 1];
          if (lhs != rhs)
            return AxiomViolation{'3', {i + 1, j + 1, k + 1},
                                  "(" + std::to_string(i + 1) + "*" + std::to_string(j + 1) +
                                      ")*" + std::to_string(k + 1) + " = " + std::to_string(lhs) +
                                      " but (" + std::to_string(i + 1) + "*" +
                                      std::to_string(k + 1) + ")*(" + std::to_string(j + 1) + "*" +
                                      std::to_string(k + 1) + ") = " + std::to_string(rhs)};
        }
    return std::nullopt;
  }

  static FiniteQuandle from_rows(const std::vector<std::vector<int>>& rows) {
    if (auto bad = check_rows(rows)) throw quandle_error(*bad);
    int n = static_cast<int>(rows.size());
    std::vector<int> flat(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) flat[i * n + j] = rows[i][j] - 1;
    return FiniteQuandle(n, std::move(flat));
  }

  // 0-based flat table, validated the same way as from_rows.
  static FiniteQuandle from_flat(int n, const std::vector<int>& flat) {
    std::vector<std::vector<int>> rows(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rows[i][j] = flat[i * n + j] + 1;
    return from_rows(rows);
  }

  int size() const { return n_; }
  int op(int x, int y) const { return table_[x * n_ + y]; }
  int ldiv(int x, int y) const { return ldiv_[x * n_ + y]; }  // z with z * y = x

  Permutation right_translation(int y) const {
    std::vector<int> im(n_);
    for (int x = 0; x < n_; ++x) im[x] = op(x, y);
    return Permutation(std::move(im));
  }

  std::vector<std::vector<int>> rows() const {
    std::vector<std::vector<int>> r(n_, std::vector<int>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r[i][j] = op(i, j) + 1;
    return r;
  }

  const std::vector<int>& flat() const { return table_; }

  std::uint64_t content_hash() const {
    std::uint64_t h = fnv1a(kFnvSeed, static_cast<std::uint64_t>(n_));
    return fnv1a_ints(h, table_);
  }

  friend bool operator==(const FiniteQuandle& a, const FiniteQuandle& b) {
    return a.n_ == b.n_ && a.table_ == b.table_;
  }

 private:
  FiniteQuandle(int n, std::vector<int> flat) : n_(n), table_(std::move(flat)) {
    ldiv_.assign(n_ * n_, 0);
    for (int y = 0; y < n_; ++y)
      for (int z = 0; z < n_; ++z) ldiv_[op(z, y) * n_ + y] = z;
  }

  int n_ = 0;
  std::vector<int> table_;
  std::vector<int> ldiv_;
};

inline FiniteQuandle trivial_quandle(int n) {
  if (n < 1) throw std::invalid_argument("trivial quandle needs n >= 1");
  std::vector<int> flat(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) flat[i * n + j] = i;
  return FiniteQuandle::from_flat(n, flat);
}

// Takasaki quandle of Z_{m1} x ... x Z_{mk}: a * b = 2b - a componentwise.
inline FiniteQuandle takasaki(const std::vector<int>& moduli) {
  if (moduli.empty()) throw std::invalid_argument("takasaki needs at least one modulus");
  long long total = 1;
  for (int m : moduli) {
    if (m < 1) throw std::invalid_argument("takasaki moduli must be positive");
    total *= m;
    if (total > 4096) throw std::invalid_argument("takasaki table too large");
  }
  int n = static_cast<int>(total);
  auto decode = [&](int v) {
    std::vector<int> digits(moduli.size());
    for (std::size_t k = 0; k < moduli.size(); ++k) {
      digits[k] = v % moduli[k];
      v /= moduli[k];
    }
    return digits;
  };
  auto encode = [&](const std::vector<int>& digits) {
    int v = 0;
    for (std::size_t k = moduli.size(); k-- > 0;) v = v * moduli[k] + digits[k];
    return v;
  };
  std::vector<int> flat(n * n);
  for (int a = 0; a < n; ++a) {
    auto da = decode(a);
    for (int b = 0; b < n; ++b) {
      auto db = decode(b);
      std::vector<int> dc(moduli.size());
      for (std::size_t k = 0; k < moduli.size(); ++k)
        dc[k] = ((2 * db[k] - da[k]) % moduli[k] + moduli[k]) % moduli[k];
      flat[a * n + b] = encode(dc);
    }
  }
  return FiniteQuandle::from_flat(n, flat);
}

inline FiniteQuandle dihedral(int n) { return takasaki({n}); }

// Block-diagonal union; cross terms fall back to x * y = x.
inline FiniteQuandle disjoint_union_many(const std::vector<FiniteQuandle>& parts) {
  if (parts.empty()) throw std::invalid_argument("disjoint union of nothing");
  int n = 0;
  for (const auto& q : parts) n += q.size();
  std::vector<int> flat(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) flat[static_cast<std::size_t>(i) * n + j] = i;
  int base = 0;
  for (const auto& q : parts) {
    for (int i = 0; i < q.size(); ++i)
      for (int j = 0; j < q.size(); ++j)
        flat[static_cast<std::size_t>(base + i) * n + (base + j)] = base + q.op(i, j);
    base += q.size();
  }
  return FiniteQuandle::from_flat(n, flat);
}

inline FiniteQuandle disjoint_union(const FiniteQuandle& a, const FiniteQuandle& b) {
  return disjoint_union_many({a, b});
}

struct PropertyReport {
  bool abelian = false;      // (x*y)*(z*w) == (x*z)*(y*w)
  bool commutative = false;  // table symmetric
  bool involutary = false;   // every right translation squares to the identity
  bool flat = false;         // the group generated by S_x S_y is abelian
  bool trivial = false;
  bool connected = false;    // single orbit under inner automorphisms
};

inline bool is_connected(const FiniteQuandle& q) {
  int n = q.size();
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int found = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int y = 0; y < n; ++y) {
      for (int w : {q.op(v, y), q.ldiv(v, y)}) {
        if (!seen[w]) {
          seen[w] = 1;
          ++found;
          stack.push_back(w);
        }
      }
    }
  }
  return found == n;
}

inline PropertyReport check_properties(const FiniteQuandle& q) {
  int n = q.size();
  PropertyReport r;
  r.commutative = true;
  r.trivial = true;
  for (int i = 0; i < n && (r.commutative || r.trivial); ++i)
    for (int j = 0; j < n; ++j) {
      if (q.op(i, j) != q.op(j, i)) r.commutative = false;
      if (q.op(i, j) != i) r.trivial = false;
    }
  r.involutary = true;
  for (int y = 0; y < n && r.involutary; ++y)
    for (int x = 0; x < n; ++x)
      if (q.op(q.op(x, y), y) != x) {
        r.involutary = false;
        break;
      }
  r.abelian = true;
  for (int x = 0; x < n && r.abelian; ++x)
    for (int y = 0; y < n && r.abelian; ++y)
      for (int z = 0; z < n && r.abelian; ++z)
        for (int w = 0; w < n; ++w)
          if (q.op(q.op(x, y), q.op(z, w)) != q.op(q.op(x, z), q.op(y, w))) {
            r.abelian = false;
            break;
          }
  // Flatness only needs pairwise commutation of the generators S_x S_y.
  std::vector<Permutation> gens;
  {
    std::set<Permutation> uniq;
    for (int x = 0; x < n; ++x) {
      Permutation sx = q.right_translation(x);
      for (int y = 0; y < n; ++y) uniq.insert(compose(sx, q.right_translation(y)));
    }
    gens.assign(uniq.begin(), uniq.end());
  }
  r.flat = true;
  for (std::size_t i = 0; i < gens.size() && r.flat; ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      if (!(compose(gens[i], gens[j]) == compose(gens[j], gens[i]))) {
        r.flat = false;
        break;
      }
  r.connected = is_connected(q);
  return r;
}

// Cheap relabeling invariant used to bucket quandles before isomorphism
// search: per-element data (orbit size, translation cycle type, row profile),
// sorted so labels do not matter.
inline std::string iso_fingerprint(const FiniteQuandle& q) {
  int n = q.size();
  std::vector<int> orbit(n, -1);
  int norb = 0;
  for (int s = 0; s < n; ++s) {
    if (orbit[s] >= 0) continue;
    std::vector<int> stack{s};
    orbit[s] = norb;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int y = 0; y < n; ++y)
        for (int w : {q.op(v, y), q.ldiv(v, y)})
          if (orbit[w] < 0) {
            orbit[w] = norb;
            stack.push_back(w);
          }
    }
    ++norb;
  }
  std::vector<int> orbit_size(norb, 0);
  for (int v = 0; v < n; ++v) ++orbit_size[orbit[v]];
  std::vector<std::string> keys(n);
  for (int x = 0; x < n; ++x) {
    std::ostringstream os;
    os << orbit_size[orbit[x]] << '|';
    for (int len : q.right_translation(x).cycle_type()) os << len << ',';
    os << '|';
    std::vector<char> seen(n, 0);
    int distinct = 0;
    for (int j = 0; j < n; ++j) {
      int v = q.op(x, j);
      if (!seen[v]) {
        seen[v] = 1;
        ++distinct;
      }
    }
    os << distinct;
    keys[x] = os.str();
  }
  std::sort(keys.begin(), keys.end());
  std::ostringstream os;
  os << n << ';';
  for (const auto& k : keys) os << k << ';';
  return os.str();
}

namespace detail {

// Backtracking isomorphism search.  Images are forced through the table as
// soon as both arguments are mapped, which keeps the tree tiny in practice.
inline bool iso_search(const FiniteQuandle& a, const FiniteQuandle& b, std::vector<int>& img,
                       std::vector<int>& used, int depth) {
  int n = a.size();
  if (depth == n) return true;
  if (img[depth] >= 0) return iso_search(a, b, img, used, depth + 1);
  std::vector<int> ta = a.right_translation(depth).cycle_type();
  for (int cand = 0; cand < n; ++cand) {
    if (used[cand]) continue;
    if (b.right_translation(cand).cycle_type() != ta) continue;
    std::vector<std::pair<int, int>> trail;
    auto assign = [&](int from, int to) {
      if (img[from] >= 0) return img[from] == to;
      if (used[to]) return false;
      img[from] = to;
      used[to] = 1;
      trail.emplace_back(from, to);
      return true;
    };
    bool ok = assign(depth, cand);
    // Propagate img through products until a fixpoint or a clash.
    for (std::size_t t = 0; ok && t < trail.size(); ++t) {
      int x = trail[t].first;
      for (int y = 0; ok && y < n; ++y) {
        if (img[y] < 0) continue;
        ok = assign(a.op(x, y), b.op(img[x], img[y])) &&
             assign(a.op(y, x), b.op(img[y], img[x]));
      }
    }
    if (ok && iso_search(a, b, img, used, depth + 1)) return true;
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
      img[it->first] = -1;
      used[it->second] = 0;
    }
  }
  return false;
}

}  // namespace detail

inline std::optional<Permutation> find_isomorphism(const FiniteQuandle& a,
                                                   const FiniteQuandle& b) {
  if (a.size() != b.size()) return std::nullopt;
  if (iso_fingerprint(a) != iso_fingerprint(b)) return std::nullopt;
  std::vector<int> img(a.size(), -1), used(a.size(), 0);
  if (!detail::iso_search(a, b, img, used, 0)) return std::nullopt;
  return Permutation(img);
}

inline bool are_isomorphic(const FiniteQuandle& a, const FiniteQuandle& b) {
  return find_isomorphism(a, b).has_value();
}

// Lexicographically least table over all relabelings.  Only sensible for
// small orders; callers above the cutoff should bucket by fingerprint and
// compare pairwise instead.
inline std::vector<int> canonical_table(const FiniteQuandle& q) {
  int n = q.size();
  if (n > 8) throw std::invalid_argument("canonical_table supports order <= 8");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best;
  std::vector<int> cur(n * n), inv(n);
  do {
    for (int i = 0; i < n; ++i) inv[perm[i]] = i;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cur[i * n + j] = inv[q.op(perm[i], perm[j])];
    if (best.empty() || cur < best) best = cur;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace knotderiv
