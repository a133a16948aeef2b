#pragma once

#include <array>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotderiv/config.hpp"

namespace knotderiv {

class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// One PD tuple (a, b, c, d): edge labels counterclockwise around the
// crossing, starting at the incoming under-edge a.  After parsing, the
// orientation of the over-strand is resolved into over_in/over_out and the
// usual sign (+1 when the over strand runs d -> b).
struct Crossing {
  int a = 0, b = 0, c = 0, d = 0;
  int sign = 0;
  int over_in = 0, over_out = 0;
};

struct KnotDiagram {
  std::vector<Crossing> crossings;
  int edge_count = 0;
  bool unknot = false;  // zero-crossing round diagram
  int components = 1;

  std::string pd() const {
    if (unknot) return "";
    std::string out;
    for (const auto& c : crossings) {
      if (!out.empty()) out += ' ';
      out += "X(" + std::to_string(c.a) + "," + std::to_string(c.b) + "," + std::to_string(c.c) +
             "," + std::to_string(c.d) + ")";
    }
    return out;
  }
};

struct PdParseOptions {
  bool allow_empty = false;          // empty text means the round unknot
  std::optional<int> assume_sign;    // fallback for degenerate orientation cases
};

namespace detail {

struct RawCrossing {
  std::array<int, 4> e;  // a, b, c, d
  bool virtual_crossing = false;
};

inline std::vector<RawCrossing> tokenize_pd(const std::string& text, bool accept_virtual) {
  std::vector<RawCrossing> out;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() &&
           (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ';')) ++i;
  };
  skip_ws();
  while (i < text.size()) {
    char kind = text[i];
    if (kind != 'X' && kind != 'x' && !(accept_virtual && (kind == 'V' || kind == 'v')))
      throw parse_error(std::string("expected crossing tuple, found '") + kind + "'");
    ++i;
    skip_ws();
    if (i >= text.size() || (text[i] != '(' && text[i] != '['))
      throw parse_error("expected '(' after crossing letter");
    char close = text[i] == '(' ? ')' : ']';
    ++i;
    RawCrossing rc;
    rc.virtual_crossing = (kind == 'V' || kind == 'v');
    for (int k = 0; k < 4; ++k) {
      skip_ws();
      if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
        throw parse_error("crossing tuple needs four positive edge labels");
      int v = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
        v = v * 10 + (text[i++] - '0');
      rc.e[k] = v;
      skip_ws();
      if (k < 3) {
        if (i >= text.size() || text[i] != ',')
          throw parse_error("crossing tuple needs four comma-separated labels");
        ++i;
      }
    }
    skip_ws();
    if (i >= text.size() || text[i] != close)
      throw parse_error("crossing tuple needs exactly four labels");
    ++i;
    out.push_back(rc);
    skip_ws();
  }
  return out;
}

// Occurrence roles: every edge label shows up exactly twice across all
// tuples, once leaving a crossing and once arriving at the next one.  The a
// and c slots are in/out by definition; b/d slots are linked in pairs.  That
// seeds a propagation which resolves the over-strand direction of nearly
// every diagram; the label-successor test covers what is left.
struct RoleResolution {
  // role[crossing][slot]: -1 unknown, 0 in, 1 out
  std::vector<std::array<int, 4>> role;
};

inline RoleResolution resolve_roles(const std::vector<RawCrossing>& raw, int edge_count,
                                    const std::optional<int>& assume_sign) {
  int m = static_cast<int>(raw.size());
  std::vector<std::vector<std::pair<int, int>>> occurrences(edge_count + 1);
  for (int ci = 0; ci < m; ++ci)
    for (int k = 0; k < 4; ++k) {
      int label = raw[ci].e[k];
      if (label < 1 || label > edge_count)
        throw parse_error("edge label " + std::to_string(label) + " outside 1.." +
                          std::to_string(edge_count));
      occurrences[label].emplace_back(ci, k);
    }
  for (int label = 1; label <= edge_count; ++label)
    if (occurrences[label].size() != 2)
      throw parse_error("edge label " + std::to_string(label) + " appears " +
                        std::to_string(occurrences[label].size()) + " times, expected 2");

  RoleResolution rr;
  rr.role.assign(m, {-1, -1, -1, -1});
  std::vector<std::pair<int, int>> work;
  auto set_role = [&](int ci, int slot, int r, auto&& set_role_ref) -> void {
    if (rr.role[ci][slot] == r) return;
    if (rr.role[ci][slot] != -1)
      throw parse_error("inconsistent strand orientation at crossing " + std::to_string(ci + 1));
    rr.role[ci][slot] = r;
    work.emplace_back(ci, slot);
    // The two occurrences of a label take opposite roles.
    int label = raw[ci].e[slot];
    for (auto [cj, sj] : occurrences[label])
      if (cj != ci || sj != slot) set_role_ref(cj, sj, 1 - r, set_role_ref);
    // Within a crossing, slots 1 and 3 carry the second strand (in/out pair).
    if (slot == 1) set_role_ref(ci, 3, 1 - r, set_role_ref);
    if (slot == 3) set_role_ref(ci, 1, 1 - r, set_role_ref);
  };
  for (int ci = 0; ci < m; ++ci) {
    set_role(ci, 0, 0, set_role);
    set_role(ci, 2, 1, set_role);
  }
  for (int ci = 0; ci < m; ++ci) {
    if (rr.role[ci][1] != -1) continue;
    int b = raw[ci].e[1], d = raw[ci].e[3];
    auto succ = [&](int x) { return x % edge_count + 1; };
    bool positive = (b == succ(d));  // over strand d -> b
    bool negative = (d == succ(b));
    if (positive == negative) {
      if (!assume_sign)
        throw parse_error("cannot orient the over strand at crossing " + std::to_string(ci + 1) +
                          "; pass an assumed sign for degenerate diagrams");
      positive = (*assume_sign > 0);
    }
    set_role(ci, 1, positive ? 1 : 0, set_role);
  }
  return rr;
}

inline int count_components(const std::vector<Crossing>& crossings, int edge_count) {
  if (edge_count == 0) return 1;
  std::vector<int> next(edge_count + 1, 0);
  for (const auto& c : crossings) {
    next[c.a] = c.c;
    next[c.over_in] = c.over_out;
  }
  std::vector<char> seen(edge_count + 1, 0);
  int comps = 0;
  for (int e = 1; e <= edge_count; ++e) {
    if (seen[e]) continue;
    ++comps;
    for (int f = e; !seen[f]; f = next[f]) seen[f] = 1;
  }
  return comps;
}

inline KnotDiagram diagram_from_tuples(const std::vector<std::array<int, 4>>& tuples,
                                       const std::optional<int>& assume_sign = std::nullopt) {
  std::vector<RawCrossing> raw;
  raw.reserve(tuples.size());
  for (const auto& t : tuples) raw.push_back({t, false});
  int edge_count = 2 * static_cast<int>(raw.size());
  auto rr = resolve_roles(raw, edge_count, assume_sign);
  KnotDiagram dia;
  dia.edge_count = edge_count;
  for (int ci = 0; ci < static_cast<int>(raw.size()); ++ci) {
    Crossing c;
    c.a = raw[ci].e[0];
    c.b = raw[ci].e[1];
    c.c = raw[ci].e[2];
    c.d = raw[ci].e[3];
    bool b_is_out = rr.role[ci][1] == 1;
    c.sign = b_is_out ? +1 : -1;
    c.over_in = b_is_out ? c.d : c.b;
    c.over_out = b_is_out ? c.b : c.d;
    dia.crossings.push_back(c);
  }
  dia.components = count_components(dia.crossings, edge_count);
  return dia;
}

}  // namespace detail

inline KnotDiagram parse_pd(const std::string& text, const PdParseOptions& opts = {}) {
  auto raw = detail::tokenize_pd(text, /*accept_virtual=*/false);
  if (raw.empty()) {
    if (!opts.allow_empty) throw parse_error("empty planar diagram (pass the unknot flag for the round diagram)");
    KnotDiagram dia;
    dia.unknot = true;
    return dia;
  }
  std::vector<std::array<int, 4>> tuples;
  for (const auto& r : raw) tuples.push_back(r.e);
  return detail::diagram_from_tuples(tuples, opts.assume_sign);
}

// Gauss code "O1- U2- O3- U1- O2- U3-": edge t enters visit t, so both strands
// at a crossing have consecutive in/out labels and the written sign fixes the
// over-strand slot order.
inline KnotDiagram parse_gauss(const std::string& text) {
  struct Visit {
    bool over;
    int id;
    int sign;
  };
  std::vector<Visit> visits;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok.size() < 3) throw parse_error("bad Gauss token '" + tok + "'");
    char kind = std::toupper(static_cast<unsigned char>(tok[0]));
    if (kind != 'O' && kind != 'U') throw parse_error("Gauss token must start with O or U: " + tok);
    char sc = tok.back();
    if (sc != '+' && sc != '-') throw parse_error("Gauss token must end with + or -: " + tok);
    int id = 0;
    for (std::size_t k = 1; k + 1 < tok.size(); ++k) {
      if (!std::isdigit(static_cast<unsigned char>(tok[k])))
        throw parse_error("bad crossing number in Gauss token: " + tok);
      id = id * 10 + (tok[k] - '0');
    }
    if (id < 1) throw parse_error("Gauss crossing numbers start at 1: " + tok);
    visits.push_back({kind == 'O', id, sc == '+' ? +1 : -1});
  }
  if (visits.empty()) throw parse_error("empty Gauss code");
  int n = static_cast<int>(visits.size()) / 2;
  if (static_cast<int>(visits.size()) != 2 * n)
    throw parse_error("Gauss code must have an even number of tokens");
  std::vector<int> over_at(n + 1, 0), under_at(n + 1, 0), sign_of(n + 1, 0);
  for (int t = 0; t < 2 * n; ++t) {
    const auto& v = visits[t];
    if (v.id > n)
      throw parse_error("Gauss crossing " + std::to_string(v.id) + " out of range 1.." +
                        std::to_string(n));
    int& slot = v.over ? over_at[v.id] : under_at[v.id];
    if (slot != 0)
      throw parse_error("Gauss crossing " + std::to_string(v.id) + " visited twice as " +
                        (v.over ? "over" : "under"));
    slot = t + 1;
    if (sign_of[v.id] == 0)
      sign_of[v.id] = v.sign;
    else if (sign_of[v.id] != v.sign)
      throw parse_error("Gauss crossing " + std::to_string(v.id) + " has conflicting signs");
  }
  int edges = 2 * n;
  auto succ = [&](int t) { return t % edges + 1; };
  std::vector<std::array<int, 4>> tuples;
  for (int id = 1; id <= n; ++id) {
    if (!over_at[id] || !under_at[id])
      throw parse_error("Gauss crossing " + std::to_string(id) + " needs one O and one U visit");
    int u = under_at[id], o = over_at[id];
    if (sign_of[id] > 0)
      tuples.push_back({u, succ(o), succ(u), o});
    else
      tuples.push_back({u, o, succ(u), succ(o)});
  }
  return detail::diagram_from_tuples(tuples);
}

inline std::string serialize_pd(const KnotDiagram& dia) { return dia.pd(); }

// Arc presentation: arcs are edges merged through over-strand passages, one
// relation per crossing.  With z the under-out arc, x the under-in arc and y
// the over arc, a positive crossing reads z = x * y and a negative one
// x = z * y.
struct Relation {
  int z = 0, x = 0, y = 0;
  int sign = 0;
};

struct ArcPresentation {
  int arc_count = 0;
  std::vector<int> arc_of_edge;  // index by label-1
  std::vector<Relation> relations;

  std::uint64_t content_hash() const {
    std::uint64_t h = fnv1a(kFnvSeed, static_cast<std::uint64_t>(arc_count));
    for (const auto& r : relations) {
      h = fnv1a(h, r.z);
      h = fnv1a(h, r.x);
      h = fnv1a(h, r.y);
      h = fnv1a(h, static_cast<std::uint64_t>(r.sign + 2));
    }
    return h;
  }
};

namespace detail {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

inline ArcPresentation arcs_and_relations(const KnotDiagram& dia) {
  ArcPresentation pres;
  if (dia.unknot || dia.edge_count == 0) {
    pres.arc_count = 1;
    return pres;
  }
  detail::Dsu dsu(dia.edge_count);
  for (const auto& c : dia.crossings) dsu.unite(c.over_in - 1, c.over_out - 1);
  std::map<int, int> arc_id;  // class representative -> arc index, ordered by least label
  for (int e = 0; e < dia.edge_count; ++e) arc_id.emplace(dsu.find(e), 0);
  int next = 0;
  for (auto& [rep, id] : arc_id) id = next++;
  pres.arc_count = next;
  pres.arc_of_edge.resize(dia.edge_count);
  for (int e = 0; e < dia.edge_count; ++e) pres.arc_of_edge[e] = arc_id[dsu.find(e)];
  for (const auto& c : dia.crossings)
    pres.relations.push_back({pres.arc_of_edge[c.c - 1], pres.arc_of_edge[c.a - 1],
                              pres.arc_of_edge[c.over_in - 1], c.sign});
  return pres;
}

inline KnotDiagram builtin(const std::string& name) {
  if (name == "unknot") {
    KnotDiagram dia;
    dia.unknot = true;
    return dia;
  }
  static const std::map<std::string, std::string> table = {
      {"3_1", "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)"},
      {"4_1", "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)"},
      {"5_1", "X(1,6,2,7) X(3,8,4,9) X(5,10,6,1) X(7,2,8,3) X(9,4,10,5)"},
      {"5_2", "X(1,4,2,5) X(3,8,4,9) X(5,10,6,1) X(9,6,10,7) X(7,2,8,3)"},
  };
  auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown builtin knot '" + name + "'");
  return parse_pd(it->second);
}

inline std::vector<std::string> builtin_names() { return {"unknot", "3_1", "4_1", "5_1", "5_2"}; }

namespace detail {

// Occurrence-aware relabeling for move insertions: the out-occurrence of a
// split edge keeps the (shifted) label, the in-occurrence at its destination
// becomes the last label of the split.
struct EdgeRemap {
  std::vector<int> split_edges;  // original labels being split, each into 3
  int shift(int label) const {
    int s = label;
    for (int e : split_edges)
      if (e < label) s += 2;
    return s;
  }
  int out_label(int label) const { return shift(label); }
  int in_label(int label) const {
    for (int e : split_edges)
      if (e == label) return shift(label) + 2;
    return shift(label);
  }
};

inline std::vector<std::array<int, 4>> remap_crossings(const KnotDiagram& dia,
                                                       const EdgeRemap& rm) {
  std::vector<std::array<int, 4>> tuples;
  for (const auto& c : dia.crossings) {
    std::array<int, 4> t{c.a, c.b, c.c, c.d};
    std::array<int, 4> roles{};  // 0 in, 1 out
    roles[0] = 0;
    roles[2] = 1;
    bool b_is_out = c.sign > 0;
    roles[1] = b_is_out ? 1 : 0;
    roles[3] = b_is_out ? 0 : 1;
    for (int k = 0; k < 4; ++k) t[k] = roles[k] == 0 ? rm.in_label(t[k]) : rm.out_label(t[k]);
    tuples.push_back(t);
  }
  return tuples;
}

}  // namespace detail

// Inserts a kink on the given edge.  kink_sign picks the chirality of the new
// crossing; either way the loop arc merges with the outgoing strand, so
// colorings transfer one-to-one.
inline KnotDiagram r1_add(const KnotDiagram& dia, int edge, int kink_sign) {
  if (kink_sign != 1 && kink_sign != -1) throw std::invalid_argument("kink sign must be +1 or -1");
  if (dia.unknot) {
    return detail::diagram_from_tuples({kink_sign > 0 ? std::array<int, 4>{1, 1, 2, 2}
                                                      : std::array<int, 4>{1, 2, 2, 1}});
  }
  if (edge < 1 || edge > dia.edge_count) throw std::invalid_argument("edge out of range");
  detail::EdgeRemap rm{{edge}};
  auto tuples = detail::remap_crossings(dia, rm);
  int e = rm.shift(edge);
  if (kink_sign > 0)
    tuples.push_back({e, e + 2, e + 1, e + 1});
  else
    tuples.push_back({e, e + 1, e + 1, e + 2});
  return detail::diagram_from_tuples(tuples);
}

// Slides over_edge across under_edge, adding a cancelling pair of crossings
// with opposite signs.
inline KnotDiagram r2_add(const KnotDiagram& dia, int over_edge, int under_edge) {
  if (dia.unknot) {
    return detail::diagram_from_tuples({{1, 1, 2, 4}, {2, 3, 3, 4}});
  }
  if (over_edge == under_edge) throw std::invalid_argument("r2 needs two distinct edges");
  for (int e : {over_edge, under_edge})
    if (e < 1 || e > dia.edge_count) throw std::invalid_argument("edge out of range");
  detail::EdgeRemap rm{{over_edge, under_edge}};
  auto tuples = detail::remap_crossings(dia, rm);
  int p = rm.shift(over_edge);
  int u = rm.shift(under_edge);
  tuples.push_back({u, p + 1, u + 1, p});
  tuples.push_back({u + 1, p + 1, u + 2, p + 2});
  return detail::diagram_from_tuples(tuples);
}

}  // namespace knotderiv
