#include <catch2/catch_amalgamated.hpp>

#include "knotderiv/knotderiv.hpp"

using namespace knotderiv;

TEST_CASE("planar diagram parsing resolves signs and over strands") {
  KnotDiagram tref = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)");
  REQUIRE(tref.crossings.size() == 3);
  CHECK(tref.edge_count == 6);
  CHECK(tref.components == 1);
  for (const auto& c : tref.crossings) {
    CHECK(c.sign == -1);  // left-handed trefoil
    CHECK(c.over_in == c.b);
    CHECK(c.over_out == c.d);
  }
  CHECK(tref.pd() == "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)");
  // bracket syntax and separators are interchangeable
  CHECK(parse_pd("x[1,4,2,5]; x[3,6,4,1]; x[5,2,6,3]").pd() == tref.pd());
}

TEST_CASE("builtin diagrams have the expected shape") {
  struct Row {
    const char* name;
    int crossings, arcs, writhe;
  };
  for (const Row& row : {Row{"3_1", 3, 3, -3}, Row{"4_1", 4, 4, 0}, Row{"5_1", 5, 5, -5},
                         Row{"5_2", 5, 5, -5}}) {
    KnotDiagram dia = builtin(row.name);
    CHECK(static_cast<int>(dia.crossings.size()) == row.crossings);
    CHECK(dia.edge_count == 2 * row.crossings);
    CHECK(dia.components == 1);
    int w = 0;
    for (const auto& c : dia.crossings) w += c.sign;
    CHECK(w == row.writhe);
    auto pres = arcs_and_relations(dia);
    CHECK(pres.arc_count == row.arcs);
    CHECK(pres.relations.size() == dia.crossings.size());
  }
  KnotDiagram unknot = builtin("unknot");
  CHECK(unknot.unknot);
  CHECK(arcs_and_relations(unknot).arc_count == 1);
  CHECK(arcs_and_relations(unknot).relations.empty());
  CHECK_THROWS_AS(builtin("6_1"), std::invalid_argument);
  CHECK(builtin_names().size() == 5);
}

TEST_CASE("arc relations follow the under strand") {
  KnotDiagram dia = builtin("3_1");
  auto pres = arcs_and_relations(dia);
  for (const auto& r : pres.relations) {
    CHECK(r.sign == -1);
    CHECK(r.z >= 0);
    CHECK(r.x < pres.arc_count);
    CHECK(r.y < pres.arc_count);
  }
  // edges along one arc share ids; both endpoints of an over pass agree
  for (const auto& c : dia.crossings)
    CHECK(pres.arc_of_edge[c.over_in - 1] == pres.arc_of_edge[c.over_out - 1]);
}

TEST_CASE("parse errors identify the offending token") {
  CHECK_THROWS_AS(parse_pd(""), parse_error);
  CHECK(parse_pd("", {.allow_empty = true}).unknot);
  CHECK_THROWS_AS(parse_pd("Y(1,2,3,4)"), parse_error);
  CHECK_THROWS_AS(parse_pd("X(1,2,3)"), parse_error);
  CHECK_THROWS_AS(parse_pd("X(1,2,3,4,5)"), parse_error);
  CHECK_THROWS_AS(parse_pd("X(1,4,2,5)"), parse_error);            // labels out of range
  CHECK_THROWS_AS(parse_pd("X(1,2,1,2) X(1,2,1,2)"), parse_error); // labels used four times
  CHECK_THROWS_AS(parse_pd("V(1,2,3,4)"), parse_error);            // virtual tuples rejected here
}

TEST_CASE("kinks orient themselves through role propagation") {
  // The under strand's labels reappear on the over pair, which pins the sign
  // without any successor guessing; an assumed sign cannot override it.
  KnotDiagram kink = parse_pd("X(1,2,2,1)");
  CHECK(kink.crossings[0].sign == -1);
  CHECK(parse_pd("X(1,2,2,1)", {.assume_sign = +1}).crossings[0].sign == -1);
  CHECK(parse_pd("X(1,1,2,2)").crossings[0].sign == +1);
  CHECK(arcs_and_relations(kink).arc_count == 1);
}

TEST_CASE("an all-over component needs an assumed sign") {
  // One circle passing over another twice, labeled so the over edges are not
  // consecutive: roles never reach the over pair and both successor tests
  // fail, so the parser must be told the chirality.
  const std::string pd = "X(1,2,3,4) X(3,4,1,2)";
  CHECK_THROWS_AS(parse_pd(pd), parse_error);
  KnotDiagram pos = parse_pd(pd, {.assume_sign = +1});
  CHECK(pos.crossings[0].sign == +1);
  CHECK(pos.crossings[1].sign == +1);
  CHECK(pos.components == 2);
  KnotDiagram neg = parse_pd(pd, {.assume_sign = -1});
  CHECK(neg.crossings[0].sign == -1);
  // either way the under circle crosses the same over arc twice
  CHECK(arcs_and_relations(pos).arc_count == 3);
  CHECK(enumerate_homs_diagram(pos, dihedral(3)).size() == 9);
  CHECK(enumerate_homs_diagram(neg, dihedral(3)).size() == 9);
}

TEST_CASE("multi-component diagrams are counted") {
  KnotDiagram link = parse_pd("X(1,3,2,4) X(3,1,4,2)");
  CHECK(link.components == 2);
  CHECK(builtin("4_1").components == 1);
}

TEST_CASE("signed Gauss codes reproduce planar diagrams") {
  KnotDiagram tref = parse_gauss("O1- U2- O3- U1- O2- U3-");
  REQUIRE(tref.crossings.size() == 3);
  int w = 0;
  for (const auto& c : tref.crossings) w += c.sign;
  CHECK(w == -3);
  // same coloring behaviour as the builtin trefoil
  CHECK(enumerate_homs_diagram(tref, dihedral(3)).size() == 9);
  CHECK(enumerate_homs_diagram(tref, dihedral(5)).size() == 5);

  CHECK_THROWS_AS(parse_gauss(""), parse_error);
  CHECK_THROWS_AS(parse_gauss("O1- U1+"), parse_error);       // conflicting signs
  CHECK_THROWS_AS(parse_gauss("O1- O1- U1- U1-"), parse_error);
  CHECK_THROWS_AS(parse_gauss("Q1- U1-"), parse_error);
  CHECK_THROWS_AS(parse_gauss("O1 U1"), parse_error);
  CHECK_THROWS_AS(parse_gauss("O1- U2-"), parse_error);       // 2 out of range
}

TEST_CASE("kink insertion keeps a valid one-component diagram") {
  KnotDiagram base = builtin("4_1");
  for (int edge = 1; edge <= base.edge_count; ++edge) {
    for (int sign : {+1, -1}) {
      KnotDiagram moved = r1_add(base, edge, sign);
      CHECK(moved.crossings.size() == base.crossings.size() + 1);
      CHECK(moved.edge_count == base.edge_count + 2);
      CHECK(moved.components == 1);
    }
  }
  CHECK_THROWS_AS(r1_add(base, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(r1_add(base, 99, 1), std::invalid_argument);
  CHECK_THROWS_AS(r1_add(base, 1, 2), std::invalid_argument);

  KnotDiagram kinked = r1_add(builtin("unknot"), 1, +1);
  CHECK(kinked.crossings.size() == 1);
  CHECK(arcs_and_relations(kinked).arc_count == 1);
}

TEST_CASE("strand slides add a cancelling pair of crossings") {
  KnotDiagram base = builtin("3_1");
  for (int e = 1; e <= base.edge_count; ++e) {
    int other = e % base.edge_count + 1;
    KnotDiagram moved = r2_add(base, e, other);
    CHECK(moved.crossings.size() == base.crossings.size() + 2);
    CHECK(moved.edge_count == base.edge_count + 4);
    CHECK(moved.components == 1);
    int w_base = 0, w_moved = 0;
    for (const auto& c : base.crossings) w_base += c.sign;
    for (const auto& c : moved.crossings) w_moved += c.sign;
    CHECK(w_base == w_moved);  // the new pair cancels
  }
  CHECK_THROWS_AS(r2_add(base, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(r2_add(base, 0, 1), std::invalid_argument);

  KnotDiagram slid = r2_add(builtin("unknot"), 1, 2);
  CHECK(slid.crossings.size() == 2);
  CHECK(enumerate_homs_diagram(slid, dihedral(5)).size() == 5);
}
