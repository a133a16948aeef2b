#include <algorithm>

#include <catch2/catch_amalgamated.hpp>

#include "knotderiv/knotderiv.hpp"
#include "oracles.hpp"
#include "testdata.hpp"

using namespace knotderiv;

namespace {

VirtualQuandle vq(FiniteQuandle X, const std::string& cycles) {
  int n = X.size();
  return make_virtual(std::move(X), Permutation::from_cycles(cycles, n));
}

VirtualQuandle plain(FiniteQuandle X) {
  int n = X.size();
  return make_virtual(std::move(X), Permutation::identity(n));
}

}  // namespace

TEST_CASE("virtual quandles insist on a structure automorphism") {
  CHECK_NOTHROW(vq(dihedral(3), "(1,2,3)"));
  CHECK_NOTHROW(vq(dihedral(5), "(2,5)(3,4)"));
  CHECK_THROWS_AS(make_virtual(dihedral(3), Permutation::identity(4)), std::invalid_argument);
  try {
    vq(testdata::reflection3(), "(1,2,3)");
    FAIL("expected not_automorphism_error");
  } catch (const not_automorphism_error& e) {
    CHECK(e.x == 1);
    CHECK(e.y == 2);
  }
  CHECK_NOTHROW(vq(testdata::reflection3(), "(1,3)"));
}

TEST_CASE("conjugation transport of the structure map") {
  auto ctx = conj_aut_context(dihedral(3));
  Permutation beta = Permutation::from_cycles("(1,2,3)", 3);
  Permutation cmap = conj_index_map(*ctx, beta);
  CHECK(cmap.degree() == 6);
  CHECK(cmap(0) == 0);  // identity is fixed under conjugation
  for (int i = 0; i < cmap.degree(); ++i) {
    Permutation expect = compose(beta, compose(ctx->aut_element(i), beta.inverse()));
    CHECK(ctx->aut_element(cmap(i)) == expect);
  }
  CHECK(cmap.order() == 3);
}

TEST_CASE("virtual diagrams parse and print") {
  VirtualDiagram vtref = builtin_virtual("virtual_trefoil");
  CHECK(vtref.crossings.size() == 2);
  CHECK(vtref.virtuals.size() == 1);
  CHECK(vtref.edge_count == 6);
  CHECK(vtref.components == 1);
  CHECK(parse_virtual(vtref.pd()).pd() == vtref.pd());

  auto pres = virtual_arcs_and_relations(vtref);
  CHECK(pres.arc_count == 4);
  CHECK(pres.relations.size() == 2);
  CHECK(pres.twists.size() == 2);
  int powers = 0;
  for (const auto& t : pres.twists) powers += t.power;
  CHECK(powers == 0);  // one forward pass, one inverse pass

  CHECK_THROWS_AS(parse_virtual(""), parse_error);
  CHECK(parse_virtual("", {.allow_empty = true}).unknot);
  auto names = builtin_virtual_names();
  CHECK(std::find(names.begin(), names.end(), "virtual_trefoil") != names.end());
  CHECK(std::find(names.begin(), names.end(), "3_1") != names.end());
  CHECK(builtin_virtual("4_1").virtuals.empty());
}

TEST_CASE("virtual trefoil colorings depend on the structure map") {
  VirtualDiagram vtref = builtin_virtual("virtual_trefoil");
  CHECK(enumerate_virtual_homs_diagram(vtref, plain(dihedral(3))).size() == 3);
  CHECK(enumerate_virtual_homs_diagram(vtref, vq(dihedral(3), "(1,2)")).size() == 3);
  CHECK(enumerate_virtual_homs_diagram(vtref, vq(dihedral(3), "(1,2,3)")).empty());
}

TEST_CASE("virtual derivation polynomials of the virtual trefoil") {
  VirtualDiagram vtref = builtin_virtual("virtual_trefoil");
  auto poly = [&](const VirtualQuandle& X) {
    return derivation_polynomial(survey_virtual_derivations(vtref, X)).str();
  };
  CHECK(poly(vq(dihedral(3), "(1,2)")) == "3 + 4u + u^2");
  CHECK(poly(vq(dihedral(3), "(1,2,3)")) == "2u");
  CHECK(poly(vq(dihedral(5), "(1,2,3,4,5)")) == "4u");
  CHECK(poly(vq(dihedral(5), "(2,5)(3,4)")) == "5 + 8u + 3u^2");
}

TEST_CASE("identity structure maps reduce to the classical pipeline") {
  for (const auto& name : builtin_names())
    for (const FiniteQuandle& X : {dihedral(3), testdata::abelian4()}) {
      KnotDiagram dia = builtin(name);
      auto classical = survey_derivations(dia, X);
      auto reduced = survey_virtual_derivations(as_virtual(dia), plain(X));
      REQUIRE(oracle::values_of(reduced.actions) == oracle::values_of(classical.actions));
      CHECK(reduced.ders == classical.ders);
      CHECK(derivation_polynomial(reduced) == derivation_polynomial(classical));
    }
  auto vhoms = enumerate_virtual_homs_finite(plain(dihedral(3)), plain(dihedral(3)));
  CHECK(vhoms == enumerate_homs_finite(dihedral(3), dihedral(3)));
}

TEST_CASE("virtual surveys match the brute-force reference") {
  VirtualDiagram vtref = builtin_virtual("virtual_trefoil");
  auto pres = virtual_arcs_and_relations(vtref);
  auto x4beta = automorphism_group(testdata::abelian4()).elements[1];
  for (const VirtualQuandle& X :
       {vq(dihedral(3), "(1,2)"), vq(dihedral(3), "(1,2,3)"), vq(dihedral(5), "(2,5)(3,4)"),
        vq(testdata::reflection3(), "(1,3)"), make_virtual(testdata::abelian4(), x4beta)}) {
    auto auts = oracle::all_automorphisms(X.quandle);
    if (!oracle::power_fits(static_cast<long long>(auts.size()), pres.arc_count, 2'000'000))
      continue;
    auto edge_homs = oracle::virtual_homs_by_edges(vtref, X);
    CHECK(oracle::collapse_to_arcs(edge_homs, pres.arc_of_edge, pres.arc_count) ==
          enumerate_virtual_homs_diagram(pres, X));

    auto survey = survey_virtual_derivations(pres, X);
    auto brute_actions = oracle::virtual_actions_diagram(pres, auts, X.alpha);
    REQUIRE(oracle::values_of(survey.actions) == brute_actions);
    for (std::size_t i = 0; i < brute_actions.size(); ++i)
      CHECK(survey.ders[i] ==
            oracle::virtual_derivations_diagram(pres, X.quandle, auts, X.alpha, brute_actions[i]));
  }
}

TEST_CASE("finite virtual source over itself") {
  VirtualQuandle q = vq(dihedral(3), "(1,2,3)");
  CHECK(enumerate_virtual_homs_finite(q, q).size() == 3);
  auto actions = enumerate_virtual_actions_finite(q, q);
  CHECK(actions.size() == 6);
  CHECK(actions.front().trivial);

  auto auts = oracle::all_automorphisms(q.quandle);
  CHECK(oracle::virtual_homs_finite(q, q) == enumerate_virtual_homs_finite(q, q));
  CHECK(oracle::virtual_actions_finite(q, auts, q.alpha) == oracle::values_of(actions));

  auto survey = survey_virtual_derivations_finite(q, q);
  CHECK(survey.homs() == enumerate_virtual_homs_finite(q, q));
  for (std::size_t i = 0; i < survey.actions.size(); ++i) {
    CHECK(survey.ders[i] ==
          oracle::virtual_derivations_finite(q, q, auts, survey.actions[i].values));
    if (survey.ders[i].empty()) continue;
    Permutation gamma = gamma_map(survey.ders[i], q, q);
    CHECK(gamma.degree() == static_cast<int>(survey.ders[i].size()));
  }
}

TEST_CASE("the slide move preserves every virtual invariant") {
  VirtualDiagram vtref = builtin_virtual("virtual_trefoil");
  for (const VirtualQuandle& X : {vq(dihedral(3), "(1,2)"), vq(dihedral(3), "(1,2,3)")}) {
    auto base = survey_virtual_derivations(vtref, X);
    auto base_poly = derivation_polynomial(base);
    for (auto [e1, e2] : {std::pair{1, 3}, {2, 5}, {4, 6}, {6, 1}}) {
      VirtualDiagram moved = vr2_add(vtref, e1, e2);
      CHECK(moved.virtuals.size() == vtref.virtuals.size() + 2);
      CHECK(moved.edge_count == vtref.edge_count + 4);
      auto shifted = survey_virtual_derivations(moved, X);
      INFO("slide across edges " << e1 << "," << e2);
      CHECK(shifted.homs().size() == base.homs().size());
      CHECK(derivation_polynomial(shifted) == base_poly);
      CHECK(total_derivation_size(shifted) == total_derivation_size(base));
    }
  }
}

TEST_CASE("slid unknots keep the round diagram's polynomial") {
  VirtualDiagram round = as_virtual(builtin("unknot"));
  for (const VirtualQuandle& X : {vq(dihedral(3), "(1,2,3)"), vq(dihedral(5), "(1,2,3,4,5)")}) {
    auto base_poly = derivation_polynomial(survey_virtual_derivations(round, X));
    CHECK(base_poly ==
          derivation_polynomial(survey_derivations(builtin("unknot"), X.quandle)));
    VirtualDiagram once = vr2_add(round, 1, 1);
    CHECK(once.virtuals.size() == 2);
    CHECK(derivation_polynomial(survey_virtual_derivations(once, X)) == base_poly);
    VirtualDiagram twice = vr2_add(once, 1, 3);
    CHECK(twice.virtuals.size() == 4);
    CHECK(derivation_polynomial(survey_virtual_derivations(twice, X)) == base_poly);
    VirtualDiagram again = vr2_add(twice, 2, 7);
    CHECK(derivation_polynomial(survey_virtual_derivations(again, X)) == base_poly);
  }
}

TEST_CASE("the slide move validates its edges") {
  VirtualDiagram vtref = builtin_virtual("virtual_trefoil");
  CHECK_THROWS_AS(vr2_add(vtref, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(vr2_add(vtref, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(vr2_add(vtref, 1, 7), std::invalid_argument);
}
