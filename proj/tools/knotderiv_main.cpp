#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "knotderiv/knotderiv.hpp"

namespace kd = knotderiv;
using nlohmann::json;

namespace {

void emit(const kd::RunConfig& cfg, const std::string& text, const json& j) {
  if (cfg.output == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << "\n";
  }
}

std::vector<int> one_based(const std::vector<int>& zero_based) {
  std::vector<int> out(zero_based.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = zero_based[i] + 1;
  return out;
}

std::vector<int> one_based(const kd::Permutation& g) {
  std::vector<int> out(g.degree());
  for (int i = 0; i < g.degree(); ++i) out[i] = g(i) + 1;
  return out;
}

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(xs[i]);
  }
  return out;
}

kd::Permutation parse_perm(const std::string& text, int degree) {
  if (text.empty() || text == "id" || text == "()") return kd::Permutation::identity(degree);
  return kd::Permutation::from_cycles(text, degree);
}

struct KnotArgs {
  std::string knot, pd, gauss;
  bool unknot = false;
  int assume_sign = 0;
  bool allow_links = false;
};

void add_knot_options(CLI::App* sub, KnotArgs& k, bool with_gauss = true) {
  auto* g = sub->add_option_group("diagram", "diagram input (pick one)");
  g->add_option("--knot", k.knot, "built-in diagram name");
  g->add_option("--pd", k.pd, "PD code, inline or a file path");
  if (with_gauss) g->add_option("--gauss", k.gauss, "signed Gauss code, inline or a file path");
  g->add_flag("--unknot", k.unknot, "round zero-crossing diagram");
  g->require_option(1);
  sub->add_option("--assume-sign", k.assume_sign, "crossing sign for degenerate kinks")
      ->check(CLI::IsMember({-1, 1}));
  sub->add_flag("--allow-links", k.allow_links, "accept multi-component diagrams");
}

kd::PdParseOptions pd_options(const KnotArgs& k) {
  kd::PdParseOptions opts;
  if (k.assume_sign != 0) opts.assume_sign = k.assume_sign;
  return opts;
}

kd::KnotDiagram resolve_knot(const KnotArgs& k) {
  kd::KnotDiagram dia;
  if (k.unknot) {
    dia.unknot = true;
  } else if (!k.knot.empty()) {
    dia = kd::builtin(k.knot);
  } else if (!k.pd.empty()) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(k.pd, ec) &&
        std::filesystem::path(k.pd).extension() == ".json")
      dia = kd::diagram_from_json(json::parse(kd::read_text_file(k.pd)), pd_options(k));
    else
      dia = kd::parse_pd(kd::text_or_file(k.pd), pd_options(k));
  } else {
    dia = kd::parse_gauss(kd::text_or_file(k.gauss));
  }
  if (dia.components > 1 && !k.allow_links)
    throw std::invalid_argument("diagram has " + std::to_string(dia.components) +
                                " components; pass --allow-links to color links");
  return dia;
}

struct VirtualArgs {
  std::string vpd, knot;
  bool unknot = false;
  int assume_sign = 0;
  bool allow_links = false;
  std::string beta;
};

void add_virtual_options(CLI::App* sub, VirtualArgs& v) {
  auto* g = sub->add_option_group("diagram", "diagram input (pick one)");
  g->add_option("--vpd", v.vpd, "PD code with X/V tuples, inline or a file path");
  g->add_option("--knot", v.knot, "built-in diagram name");
  g->add_flag("--unknot", v.unknot, "round zero-crossing diagram");
  g->require_option(1);
  sub->add_option("--assume-sign", v.assume_sign, "crossing sign for degenerate kinks")
      ->check(CLI::IsMember({-1, 1}));
  sub->add_flag("--allow-links", v.allow_links, "accept multi-component diagrams");
  sub->add_option("--beta", v.beta, "structure map of the target, cycle notation (default id)");
}

kd::VirtualDiagram resolve_virtual(const VirtualArgs& v) {
  kd::VirtualDiagram dia;
  if (v.unknot) {
    dia.unknot = true;
  } else if (!v.knot.empty()) {
    dia = kd::builtin_virtual(v.knot);
  } else {
    kd::PdParseOptions opts;
    if (v.assume_sign != 0) opts.assume_sign = v.assume_sign;
    dia = kd::parse_virtual(kd::text_or_file(v.vpd), opts);
  }
  if (dia.components > 1 && !v.allow_links)
    throw std::invalid_argument("diagram has " + std::to_string(dia.components) +
                                " components; pass --allow-links to color links");
  return dia;
}

kd::ActionColoring resolve_action(const std::string& spec, const kd::ArcPresentation& pres,
                                  const kd::ConjAutContext& ctx, const kd::RunConfig& cfg) {
  if (spec == "const:id")
    return kd::constant_action(ctx, kd::Permutation::identity(ctx.target.size()), pres.arc_count);
  if (spec.rfind("const:cycles=", 0) == 0)
    return kd::constant_action(
        ctx, kd::Permutation::from_cycles(spec.substr(13), ctx.target.size()), pres.arc_count);
  if (spec.rfind("index:", 0) == 0) {
    int k = std::stoi(spec.substr(6));
    auto actions = kd::enumerate_actions(pres, ctx, cfg);
    if (k < 0 || k >= static_cast<int>(actions.size()))
      throw std::invalid_argument("action index " + std::to_string(k) + " out of range 0.." +
                                  std::to_string(actions.size() - 1));
    return actions[k];
  }
  throw std::invalid_argument("unknown action spec '" + spec +
                              "'; use const:id, const:cycles=(..), or index:<k>");
}

json poly_json(const kd::DerivationPolynomial& poly) {
  json coeffs = json::object();
  for (const auto& [exp, coeff] : poly.coeffs) coeffs[std::to_string(exp)] = coeff;
  return {{"coeffs", coeffs}};
}

int do_validate(const std::string& spec, const kd::RunConfig& cfg) {
  try {
    kd::FiniteQuandle q = kd::resolve_quandle_spec(spec, cfg);
    emit(cfg, "valid: order " + std::to_string(q.size()),
         {{"valid", true}, {"n", q.size()}});
    return 0;
  } catch (const kd::quandle_error& e) {
    emit(cfg, std::string("invalid: ") + e.what(),
         {{"valid", false},
          {"axiom", std::string(1, e.violation.axiom)},
          {"witness", e.violation.witness},
          {"message", e.violation.message}});
    return 1;
  }
}

int do_props(const std::string& spec, const kd::RunConfig& cfg) {
  kd::FiniteQuandle q = kd::resolve_quandle_spec(spec, cfg);
  auto r = kd::check_properties(q);
  auto b = [](bool v) { return v ? "true" : "false"; };
  std::ostringstream text;
  text << "abelian=" << b(r.abelian) << " commutative=" << b(r.commutative)
       << " involutary=" << b(r.involutary) << " flat=" << b(r.flat)
       << " trivial=" << b(r.trivial) << " connected=" << b(r.connected);
  emit(cfg, text.str(),
       {{"abelian", r.abelian},
        {"commutative", r.commutative},
        {"involutary", r.involutary},
        {"flat", r.flat},
        {"trivial", r.trivial},
        {"connected", r.connected}});
  return 0;
}

int do_aut(const std::string& spec, const kd::RunConfig& cfg) {
  kd::FiniteQuandle q = kd::resolve_quandle_spec(spec, cfg);
  auto aut = kd::automorphism_group(q, cfg);
  auto inn = kd::inner_subgroup(q);
  std::ostringstream text;
  text << "order " << aut.order() << "\n";
  text << "inner order " << inn.order() << "\n";
  text << "generators";
  json gens = json::array();
  for (const auto& g : aut.generators) {
    text << ' ' << g.cycles();
    gens.push_back(one_based(g));
  }
  emit(cfg, text.str(),
       {{"order", aut.order()}, {"inner_order", inn.order()}, {"generators", gens}});
  return 0;
}

int do_iso(const std::string& spec, const std::string& other, const kd::RunConfig& cfg) {
  kd::FiniteQuandle a = kd::resolve_quandle_spec(spec, cfg);
  kd::FiniteQuandle b = kd::resolve_quandle_spec(other, cfg);
  auto iso = kd::find_isomorphism(a, b);
  if (iso) {
    emit(cfg, "isomorphic " + iso->cycles(),
         {{"isomorphic", true}, {"mapping", one_based(*iso)}});
    return 0;
  }
  emit(cfg, "not isomorphic", {{"isomorphic", false}});
  return 1;
}

int do_color(const KnotArgs& k, const std::string& qspec, bool list, const kd::RunConfig& cfg) {
  kd::KnotDiagram dia = resolve_knot(k);
  kd::FiniteQuandle X = kd::resolve_quandle_spec(qspec, cfg);
  auto homs = kd::enumerate_homs_diagram(dia, X, cfg);
  json j{{"count", homs.size()}};
  std::ostringstream text;
  text << homs.size() << "\n";
  if (list) {
    json cols = json::array();
    for (const auto& h : homs) {
      auto row = one_based(h);
      text << join_ints(row) << "\n";
      cols.push_back(row);
    }
    j["colorings"] = cols;
  }
  emit(cfg, text.str(), j);
  return 0;
}

int do_virtual_color(const VirtualArgs& v, const std::string& qspec, bool list,
                     const kd::RunConfig& cfg) {
  kd::VirtualDiagram dia = resolve_virtual(v);
  kd::FiniteQuandle X = kd::resolve_quandle_spec(qspec, cfg);
  kd::VirtualQuandle target = kd::make_virtual(X, parse_perm(v.beta, X.size()));
  auto homs = kd::enumerate_virtual_homs_diagram(dia, target, cfg);
  json j{{"count", homs.size()}};
  std::ostringstream text;
  text << homs.size() << "\n";
  if (list) {
    json cols = json::array();
    for (const auto& h : homs) {
      auto row = one_based(h);
      text << join_ints(row) << "\n";
      cols.push_back(row);
    }
    j["colorings"] = cols;
  }
  emit(cfg, text.str(), j);
  return 0;
}

int do_derive_poly(const KnotArgs& k, const std::string& qspec, const kd::RunConfig& cfg) {
  kd::KnotDiagram dia = resolve_knot(k);
  kd::FiniteQuandle X = kd::resolve_quandle_spec(qspec, cfg);
  auto poly = kd::derivation_polynomial(kd::survey_derivations(dia, X, cfg));
  emit(cfg, poly.str(), poly_json(poly));
  return 0;
}

int do_virtual_derive_poly(const VirtualArgs& v, const std::string& qspec,
                           const kd::RunConfig& cfg) {
  kd::VirtualDiagram dia = resolve_virtual(v);
  kd::FiniteQuandle X = kd::resolve_quandle_spec(qspec, cfg);
  kd::VirtualQuandle target = kd::make_virtual(X, parse_perm(v.beta, X.size()));
  auto poly = kd::derivation_polynomial(kd::survey_virtual_derivations(dia, target, cfg));
  emit(cfg, poly.str(), poly_json(poly));
  return 0;
}

int do_derive_quandle(const KnotArgs& k, const std::string& qspec, const std::string& action_spec,
                      const kd::RunConfig& cfg) {
  kd::KnotDiagram dia = resolve_knot(k);
  auto pres = kd::arcs_and_relations(dia);
  kd::FiniteQuandle X = kd::resolve_quandle_spec(qspec, cfg);
  auto ctx = kd::conj_aut_context(X, cfg);
  auto phi = resolve_action(action_spec, pres, *ctx, cfg);
  auto ders = kd::enumerate_derivations_diagram(pres, *ctx, phi, cfg);
  if (ders.empty()) {
    emit(cfg, "empty derivation set", {{"n", 0}});
    return 0;
  }
  auto dq = kd::derivation_quandle(ders, X);
  emit(cfg, kd::qm_text(dq.quandle), kd::quandle_to_json(dq.quandle));
  return 0;
}

int do_derive_total(const KnotArgs& k, const std::string& qspec, const std::string& out_path,
                    bool with_table, const kd::RunConfig& cfg) {
  kd::KnotDiagram dia = resolve_knot(k);
  kd::FiniteQuandle X = kd::resolve_quandle_spec(qspec, cfg);
  auto survey = kd::survey_derivations(dia, X, cfg);
  auto total = kd::total_derivation_quandle(survey);
  std::ostringstream text;
  text << "size " << total.quandle.size() << "\n";
  text << "blocks";
  json blocks = json::array();
  for (std::size_t i = 0; i < total.block_size.size(); ++i) {
    text << ' ' << total.block_action[i] << ':' << total.block_size[i];
    blocks.push_back({{"action", total.block_action[i]}, {"size", total.block_size[i]}});
  }
  json j{{"size", total.quandle.size()}, {"blocks", blocks}};
  if (with_table) j["table"] = total.quandle.rows();
  if (!out_path.empty()) kd::write_quandle_file(out_path, total.quandle);
  emit(cfg, text.str(), j);
  return 0;
}

int do_derive_multiset(const KnotArgs& k, const std::string& qspec, const kd::RunConfig& cfg) {
  kd::KnotDiagram dia = resolve_knot(k);
  kd::FiniteQuandle X = kd::resolve_quandle_spec(qspec, cfg);
  auto survey = kd::survey_derivations(dia, X, cfg);
  auto multiset = kd::derivation_multiset(survey);
  auto classes = kd::multiset_classes(multiset);
  std::ostringstream text;
  text << "empty " << multiset.empty_count << "\n";
  json jclasses = json::array();
  for (const auto& cls : classes) {
    text << "class count=" << cls.count << " order=" << cls.representative.size() << "\n";
    for (const auto& row : cls.representative.rows()) text << join_ints(row) << "\n";
    jclasses.push_back({{"count", cls.count},
                        {"n", cls.representative.size()},
                        {"table", cls.representative.rows()}});
  }
  emit(cfg, text.str(), {{"empty", multiset.empty_count}, {"classes", jclasses}});
  return 0;
}

struct FixtureOutcome {
  std::string knot, quandle;
  std::vector<std::string> failures;
};

int do_fixtures(const std::string& file, const kd::RunConfig& cfg) {
  json rows = json::parse(kd::read_text_file(file));
  if (!rows.is_array()) throw kd::io_error(file + ": fixture file must be a JSON array");
  std::filesystem::path base = std::filesystem::path(file).parent_path();
  std::vector<FixtureOutcome> outcomes;
  for (const auto& row : rows) {
    FixtureOutcome oc;
    oc.knot = row.at("knot").get<std::string>();
    oc.quandle = row.at("quandle").get<std::string>();
    kd::KnotDiagram dia = kd::builtin(oc.knot);
    kd::FiniteQuandle X;
    try {
      X = kd::resolve_quandle_spec(oc.quandle, cfg);
    } catch (const kd::io_error&) {
      X = kd::load_quandle_file((base / oc.quandle).string());
    }
    auto survey = kd::survey_derivations(dia, X, cfg);
    auto fail = [&](const std::string& what, const std::string& got, const std::string& want) {
      oc.failures.push_back(what + " got " + got + " want " + want);
    };
    if (row.contains("hom")) {
      long long want = row.at("hom").get<long long>();
      long long got = static_cast<long long>(survey.homs().size());
      if (got != want) fail("hom", std::to_string(got), std::to_string(want));
    }
    if (row.contains("conj_hom")) {
      long long want = row.at("conj_hom").get<long long>();
      long long got = static_cast<long long>(survey.actions.size());
      if (got != want) fail("conj_hom", std::to_string(got), std::to_string(want));
    }
    if (row.contains("poly")) {
      auto want = kd::parse_polynomial(row.at("poly").get<std::string>());
      auto got = kd::derivation_polynomial(survey);
      if (!(got == want)) fail("poly", got.str(), want.str());
    }
    if (row.contains("total_size")) {
      long long want = row.at("total_size").get<long long>();
      long long got = kd::total_derivation_size(survey);
      if (got != want) fail("total_size", std::to_string(got), std::to_string(want));
    }
    outcomes.push_back(std::move(oc));
  }
  std::ostringstream text;
  json jrows = json::array();
  int passed = 0;
  for (const auto& oc : outcomes) {
    bool ok = oc.failures.empty();
    passed += ok;
    if (ok) {
      text << "PASS " << oc.knot << " " << oc.quandle << "\n";
    } else {
      text << "FAIL " << oc.knot << " " << oc.quandle;
      for (const auto& f : oc.failures) text << ": " << f;
      text << "\n";
    }
    jrows.push_back({{"knot", oc.knot},
                     {"quandle", oc.quandle},
                     {"pass", ok},
                     {"failures", oc.failures}});
  }
  text << "passed " << passed << "/" << outcomes.size();
  bool all = passed == static_cast<int>(outcomes.size());
  emit(cfg, text.str(), {{"pass", all}, {"rows", jrows}});
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knot invariants from quandle derivations"};
  app.require_subcommand(1);
  app.fallthrough();

  kd::RunConfig cfg;
  app.add_option("--parallelism", cfg.parallelism, "worker threads (0 = hardware)")
      ->envname("KNOTDERIV_PARALLELISM");
  app.add_option("--node-budget", cfg.node_budget, "max backtracking nodes per search task")
      ->envname("KNOTDERIV_NODE_BUDGET");
  app.add_option_function<std::string>(
         "--cache-dir",
         [&cfg](const std::string& dir) {
           if (!dir.empty()) cfg.cache_dir = dir;
         },
         "directory for memoized automorphism groups")
      ->envname("KNOTDERIV_CACHE_DIR");
  app.add_option("--output", cfg.output, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->envname("KNOTDERIV_OUTPUT");

  int rc = 0;

  auto* quandle = app.add_subcommand("quandle", "inspect finite quandles");
  quandle->require_subcommand(1);
  quandle->fallthrough();
  std::string q_spec, q_other;
  {
    auto* validate = quandle->add_subcommand("validate", "check the quandle axioms");
    validate->fallthrough();
    validate->add_option("--quandle", q_spec, "quandle spec or file")->required();
    validate->callback([&] { rc = do_validate(q_spec, cfg); });

    auto* props = quandle->add_subcommand("props", "structural properties");
    props->fallthrough();
    props->add_option("--quandle", q_spec, "quandle spec or file")->required();
    props->callback([&] { rc = do_props(q_spec, cfg); });

    auto* aut = quandle->add_subcommand("aut", "automorphism group");
    aut->fallthrough();
    aut->add_option("--quandle", q_spec, "quandle spec or file")->required();
    aut->callback([&] { rc = do_aut(q_spec, cfg); });

    auto* iso = quandle->add_subcommand("iso", "isomorphism test");
    iso->fallthrough();
    iso->add_option("--quandle", q_spec, "first quandle")->required();
    iso->add_option("--other", q_other, "second quandle")->required();
    iso->callback([&] { rc = do_iso(q_spec, q_other, cfg); });
  }

  auto* color = app.add_subcommand("color", "count or list diagram colorings");
  color->fallthrough();
  KnotArgs color_knot;
  std::string color_quandle;
  bool color_list = false, color_count = false;
  add_knot_options(color, color_knot);
  color->add_option("--quandle", color_quandle, "target quandle spec")->required();
  color->add_flag("--count", color_count, "print the count only (default)");
  color->add_flag("--list", color_list, "list every coloring");
  color->callback([&] { rc = do_color(color_knot, color_quandle, color_list, cfg); });

  auto* derive = app.add_subcommand("derive", "derivation invariants");
  derive->require_subcommand(1);
  derive->fallthrough();
  {
    auto* poly = derive->add_subcommand("poly", "derivation polynomial");
    poly->fallthrough();
    static KnotArgs knot;
    static std::string qspec;
    add_knot_options(poly, knot);
    poly->add_option("--quandle", qspec, "target quandle spec")->required();
    poly->callback([&] { rc = do_derive_poly(knot, qspec, cfg); });
  }
  {
    auto* dq = derive->add_subcommand("quandle", "derivation quandle of one action");
    dq->fallthrough();
    static KnotArgs knot;
    static std::string qspec, action;
    add_knot_options(dq, knot);
    dq->add_option("--quandle", qspec, "target quandle spec")->required();
    dq->add_option("--action", action, "const:id | const:cycles=(..) | index:<k>")->required();
    dq->callback([&] { rc = do_derive_quandle(knot, qspec, action, cfg); });
  }
  {
    auto* total = derive->add_subcommand("total", "total derivation quandle");
    total->fallthrough();
    static KnotArgs knot;
    static std::string qspec, out_path;
    static bool with_table = false;
    add_knot_options(total, knot);
    total->add_option("--quandle", qspec, "target quandle spec")->required();
    total->add_option("--out", out_path, "write the operation table to this file");
    total->add_flag("--table", with_table, "include the table in JSON output");
    total->callback([&] { rc = do_derive_total(knot, qspec, out_path, with_table, cfg); });
  }
  {
    auto* ms = derive->add_subcommand("multiset", "derivation quandles up to isomorphism");
    ms->fallthrough();
    static KnotArgs knot;
    static std::string qspec;
    add_knot_options(ms, knot);
    ms->add_option("--quandle", qspec, "target quandle spec")->required();
    ms->callback([&] { rc = do_derive_multiset(knot, qspec, cfg); });
  }

  auto* virt = app.add_subcommand("virtual", "virtual-diagram analogues");
  virt->require_subcommand(1);
  virt->fallthrough();
  {
    auto* vcolor = virt->add_subcommand("color", "count or list virtual colorings");
    vcolor->fallthrough();
    static VirtualArgs vargs;
    static std::string qspec;
    static bool list = false, count = false;
    add_virtual_options(vcolor, vargs);
    vcolor->add_option("--quandle", qspec, "target quandle spec")->required();
    vcolor->add_flag("--count", count, "print the count only (default)");
    vcolor->add_flag("--list", list, "list every coloring");
    vcolor->callback([&] { rc = do_virtual_color(vargs, qspec, list, cfg); });

    auto* vderive = virt->add_subcommand("derive", "virtual derivation invariants");
    vderive->require_subcommand(1);
    vderive->fallthrough();
    auto* vpoly = vderive->add_subcommand("poly", "virtual derivation polynomial");
    vpoly->fallthrough();
    static VirtualArgs pargs;
    static std::string pquandle;
    add_virtual_options(vpoly, pargs);
    vpoly->add_option("--quandle", pquandle, "target quandle spec")->required();
    vpoly->callback([&] { rc = do_virtual_derive_poly(pargs, pquandle, cfg); });
  }

  auto* fixtures = app.add_subcommand("fixtures", "regression table");
  fixtures->require_subcommand(1);
  fixtures->fallthrough();
  std::string fixture_file = "fixtures/regression.json";
  auto* frun = fixtures->add_subcommand("run", "run every fixture row");
  frun->fallthrough();
  frun->add_option("--file", fixture_file, "fixture table (JSON)");
  frun->callback([&] { rc = do_fixtures(fixture_file, cfg); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const kd::budget_exceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const kd::quandle_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const kd::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const kd::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
