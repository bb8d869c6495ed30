#include "doctest.h"
#include "support.hpp"
#include "tierplan/compile.hpp"

using namespace tierplan;
using namespace support;

namespace {

pddl::SchemaDomain example_schema(const std::string& tier) {
  const auto path = data_dir() / "nonrunning" / (tier + ".pddl");
  return pddl::parse_domain(read_text(path), path.string());
}

const std::vector<pddl::TypedName> kCells{{"c0", "cell"}, {"c1", "cell"}, {"c2", "cell"}};
const std::vector<GroundAtom> kAdj{
    {"adj", {"c2", "c1"}}, {"adj", {"c1", "c2"}}, {"adj", {"c1", "c0"}}, {"adj", {"c0", "c1"}}};

std::vector<std::string> names(const FondDomain& d) {
  std::vector<std::string> out;
  for (const auto& op : d.operators()) out.push_back(op.name);
  return out;
}

// Random schema over untyped objects: predicates q0..q3 of arity 0-2.
pddl::SchemaDomain random_schema(Rng& rng) {
  pddl::SchemaDomain d;
  d.name = "rnd";
  std::vector<std::size_t> arity;
  for (std::size_t i = 0; i < 4; ++i) {
    arity.push_back(rng.below(3));
    pddl::PredicateDecl p{"q" + std::to_string(i), {}};
    for (std::size_t k = 0; k < arity.back(); ++k) p.params.push_back({"?x" + std::to_string(k), "object"});
    d.predicates.push_back(p);
  }
  const auto nactions = rng.below(4);
  for (std::size_t a = 0; a < nactions; ++a) {
    pddl::SchemaAction act;
    act.name = "a" + std::to_string(a);
    const auto nparams = rng.below(3);
    for (std::size_t k = 0; k < nparams; ++k) act.params.push_back({"?v" + std::to_string(k), "object"});
    auto atom = [&]() {
      const auto p = rng.below(4);
      pddl::SchemaAtom out{"q" + std::to_string(p), {}};
      for (std::size_t k = 0; k < arity[p]; ++k)
        out.args.push_back(nparams ? act.params[rng.below(nparams)].name : "k0");
      return out;
    };
    using K = pddl::SchemaFormula::Kind;
    const auto nconds = rng.below(3);
    if (nconds > 0) {
      act.precondition.kind = K::And;
      for (std::size_t c = 0; c < nconds; ++c) {
        pddl::SchemaFormula lit{K::Atom, atom(), {}};
        if (rng.coin()) lit = pddl::SchemaFormula{K::Not, {}, {lit}};
        act.precondition.children.push_back(lit);
      }
    }
    const auto nbranches = rng.between(1, 3);
    for (std::size_t b = 0; b < nbranches; ++b) {
      std::vector<pddl::SchemaLiteral> branch;
      const auto nlits = rng.between(1, 3);
      for (std::size_t l = 0; l < nlits; ++l) branch.push_back({atom(), rng.coin()});
      act.branches.push_back(branch);
    }
    d.actions.push_back(act);
  }
  d.constants.push_back({"k0", "object"});
  return d;
}

}  // namespace

TEST_CASE("parse the example domains") {
  const auto d3 = example_schema("d3");
  REQUIRE(d3.actions.size() == 2);
  CHECK(d3.actions[0].name == "walk");
  CHECK(d3.actions[1].name == "run");
  CHECK(d3.actions[0].branches.size() == 1);

  const auto d1 = example_schema("d1");
  CHECK(d1.find_action("walk")->branches.size() == 3);
  CHECK(d1.find_action("run")->branches.size() == 3);
  CHECK(d1.fluent_predicates() == std::set<std::string>{"at", "broken", "scratch"});
}

TEST_CASE("parse domain without define wrapper or actions") {
  const auto d = pddl::parse_domain("(domain empty) (:predicates (p))");
  CHECK(d.name == "empty");
  CHECK(d.actions.empty());
  const auto bare = pddl::parse_domain("(define (domain e))");
  CHECK(bare.actions.empty());
}

TEST_CASE("syntax errors carry line and column") {
  try {
    pddl::parse_domain("(define (domain x)\n  (:action a :effect (p))\n  )\n)", "x.pddl");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 1);
    CHECK(std::string(e.what()).find("x.pddl:4:1") != std::string::npos);
  }
  CHECK_THROWS_AS(pddl::parse_domain("(define (domain x)"), ParseError);
}

TEST_CASE("unsupported constructs are named") {
  auto construct_of = [](const std::string& text) {
    try {
      pddl::parse_domain(text);
    } catch (const UnsupportedConstruct& e) {
      return e.construct();
    }
    return std::string("<none>");
  };
  CHECK(construct_of("(define (domain x) (:action a :parameters () :effect (when (p) (q))))") == "conditional effect (when)");
  CHECK(construct_of("(define (domain x) (:functions (fuel)))") == "numeric fluents (:functions)");
  CHECK(construct_of("(define (domain x) (:action a :parameters () :effect (increase (fuel) 1)))") == "increase");
  CHECK(construct_of("(define (domain x) (:action a :parameters () :effect (oneof (p) (oneof (q) (r)))))") ==
        "nested oneof");
}

TEST_CASE("ground walk over the cell line") {
  const auto d3 = example_schema("d3");
  const auto g = pddl::ground(d3, kCells, kAdj);
  CHECK(names(g) == std::vector<std::string>{"run", "walk_c0_c1", "walk_c1_c0", "walk_c1_c2", "walk_c2_c1"});
  // Oracle: every binding (o, d) with adj(o, d) in the static facts.
  std::set<std::string> expected{"run"};
  for (const auto& o : kCells)
    for (const auto& d : kCells)
      if (std::find(kAdj.begin(), kAdj.end(), GroundAtom{"adj", {o.name, d.name}}) != kAdj.end())
        expected.insert("walk_" + o.name + "_" + d.name);
  const auto got = names(g);
  CHECK(std::set<std::string>(got.begin(), got.end()) == expected);
  // Static atoms are compiled away.
  CHECK_FALSE(g.vocab().find("(adj c2 c1)").has_value());
  for (const auto& op : g.operators()) {
    std::set<AtomId> atoms;
    op.precondition.collect_atoms(atoms);
    for (auto a : atoms) CHECK(g.vocab().atom(a).predicate != "adj");
  }
}

TEST_CASE("ground with zero objects of a required type") {
  const auto none = pddl::ground(pddl::parse_domain("(define (domain x) (:types t) (:predicates (p ?x - t))"
                                                   " (:action a :parameters (?x - t) :effect (p ?x)))"),
                                 {}, {});
  CHECK(none.operators().empty());
}

TEST_CASE("grounding errors") {
  const auto d3 = example_schema("d3");
  CHECK_THROWS_AS(pddl::ground(d3, {{"c0", "room"}}, {}), Error);
  CHECK_THROWS_AS(pddl::ground(d3, kCells, {{"adj", {"c9", "c1"}}}), Error);
  // run names c2, which is then not an object
  CHECK_THROWS_AS(pddl::ground(d3, {{"c0", "cell"}}, {}), Error);
}

TEST_CASE("print compiled fair operator in the shape of the fair-operator example") {
  const auto lp = load_example();
  const auto cp = compile(lp.problem);
  const auto text = pddl::print_domain(cp.domain(), pddl::PrintMode::Conditional);
  const auto at = text.find("(:action walk_c2_c1_d2");
  REQUIRE(at != std::string::npos);
  const auto block = text.substr(at, text.find("(:action", at + 1) - at);
  CHECK(block.find(":precondition (and (at c2) (not (broken)) (lvl-d2) (act) (not (u-run)) (not (u-walk)) "
                   "(not (end)))") != std::string::npos);
  CHECK(block.find("(oneof\n        (and (at c1) (not (at c2)))\n        (and (at c1) (not (at c2)) (scratch))"
                   "\n        (u-walk))") != std::string::npos);
}

TEST_CASE("print compiled unfair operator with when clauses") {
  const auto lp = load_example();
  const auto cp = compile(lp.problem);
  const auto text = pddl::print_domain(cp.domain(), pddl::PrintMode::Conditional);
  const auto at = text.find("(:action walk_c2_c1_unfair");
  REQUIRE(at != std::string::npos);
  const auto block = text.substr(at, text.find("(:action", at + 1) - at);
  CHECK(block.find("(when (not (scratch)) (and (at c1) (not (at c2)) (scratch) (eps-d2)))") != std::string::npos);
  CHECK(block.find("(when (scratch) (and (at c1) (not (at c2)) (scratch) (eps-d3)))") != std::string::npos);
  CHECK(block.find("(eps-d1)") != std::string::npos);
  CHECK_THROWS_AS(pddl::print_domain(cp.domain(), pddl::PrintMode::Oneof), Error);
}

TEST_CASE("print empty domain is header only") {
  const FondDomain empty(std::make_shared<const Vocabulary>(), {});
  const auto text = pddl::print_domain(empty);
  CHECK(text.find(":action") == std::string::npos);
  CHECK(text.rfind("(define (domain domain)", 0) == 0);
  CHECK(pddl::parse_domain(text).actions.empty());
}

TEST_CASE("property: schema parse after print is the identity") {
  for (const auto* tier : {"d1", "d2", "d3"}) {
    const auto d = example_schema(tier);
    CHECK(pddl::parse_domain(pddl::print_schema(d)) == d);
  }
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto d = random_schema(rng);
    const auto text = pddl::print_schema(d);
    INFO(text);
    CHECK(pddl::parse_domain(text) == d);
  }
}

TEST_CASE("property: ground domains re-parse to structurally equal domains") {
  pddl::GroundOptions opts;
  opts.compile_statics = false;
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    const auto vocab = props(rng.between(1, 6));
    const auto d = random_domain(rng, vocab, rng.between(0, 4), 3);
    const auto text = pddl::print_domain(d);
    INFO(text);
    const auto back = pddl::ground(pddl::parse_domain(text), {}, {}, opts);
    CHECK(structurally_equal(d, back));
  }
  const auto lp = load_example();
  for (const auto& t : lp.problem.tiers) {
    const auto back = pddl::ground(pddl::parse_domain(pddl::print_domain(t.domain)), {}, {}, opts);
    CHECK(structurally_equal(t.domain, back));
  }
}

TEST_CASE("property: grounding is deterministic and order independent") {
  const auto d1 = example_schema("d1");
  const auto a = pddl::ground(d1, kCells, kAdj);
  auto cells = kCells;
  auto adj = kAdj;
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(cells.begin(), cells.end(), rng.gen);
    std::shuffle(adj.begin(), adj.end(), rng.gen);
    const auto b = pddl::ground(d1, cells, adj);
    CHECK(structurally_equal(a, b));
    CHECK(pddl::print_domain(a) == pddl::print_domain(b));
  }
  auto sorted = names(a);
  std::sort(sorted.begin(), sorted.end());
  CHECK(names(a) == sorted);
}

TEST_CASE("property: no effect literal touches a static atom") {
  const auto lp = load_example();
  for (const auto& t : lp.problem.tiers)
    for (const auto& op : t.domain.operators())
      for (const auto& b : op.branches)
        for (const auto& l : b.literals) CHECK(t.domain.vocab().atom(l.atom).predicate != "adj");
}

TEST_CASE("parse ground conditions") {
  const auto lp = load_example();
  const auto& v = *lp.problem.vocab;
  const auto f = pddl::parse_condition("(and (at c0) (not (scratch)))", v);
  CHECK(f.holds(make_state(v, {"(at c0)"})));
  CHECK_FALSE(f.holds(make_state(v, {"(at c0)", "(scratch)"})));
  CHECK_THROWS_AS(pddl::parse_condition("(at c7)", v), Error);
}
