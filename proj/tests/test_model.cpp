#include "doctest.h"
#include "support.hpp"

using namespace tierplan;
using namespace support;

namespace {

const FondDomain& tier(const LoadedProblem& lp, const std::string& id) {
  return lp.problem.tiers[lp.problem.tier_at(id)].domain;
}

Json mutated_manifest(const std::function<void(Json&)>& edit) {
  auto m = bundle_manifest(data_dir() / "nonrunning" / "manifest.json");
  edit(m);
  return m;
}

}  // namespace

TEST_CASE("successor states on the example") {
  const auto lp = load_example();
  const auto& p = lp.problem;
  CHECK(successor_states(tier(lp, "d3"), st(p, {"(at c1)"}), "walk_c1_c0") ==
        std::vector<State>{st(p, {"(at c0)"})});
  const auto run = successor_states(tier(lp, "d1"), st(p, {"(at c2)"}), "run");
  const std::set<State> expected{st(p, {"(at c0)"}), st(p, {"(at c0)", "(scratch)"}),
                                 st(p, {"(at c2)", "(broken)"})};
  CHECK(std::set<State>(run.begin(), run.end()) == expected);
  CHECK(run.size() == 3);
}

TEST_CASE("successor states errors") {
  const auto lp = load_example();
  const auto& p = lp.problem;
  try {
    successor_states(tier(lp, "d2"), st(p, {"(at c1)", "(broken)"}), "walk_c1_c0");
    FAIL("expected a precondition violation");
  } catch (const PreconditionViolated& e) {
    CHECK(e.op() == "walk_c1_c0");
    CHECK(e.conjunct() == "(not (broken))");
  }
  CHECK_THROWS_AS(successor_states(tier(lp, "d2"), st(p, {"(at c1)"}), "fly"), UnknownOperator);
}

TEST_CASE("oneof refinement on the chain") {
  const auto lp = load_example();
  CHECK(check_oneof_refinement(tier(lp, "d1"), tier(lp, "d3")));
  CHECK(check_oneof_refinement(tier(lp, "d1"), tier(lp, "d2")));
  CHECK(check_oneof_refinement(tier(lp, "d2"), tier(lp, "d3")));
  CHECK(check_oneof_refinement(tier(lp, "d2"), tier(lp, "d2")));
  const auto r = check_oneof_refinement(tier(lp, "d3"), tier(lp, "d1"));
  REQUIRE_FALSE(r.holds);
  CHECK(r.witnesses.front().op == "run");
  // Both D1-only walk branches are reported, the stay-in-place scratch among them.
  std::set<std::string> walk_branches;
  for (const auto& w : r.witnesses)
    if (w.op == "walk_c2_c1" && w.branch) walk_branches.insert(to_string(w.branch->literals, *lp.problem.vocab));
  CHECK(walk_branches == std::set<std::string>{"(scratch)", "(and (at c1) (not (at c2)) (scratch))"});
}

TEST_CASE("execution refinement on the chain") {
  const auto lp = load_example();
  const auto& p = lp.problem;
  CHECK(check_execution_refinement(tier(lp, "d1"), tier(lp, "d3"), p.initial, 4));
  CHECK(check_execution_refinement(tier(lp, "d2"), tier(lp, "d2"), p.initial, 4));
  const auto r = check_execution_refinement(tier(lp, "d3"), tier(lp, "d1"), p.initial, 1);
  REQUIRE_FALSE(r.holds);
  REQUIRE(r.counterexample);
  // Oracle: the shortest violating executions are one step long and end in a D1-only outcome.
  CHECK(r.counterexample->ops.size() == 1);
  CHECK(r.counterexample->states.front() == p.initial);
  const auto& last = r.counterexample->states.back();
  const auto d3succ = successor_states(tier(lp, "d3"), p.initial, r.counterexample->ops.front());
  CHECK(std::find(d3succ.begin(), d3succ.end(), last) == d3succ.end());
  CHECK(check_execution_refinement(tier(lp, "d1"), tier(lp, "d1"), p.initial, 0));
}

TEST_CASE("validate the example and its mutations") {
  CHECK(validate_mtp(load_example().problem).ok());

  const auto drift = load_manifest(mutated_manifest([](Json& m) {
    auto text = m["tiers"][1]["domain"].get<std::string>();
    const std::string pre = "(and (at ?o) (adj ?o ?d) (not (broken)))";
    text.replace(text.find(pre), pre.size(), "(and (at ?o) (adj ?o ?d))");
    m["tiers"][1]["domain"] = text;
  }));
  const auto r = validate_mtp(drift.problem);
  CHECK(r.has("precondition-drift"));
  bool names_walk = false;
  for (const auto& f : r.findings) names_walk = names_walk || f.message.find("walk") != std::string::npos;
  CHECK(names_walk);

  const auto cyclic = load_manifest(mutated_manifest([](Json& m) { m["order"].push_back({"d3", "d1"}); }));
  CHECK(validate_mtp(cyclic.problem).has("not-partial-order"));

  const auto flat = load_manifest(mutated_manifest([](Json& m) { m["order"] = Json::array({{"d1", "d2"}}); }));
  const auto fr = validate_mtp(flat.problem);
  CHECK(fr.has("no-greatest"));

  const auto inverted = load_manifest(mutated_manifest([](Json& m) {
    m["order"] = Json::array({{"d3", "d2"}, {"d2", "d1"}});
  }));
  CHECK(validate_mtp(inverted.problem).has("refinement-failure"));
}

TEST_CASE("single tier problem validates") {
  const auto one = load_manifest(mutated_manifest([](Json& m) {
    m["tiers"] = Json::array({m["tiers"][2]});
    m["tiers"][0]["goal"] = "(at c0)";
    m["order"] = Json::array();
  }));
  CHECK(validate_mtp(one.problem).ok());
  CHECK(one.problem.top() == 0);
}

TEST_CASE("tier order closure") {
  const TierOrder chain(3, {{0, 1}, {1, 2}});
  CHECK(chain.less(0, 2));
  CHECK(chain.greatest() == 2u);
  CHECK(chain.minimum() == 0u);
  CHECK(chain.strict_pairs().size() == 3);
  CHECK(chain.height(2) == 2);
  const TierOrder diamond(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  CHECK_FALSE(diamond.comparable(1, 2));
  CHECK(diamond.greatest() == 3u);
  CHECK(diamond.strict_pairs().size() == 5);
  const TierOrder vee(3, {{0, 2}, {1, 2}});
  CHECK_FALSE(vee.minimum().has_value());
}

TEST_CASE("property: refinement keeps successor sets nested") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_mtp(rng, rng.between(2, 5), rng.between(2, 3), rng.between(1, 4));
    REQUIRE(validate_mtp(p).ok());
    for (const auto& s : all_states(p.vocab->size()))
      for (std::size_t lo = 0; lo < p.tiers.size(); ++lo)
        for (std::size_t hi = 0; hi < p.tiers.size(); ++hi) {
          if (!p.order.leq(lo, hi)) continue;
          for (const auto& op : p.tiers[hi].domain.operators()) {
            if (!op.applicable(s)) continue;
            const auto high = successor_states(p.tiers[hi].domain, s, op.name);
            const auto low = successor_states(p.tiers[lo].domain, s, op.name);
            CHECK(std::includes(low.begin(), low.end(), high.begin(), high.end()));
            CHECK(high.size() <= op.branches.size());
            const auto brute = brute_successors(op, s, p.vocab->size());
            CHECK(std::set<State>(high.begin(), high.end()) == brute);
          }
        }
  }
}

TEST_CASE("property: oneof refinement implies bounded execution refinement") {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const auto vocab = props(rng.between(2, 4));
    const auto lower = random_domain(rng, vocab, rng.between(1, 3), 3);
    const auto higher = random_refinement(rng, lower);
    REQUIRE(check_oneof_refinement(lower, higher));
    for (const auto& s : all_states(vocab->size()))
      for (std::size_t k = 0; k <= 4; ++k) CHECK(check_execution_refinement(lower, higher, s, k));
  }
}
