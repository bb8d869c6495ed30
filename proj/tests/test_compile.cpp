#include <deque>

#include "doctest.h"
#include "support.hpp"
#include "tierplan/compile.hpp"
#include "tierplan/explain.hpp"

using namespace tierplan;
using namespace support;

namespace {

const CompiledProblem& example() {
  static const auto lp = load_example();
  static const auto cp = compile(lp.problem);
  return cp;
}

std::vector<State> reachable(const FondProblem& p, std::size_t depth = 1000) {
  std::vector<State> out{p.initial};
  std::set<State> seen{p.initial};
  std::deque<std::pair<State, std::size_t>> q{{p.initial, 0}};
  while (!q.empty()) {
    const auto [s, d] = q.front();
    q.pop_front();
    if (d == depth) continue;
    for (const auto& op : p.domain.operators()) {
      if (!op.applicable(s)) continue;
      for (const auto& t : successors(op, s))
        if (seen.insert(t).second) {
          out.push_back(t);
          q.push_back({t, d + 1});
        }
    }
  }
  return out;
}

std::size_t count_role(const CompiledProblem& cp, Role r) {
  std::size_t n = 0;
  for (const auto& [name, prov] : cp.provenance) n += prov.role == r;
  return n;
}

}  // namespace

TEST_CASE("fair operator for a tier") {
  const auto& cp = example();
  const auto& v = cp.domain().vocab();
  const auto& op = cp.domain().at("walk_c2_c1_d2");
  CHECK(op.precondition.pddl(v) ==
        "(and (at c2) (not (broken)) (lvl-d2) (act) (not (u-run)) (not (u-walk)) (not (end)))");
  REQUIRE(op.branches.size() == 3);
  std::set<std::string> branches;
  for (const auto& b : op.branches) branches.insert(to_string(b.literals, v));
  CHECK(branches == std::set<std::string>{"(and (at c1) (not (at c2)))", "(and (at c1) (not (at c2)) (scratch))",
                                          "(u-walk)"});
  CHECK_FALSE(cp.fairness.is_unfair(op.name));
  CHECK(cp.origin(op.name)->role == Role::FairAct);
  CHECK(cp.origin(op.name)->source == "walk_c2_c1");
  CHECK(cp.origin(op.name)->tier == "d2");
}

TEST_CASE("unfair operator with guarded branches") {
  const auto& cp = example();
  const auto& v = cp.domain().vocab();
  const auto& op = cp.domain().at("walk_c2_c1_unfair");
  CHECK(cp.fairness.is_unfair(op.name));
  CHECK(op.precondition.pddl(v) == "(and (at c2) (not (broken)) (act) (u-walk) (not (end)))");
  REQUIRE(op.branches.size() == 3);
  CHECK(cp.branch_labels.at(op.name) == std::vector<std::string>{"e2", "e3", "e1"});
  std::map<std::string, std::vector<std::string>> whens;
  for (std::size_t k = 0; k < op.branches.size(); ++k) {
    const auto& b = op.branches[k];
    CHECK(to_string(b.literals, v) == "(and (not (act)) (not (u-walk)))");
    for (const auto& w : b.when)
      whens[cp.branch_labels.at(op.name)[k]].push_back(w.condition.pddl(v) + " => " + to_string(w.effect, v));
  }
  CHECK(whens["e3"] == std::vector<std::string>{"(and) => (and (at c1) (not (at c2)) (eps-d3))"});
  CHECK(whens["e2"] == std::vector<std::string>{"(not (scratch)) => (and (at c1) (not (at c2)) (scratch) (eps-d2))",
                                                "(scratch) => (and (at c1) (not (at c2)) (scratch) (eps-d3))"});
  CHECK(whens["e1"] == std::vector<std::string>{"(and) => (and (scratch) (eps-d1))"});
}

TEST_CASE("initial state, goal and auxiliary operators") {
  const auto& cp = example();
  const auto& v = cp.domain().vocab();
  CHECK(to_string(cp.problem.initial, v) == "{(at c2), (lvl-d3), (act)}");
  CHECK(cp.problem.goal.pddl(v) == "(end)");
  CHECK(cp.domain().at("continue_d2").precondition.pddl(v) ==
        "(and (lvl-d2) (not (act)) (not (end)) (or (eps-d2) (eps-d3)))");
  const auto& deg = cp.domain().at("degrade_d3_d1");
  CHECK(deg.precondition.pddl(v) == "(and (lvl-d3) (eps-d1) (not (act)) (not (end)))");
  CHECK(to_string(deg.branches.front().literals, v) ==
        "(and (lvl-d1) (not (lvl-d3)) (not (eps-d1)) (not (eps-d2)) (not (eps-d3)) (act))");
  CHECK(cp.domain().at("checkgoal_d3").precondition.pddl(v) ==
        "(and (at c0) (not (broken)) (not (scratch)) (lvl-d3) (act) (not (u-run)) (not (u-walk)) (not (end)))");
}

TEST_CASE("count laws on the example") {
  const auto lp = load_example();
  const auto& cp = example();
  const auto& p = lp.problem;
  const std::size_t tiers = p.tiers.size();
  const std::size_t ops = p.tiers.front().domain.operators().size();
  const std::size_t schemas = p.tiers.front().domain.schemas().size();
  std::size_t strict = 0;
  for (std::size_t a = 0; a < tiers; ++a)
    for (std::size_t b = 0; b < tiers; ++b) strict += p.order.less(a, b);
  CHECK(cp.bookkeeping().size() == 2 * tiers + schemas + 2);
  CHECK(cp.bookkeeping().size() == 10);
  CHECK(cp.domain().vocab().size() == p.vocab->size() + 10);
  CHECK(count_role(cp, Role::Degrade) == strict);
  CHECK(strict == 3);
  CHECK(count_role(cp, Role::CheckGoal) == tiers);
  CHECK(count_role(cp, Role::Continue) == tiers);
  CHECK(count_role(cp, Role::FairAct) == tiers * ops);
  CHECK(count_role(cp, Role::UnfairAct) == ops);
  CHECK(cp.domain().operators().size() == tiers * ops + ops + tiers + strict + tiers);
}

TEST_CASE("compile rejects invalid problems") {
  auto lp = load_example();
  lp.problem.order = TierOrder(3, {{0, 1}});
  CHECK_THROWS_AS(compile(lp.problem), ValidationFailed);
}

TEST_CASE("simplify_guard") {
  const auto lp = load_example();
  const auto& v = *lp.problem.vocab;
  const auto at_o = Formula::atom(v.at("(at c2)"));
  const auto guard = Formula::conj({Formula::atom(v.at("(at c2)"), false), Formula::atom(v.at("(at c1)"))});
  CHECK(simplify_guard(guard, at_o).is_false());
  CHECK(simplify_guard(Formula::top(), at_o).is_true());
  const auto scratch = Formula::atom(v.at("(scratch)"));
  CHECK(simplify_guard(scratch, at_o) == scratch);
  CHECK(simplify_guard(Formula::negation(scratch), at_o).pddl(v) == "(not (scratch))");
}

TEST_CASE("property: simplified guards are equivalent under their context") {
  Rng rng(41);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = rng.between(1, 5);
    const auto context = Formula::conj(random_literals(rng, n, 0, 3));
    std::vector<Formula> disj;
    for (std::size_t k = rng.between(1, 3); k > 0; --k) disj.push_back(Formula::conj(random_literals(rng, n, 1, 3)));
    const auto guard = Formula::disj(disj);
    const auto simple = simplify_guard(guard, context);
    for (const auto& s : all_states(n))
      if (context.holds(s)) CHECK(simple.holds(s) == guard.holds(s));
  }
}

TEST_CASE("guards are exclusive along the chain") {
  const auto& cp = example();
  const auto base = cp.base_atoms;
  for (const auto& op : cp.domain().operators()) {
    if (!op.conditional()) continue;
    for (const auto& s : all_states(base)) {
      State ext = s;
      ext.insert(cp.act);
      for (const auto& [schema, atom] : cp.u) ext.insert(atom);
      if (!op.applicable(ext)) continue;
      for (const auto& b : op.branches) {
        std::size_t firing = 0;
        for (const auto& w : b.when) firing += w.condition.holds(ext);
        CHECK(firing <= 1);
      }
    }
  }
}

TEST_CASE("reachable compiled states keep one level and an alignment phase") {
  const auto& cp = example();
  for (const auto& s : reachable(cp.problem)) {
    std::size_t levels = 0;
    for (auto a : cp.lvl) levels += s.contains(a);
    CHECK(levels == 1);
    if (s.contains(cp.act) || s.contains(cp.end)) continue;
    bool eps = false;
    for (auto a : cp.eps) eps = eps || s.contains(a);
    for (const auto& op : cp.domain().operators()) {
      if (!op.applicable(s)) continue;
      const auto role = cp.origin(op.name)->role;
      CHECK((role == Role::Continue || role == Role::Degrade));
      CHECK(eps);
    }
  }
}

TEST_CASE("flatten the example") {
  const auto& cp = example();
  const auto flat = flatten(cp);
  CHECK(flat.flattened);
  for (const auto& op : flat.domain().operators()) CHECK_FALSE(op.conditional());
  const auto text = pddl::print_domain(flat.domain());
  CHECK(text.find("when") == std::string::npos);
  const auto* d2 = flat.domain().find("walk_c2_c1_e2_explained_by_d2");
  const auto* d3 = flat.domain().find("walk_c2_c1_e2_explained_by_d3");
  REQUIRE(d2);
  REQUIRE(d3);
  const auto& v = flat.domain().vocab();
  CHECK(d2->precondition.pddl(v) == "(and (at c2) (not (broken)) (not (scratch)) (not (end)) (eff-e2-walk_c2_c1))");
  CHECK(d3->precondition.pddl(v) == "(and (at c2) (not (broken)) (scratch) (not (end)) (eff-e2-walk_c2_c1))");
  CHECK(flat.origin(d2->name)->role == Role::ExplainedBy);
  CHECK_FALSE(flat.fairness.is_unfair(d2->name));
  CHECK(flat.fairness.is_unfair("walk_c2_c1_unfair"));
  const auto& head = flat.domain().at("walk_c2_c1_unfair");
  CHECK(head.branches.size() == 3);
}

TEST_CASE("flatten leaves unconditional problems alone") {
  Rng rng(42);
  CompiledProblem cp;
  cp.problem.domain = random_domain(rng, props(4), 3, 3);
  cp.problem.initial = random_state(rng, 4);
  const auto flat = flatten(cp);
  CHECK(structurally_equal(flat.domain(), cp.domain()));
  CHECK_FALSE(flat.flattened);
}

TEST_CASE("flattened and conditional forms are bisimilar to depth 6") {
  const auto& cp = example();
  const auto flat = flatten(cp);
  const auto& fd = flat.domain();
  // One flattened macro step: a head branch followed by its explained-by step.
  auto macro = [&](const GroundOperator& op, const State& s) {
    std::set<State> out;
    for (const auto& m : successors(op, s)) {
      bool marker = false;
      for (auto a : flat.markers) marker = marker || m.contains(a);
      if (!marker) {
        out.insert(m);
        continue;
      }
      bool any = false;
      for (const auto& e : fd.operators()) {
        if (!e.applicable(m)) continue;
        CHECK(flat.origin(e.name)->role == Role::ExplainedBy);
        any = true;
        for (const auto& t : successors(e, m)) out.insert(t);
      }
      if (!any) {
        State t = m;
        for (auto a : flat.markers) t.erase(a);
        out.insert(t);
      }
    }
    return out;
  };
  for (const auto& s : reachable(cp.problem, 6)) {
    std::set<std::string> cond_ops;
    std::set<std::string> flat_ops;
    for (const auto& op : cp.domain().operators()) {
      if (!op.applicable(s)) continue;
      cond_ops.insert(op.name);
      const auto* f = fd.find(op.name);
      REQUIRE(f);
      const auto c = successors(op, s);
      CHECK(std::set<State>(c.begin(), c.end()) == macro(*f, s));
    }
    for (const auto& op : fd.operators())
      if (op.applicable(s)) flat_ops.insert(op.name);
    CHECK(cond_ops == flat_ops);
  }
}
