#include "tierplan/model.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

namespace tierplan {

LiteralSet Effect::active(const State& s) const {
  if (when.empty()) return literals;
  LiteralSet out = literals;
  for (const auto& w : when)
    if (w.condition.holds(s))
      for (auto l : w.effect) out.insert(l);
  return out;
}

bool operator<(const Effect& a, const Effect& b) {
  if (a.literals != b.literals) return a.literals < b.literals;
  return std::lexicographical_compare(
      a.when.begin(), a.when.end(), b.when.begin(), b.when.end(),
      [](const ConditionalEffect& x, const ConditionalEffect& y) {
        if (x.condition != y.condition) return x.condition < y.condition;
        return x.effect < y.effect;
      });
}

bool GroundOperator::conditional() const {
  return std::any_of(branches.begin(), branches.end(), [](const Effect& e) { return e.conditional(); });
}

void canonicalize(std::vector<GroundOperator>& ops) {
  for (auto& op : ops) {
    std::sort(op.branches.begin(), op.branches.end());
    op.branches.erase(std::unique(op.branches.begin(), op.branches.end()), op.branches.end());
  }
  std::sort(ops.begin(), ops.end(), [](const GroundOperator& a, const GroundOperator& b) {
    if (a.schema != b.schema) return a.schema < b.schema;
    if (a.args != b.args) return a.args < b.args;
    return a.name < b.name;
  });
}

FondDomain::FondDomain(VocabularyPtr vocab, std::vector<GroundOperator> ops)
    : vocab_(std::move(vocab)), ops_(std::move(ops)) {
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (!index_.emplace(ops_[i].name, i).second)
      throw Error("duplicate operator name '" + ops_[i].name + "'");
  }
}

const GroundOperator* FondDomain::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &ops_[it->second];
}

std::optional<std::size_t> FondDomain::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const GroundOperator& FondDomain::at(std::string_view name) const {
  if (const auto* op = find(name)) return *op;
  throw UnknownOperator(std::string(name));
}

std::vector<std::string> FondDomain::schemas() const {
  std::set<std::string> names;
  for (const auto& op : ops_) names.insert(op.schema);
  return {names.begin(), names.end()};
}

std::vector<State> successors(const GroundOperator& op, const State& s) {
  std::vector<State> out;
  out.reserve(op.branches.size());
  for (const auto& b : op.branches) out.push_back(b.apply(s));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<State> successor_states(const FondDomain& domain, const State& state, std::string_view name) {
  const auto& op = domain.at(name);
  if (!op.applicable(state)) {
    for (const auto& c : op.precondition.conjuncts())
      if (!c.holds(state)) throw PreconditionViolated(op.name, c.pddl(domain.vocab()));
  }
  return successors(op, state);
}

namespace {

std::string effect_text(const Effect& e, const Vocabulary& vocab) {
  std::string out = to_string(e.literals, vocab);
  for (const auto& w : e.when)
    out += " (when " + w.condition.pddl(vocab) + " " + to_string(w.effect, vocab) + ")";
  return out;
}

std::set<std::string> atom_name_set(const Vocabulary& v) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.insert(v.name(static_cast<AtomId>(i)));
  return out;
}

}  // namespace

bool structurally_equal(const FondDomain& a, const FondDomain& b) {
  if (atom_name_set(a.vocab()) != atom_name_set(b.vocab())) return false;
  if (a.operators().size() != b.operators().size()) return false;
  for (const auto& op : a.operators()) {
    const auto* other = b.find(op.name);
    if (other == nullptr) return false;
    if (op.precondition.canonical().pddl(a.vocab()) != other->precondition.canonical().pddl(b.vocab()))
      return false;
    std::multiset<std::string> ea, eb;
    for (const auto& e : op.branches) ea.insert(effect_text(e, a.vocab()));
    for (const auto& e : other->branches) eb.insert(effect_text(e, b.vocab()));
    if (ea != eb) return false;
  }
  return true;
}

RefinementResult check_oneof_refinement(const FondDomain& lower, const FondDomain& higher) {
  RefinementResult r;
  auto fail = [&](std::string op, std::optional<Effect> branch, std::string reason) {
    r.holds = false;
    r.witnesses.push_back({std::move(op), std::move(branch), std::move(reason)});
  };
  if (atom_name_set(lower.vocab()) != atom_name_set(higher.vocab())) fail("", std::nullopt, "vocabularies differ");
  for (const auto& op : lower.operators())
    if (higher.find(op.name) == nullptr) fail(op.name, std::nullopt, "operator missing in refining domain");
  for (const auto& op : higher.operators()) {
    const auto* base = lower.find(op.name);
    if (base == nullptr) {
      fail(op.name, std::nullopt, "operator missing in refined domain");
      continue;
    }
    if (op.precondition.canonical().pddl(higher.vocab()) != base->precondition.canonical().pddl(lower.vocab())) {
      fail(op.name, std::nullopt, "preconditions differ");
      continue;
    }
    for (const auto& b : op.branches) {
      const bool found = std::any_of(base->branches.begin(), base->branches.end(), [&](const Effect& e) {
        return effect_text(e, lower.vocab()) == effect_text(b, higher.vocab());
      });
      if (!found) fail(op.name, b, "branch " + effect_text(b, higher.vocab()) + " not in refined domain");
    }
  }
  return r;
}

ExecutionRefinementResult check_execution_refinement(const FondDomain& lower, const FondDomain& higher,
                                                     const State& start, std::size_t depth) {
  struct Node {
    State state;
    std::size_t parent;
    std::string op;
  };
  std::vector<Node> nodes{{start, 0, {}}};
  std::unordered_map<State, std::size_t, StateHash> seen{{start, 0}};
  std::vector<std::size_t> frontier{0};

  auto path_to = [&](std::size_t idx) {
    Execution ex;
    std::vector<std::size_t> chain;
    for (std::size_t i = idx;; i = nodes[i].parent) {
      chain.push_back(i);
      if (i == 0) break;
    }
    std::reverse(chain.begin(), chain.end());
    for (std::size_t k = 0; k < chain.size(); ++k) {
      if (k > 0) ex.ops.push_back(nodes[chain[k]].op);
      ex.states.push_back(nodes[chain[k]].state);
    }
    return ex;
  };

  for (std::size_t level = 0; level < depth && !frontier.empty(); ++level) {
    std::vector<std::size_t> next;
    for (auto idx : frontier) {
      const State s = nodes[idx].state;
      for (const auto& op : higher.operators()) {
        if (!op.applicable(s)) continue;
        const auto* base = lower.find(op.name);
        const bool base_ok = base != nullptr && base->applicable(s);
        const auto base_succ = base_ok ? successors(*base, s) : std::vector<State>{};
        for (const auto& succ : successors(op, s)) {
          if (!std::binary_search(base_succ.begin(), base_succ.end(), succ)) {
            ExecutionRefinementResult r;
            r.holds = false;
            r.counterexample = path_to(idx);
            r.counterexample->ops.push_back(op.name);
            r.counterexample->states.push_back(succ);
            return r;
          }
          if (seen.emplace(succ, nodes.size()).second) {
            next.push_back(nodes.size());
            nodes.push_back({succ, idx, op.name});
          }
        }
      }
    }
    frontier = std::move(next);
  }
  return {};
}

TierOrder::TierOrder(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> covers)
    : n_(n), covers_(std::move(covers)), closure_(n * n, false) {
  for (std::size_t i = 0; i < n; ++i) closure_[i * n + i] = true;
  for (auto [lo, hi] : covers_) {
    if (lo >= n || hi >= n) throw Error("tier order references an unknown tier index");
    closure_[lo * n + hi] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (closure_[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (closure_[k * n + j]) closure_[i * n + j] = true;
}

bool TierOrder::antisymmetric() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (leq(i, j) && leq(j, i)) return false;
  return true;
}

std::optional<std::size_t> TierOrder::greatest() const {
  for (std::size_t t = 0; t < n_; ++t) {
    bool all = true;
    for (std::size_t o = 0; o < n_ && all; ++o) all = leq(o, t);
    if (all) return t;
  }
  return std::nullopt;
}

std::optional<std::size_t> TierOrder::minimum() const {
  for (std::size_t t = 0; t < n_; ++t) {
    bool all = true;
    for (std::size_t o = 0; o < n_ && all; ++o) all = leq(t, o);
    if (all) return t;
  }
  return std::nullopt;
}

std::vector<std::pair<std::size_t, std::size_t>> TierOrder::strict_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (less(i, j)) out.emplace_back(i, j);
  return out;
}

std::size_t TierOrder::height(std::size_t t) const {
  std::size_t best = 0;
  for (std::size_t o = 0; o < n_; ++o)
    if (less(o, t) && !leq(t, o)) best = std::max(best, height(o) + 1);
  return best;
}

std::vector<std::size_t> TierOrder::bottom_up() const {
  std::vector<std::size_t> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = i;
  std::vector<std::size_t> h(n_);
  for (std::size_t i = 0; i < n_; ++i) h[i] = antisymmetric() ? height(i) : 0;
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return h[a] < h[b]; });
  return out;
}

std::optional<std::size_t> MtpProblem::tier_index(std::string_view id) const {
  for (std::size_t i = 0; i < tiers.size(); ++i)
    if (tiers[i].id == id) return i;
  return std::nullopt;
}

std::size_t MtpProblem::tier_at(std::string_view id) const {
  if (auto i = tier_index(id)) return *i;
  throw Error("unknown tier '" + std::string(id) + "'");
}

std::size_t MtpProblem::top() const {
  if (auto g = order.greatest()) return *g;
  throw Error("tier order has no greatest element");
}

bool ValidationReport::has(std::string_view kind) const {
  return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return f.kind == kind; });
}

namespace {

std::string findings_summary(const ValidationReport& r) {
  std::string out = "validation failed:";
  for (const auto& f : r.findings) out += "\n  [" + f.kind + "] " + f.message;
  return out;
}

}  // namespace

ValidationFailed::ValidationFailed(ValidationReport report)
    : Error(findings_summary(report)), report_(std::move(report)) {}

ValidationReport validate_mtp(const MtpProblem& p) {
  ValidationReport r;
  auto add = [&](std::string kind, std::string msg) { r.findings.push_back({std::move(kind), std::move(msg)}); };

  if (p.tiers.empty()) {
    add("empty", "problem has no tiers");
    return r;
  }
  std::set<std::string> ids;
  for (const auto& t : p.tiers)
    if (!ids.insert(t.id).second) add("duplicate-tier", "tier id '" + t.id + "' appears twice");
  if (p.order.size() != p.tiers.size()) {
    add("order-size", "tier order does not cover every tier");
    return r;
  }

  const bool partial = p.order.antisymmetric();
  if (!partial) {
    for (std::size_t i = 0; i < p.tiers.size(); ++i)
      for (std::size_t j = i + 1; j < p.tiers.size(); ++j)
        if (p.order.leq(i, j) && p.order.leq(j, i))
          add("not-partial-order", "tiers '" + p.tiers[i].id + "' and '" + p.tiers[j].id + "' lie on a cycle");
  } else {
    if (!p.order.greatest()) add("no-greatest", "tier order has no greatest element");
    if (!p.order.minimum()) add("no-minimum", "tier order has no minimum element");
  }

  const auto& ref = p.tiers.front();
  const auto ref_atoms = atom_name_set(ref.domain.vocab());
  for (const auto& t : p.tiers) {
    if (atom_name_set(t.domain.vocab()) != ref_atoms)
      add("vocabulary-mismatch", "tier '" + t.id + "' has a different vocabulary than '" + ref.id + "'");
    if (!t.goal.canonical().literal_conjunction())
      add("goal-not-conjunctive", "goal of tier '" + t.id + "' is not a conjunction of literals");
    for (const auto& op : t.domain.operators()) {
      if (op.branches.empty()) add("empty-effect", "operator '" + op.name + "' in tier '" + t.id + "' has no branch");
      for (const auto& b : op.branches)
        if (!b.literals.consistent())
          add("inconsistent-branch", "operator '" + op.name + "' in tier '" + t.id + "' has a contradictory branch");
    }
  }

  for (std::size_t i = 1; i < p.tiers.size(); ++i) {
    const auto& t = p.tiers[i];
    for (const auto& op : ref.domain.operators()) {
      const auto* other = t.domain.find(op.name);
      if (other == nullptr) {
        add("operator-mismatch", "operator '" + op.name + "' missing from tier '" + t.id + "'");
      } else if (other->precondition.canonical() != op.precondition.canonical()) {
        add("precondition-drift", "operator '" + op.name + "' has different preconditions in tiers '" + ref.id +
                                      "' and '" + t.id + "'");
      }
    }
    for (const auto& op : t.domain.operators())
      if (ref.domain.find(op.name) == nullptr)
        add("operator-mismatch", "operator '" + op.name + "' missing from tier '" + ref.id + "'");
  }

  if (partial) {
    for (auto [lo, hi] : p.order.strict_pairs()) {
      auto res = check_oneof_refinement(p.tiers[lo].domain, p.tiers[hi].domain);
      for (const auto& w : res.witnesses) {
        if (w.reason == "preconditions differ" || w.reason.starts_with("operator missing") ||
            w.reason == "vocabularies differ")
          continue;  // already reported above
        add("refinement-failure", "tier '" + p.tiers[hi].id + "' does not refine '" + p.tiers[lo].id +
                                      "': operator '" + w.op + "': " + w.reason);
      }
    }
  }
  return r;
}

}  // namespace tierplan
