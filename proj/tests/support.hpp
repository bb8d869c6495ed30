// Shared fixtures, random generators and brute-force oracles for the tests.
#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tierplan/io.hpp"

namespace support {

using namespace tierplan;

inline std::filesystem::path data_dir() { return TIERPLAN_DATA_DIR; }

inline LoadedProblem load_example(const std::string& file = "manifest.json") {
  return load_manifest_file(data_dir() / "nonrunning" / file);
}

inline State st(const MtpProblem& p, const std::vector<std::string>& atoms) { return make_state(*p.vocab, atoms); }

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen); }
};

inline VocabularyPtr props(std::size_t n) {
  std::vector<GroundAtom> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back({"p" + std::to_string(i), {}});
  return std::make_shared<const Vocabulary>(std::move(atoms));
}

inline State state_from_bits(std::uint64_t bits, std::size_t n) {
  State s;
  for (std::size_t i = 0; i < n; ++i)
    if ((bits >> i) & 1U) s.insert(static_cast<AtomId>(i));
  return s;
}

inline std::vector<State> all_states(std::size_t n) {
  std::vector<State> out;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) out.push_back(state_from_bits(b, n));
  return out;
}

inline State random_state(Rng& rng, std::size_t n) { return state_from_bits(rng.gen(), n); }

/// Consistent literal set over distinct atoms.
inline LiteralSet random_literals(Rng& rng, std::size_t n, std::size_t lo, std::size_t hi) {
  std::vector<AtomId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<AtomId>(i);
  std::shuffle(ids.begin(), ids.end(), rng.gen);
  LiteralSet out;
  const auto k = std::min(n, rng.between(lo, hi));
  for (std::size_t i = 0; i < k; ++i) out.insert({ids[i], rng.coin()});
  return out;
}

inline GroundOperator random_operator(Rng& rng, const std::string& name, std::size_t n, std::size_t max_branches,
                                      std::size_t max_pre = 2) {
  GroundOperator op;
  op.name = op.schema = name;
  op.precondition = Formula::conj(random_literals(rng, n, 0, max_pre));
  std::set<LiteralSet> seen;
  const auto k = rng.between(1, max_branches);
  for (std::size_t i = 0; i < k * 4 && seen.size() < k; ++i) seen.insert(random_literals(rng, n, 1, 3));
  for (const auto& b : seen) op.branches.emplace_back(b);
  return op;
}

inline FondDomain random_domain(Rng& rng, const VocabularyPtr& vocab, std::size_t ops, std::size_t max_branches) {
  std::vector<GroundOperator> out;
  for (std::size_t i = 0; i < ops; ++i)
    out.push_back(random_operator(rng, "o" + std::to_string(i), vocab->size(), max_branches));
  return FondDomain(vocab, std::move(out));
}

/// Keeps a non-empty random subset of every operator's branches.
inline FondDomain random_refinement(Rng& rng, const FondDomain& lower) {
  std::vector<GroundOperator> out;
  for (auto op : lower.operators()) {
    std::vector<Effect> keep;
    for (const auto& b : op.branches)
      if (rng.coin(0.6)) keep.push_back(b);
    if (keep.empty()) keep.push_back(op.branches[rng.below(op.branches.size())]);
    op.branches = std::move(keep);
    out.push_back(std::move(op));
  }
  return FondDomain(lower.vocab_ptr(), std::move(out));
}

/// Chain-ordered multi-tier problem; tier i+1 refines tier i.
inline MtpProblem random_mtp(Rng& rng, std::size_t atoms, std::size_t tiers, std::size_t ops) {
  MtpProblem p;
  p.vocab = props(atoms);
  FondDomain d = random_domain(rng, p.vocab, ops, 3);
  std::vector<std::pair<std::size_t, std::size_t>> covers;
  for (std::size_t t = 0; t < tiers; ++t) {
    if (t > 0) {
      d = random_refinement(rng, d);
      covers.emplace_back(t - 1, t);
    }
    p.tiers.push_back({"t" + std::to_string(t), d, Formula::conj(random_literals(rng, atoms, 1, 2))});
  }
  p.order = TierOrder(tiers, std::move(covers));
  p.initial = random_state(rng, atoms);
  return p;
}

// -- independent oracles ------------------------------------------------------

/// Successors computed on raw bit vectors, without the library's state operations.
inline std::set<State> brute_successors(const GroundOperator& op, const State& s, std::size_t n) {
  std::set<State> out;
  for (const auto& b : op.branches) {
    std::vector<bool> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = s.contains(static_cast<AtomId>(i));
    for (const auto& l : b.literals)
      if (!l.positive) bits[l.atom] = false;
    for (const auto& l : b.literals)
      if (l.positive) bits[l.atom] = true;
    State t;
    for (std::size_t i = 0; i < n; ++i)
      if (bits[i]) t.insert(static_cast<AtomId>(i));
    out.insert(t);
  }
  return out;
}

inline bool brute_holds_conj(const LiteralSet& lits, const State& s) {
  for (const auto& l : lits)
    if (s.contains(l.atom) != l.positive) return false;
  return true;
}

/// Dual-FOND check of a memoryless policy by explicit search for a trap: a
/// set T of non-goal states, strongly connected under the policy, where
/// fair states keep all successors in T and unfair states keep at least one.
/// Executions that reach a state without an applicable action also fail.
/// Exponential in the component sizes; only for small problems.
inline bool brute_policy_ok(const FondProblem& prob, const Fairness& fair,
                            const std::map<State, std::string>& policy) {
  const auto n = prob.domain.vocab().size();
  std::vector<State> states{prob.initial};
  std::map<State, std::size_t> index{{prob.initial, 0}};
  std::vector<std::vector<std::size_t>> succ;
  std::vector<bool> unfair;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const State s = states[i];
    succ.emplace_back();
    unfair.push_back(false);
    if (prob.goal.holds(s)) continue;
    auto it = policy.find(s);
    if (it == policy.end()) return false;
    const auto* op = prob.domain.find(it->second);
    if (!op || !op->precondition.holds(s)) return false;
    unfair[i] = fair.is_unfair(op->name);
    for (const auto& t : brute_successors(*op, s, n)) {
      auto [pos, fresh] = index.emplace(t, states.size());
      if (fresh) states.push_back(t);
      succ[i].push_back(pos->second);
    }
  }
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!prob.goal.holds(states[i])) live.push_back(i);
  if (live.size() > 20) throw std::runtime_error("brute_policy_ok: too many states");
  const std::size_t m = live.size();
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t k = 0; k < m; ++k) pos[live[k]] = k;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    auto in = [&](std::size_t v) { return pos.count(v) && ((mask >> pos[v]) & 1U); };
    bool closed = true;
    for (std::size_t k = 0; k < m && closed; ++k) {
      if (!((mask >> k) & 1U)) continue;
      const auto v = live[k];
      const auto inside = std::count_if(succ[v].begin(), succ[v].end(), in);
      closed = unfair[v] ? inside > 0 : inside == static_cast<long>(succ[v].size());
    }
    if (!closed) continue;
    // strong connectivity through edges that stay inside the set
    std::size_t first = 0;
    while (!((mask >> first) & 1U)) ++first;
    bool strongly = true;
    for (std::size_t k = 0; k < m && strongly; ++k) {
      if (!((mask >> k) & 1U)) continue;
      auto reaches = [&](std::size_t from, std::size_t to) {
        std::set<std::size_t> seen{from};
        std::vector<std::size_t> stack{from};
        while (!stack.empty()) {
          const auto v = stack.back();
          stack.pop_back();
          if (v == to) return true;
          for (auto w : succ[v])
            if (in(w) && seen.insert(w).second) stack.push_back(w);
        }
        return false;
      };
      strongly = reaches(live[first], live[k]) && reaches(live[k], live[first]);
    }
    if (strongly) return false;
  }
  return true;
}

/// Exhaustive search over memoryless policies, assigning actions only to
/// states the partial policy reaches. Stops at the first complete policy
/// accepted by `accept`. Each complete policy costs one unit of `budget`;
/// running out throws.
inline bool enumerate_policies(const FondProblem& prob,
                               const std::function<bool(const std::map<State, std::string>&)>& accept,
                               std::size_t& budget) {
  const auto n = prob.domain.vocab().size();
  std::map<State, std::string> policy;
  std::function<bool()> rec = [&]() -> bool {
    std::set<State> seen{prob.initial};
    std::vector<State> stack{prob.initial};
    std::optional<State> open;
    while (!stack.empty() && !open) {
      const State s = stack.back();
      stack.pop_back();
      if (prob.goal.holds(s)) continue;
      auto it = policy.find(s);
      if (it == policy.end()) {
        open = s;
        break;
      }
      for (const auto& t : brute_successors(prob.domain.at(it->second), s, n))
        if (seen.insert(t).second) stack.push_back(t);
    }
    if (!open) {
      if (budget == 0) throw std::runtime_error("policy enumeration budget exhausted");
      --budget;
      return accept(policy);
    }
    for (const auto& op : prob.domain.operators()) {
      if (!op.precondition.holds(*open)) continue;
      policy[*open] = op.name;
      if (rec()) return true;
    }
    policy.erase(*open);
    return false;
  };
  return rec();
}

}  // namespace support
