#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tierplan/model.hpp"

namespace tierplan {

struct PolicyEntry {
  std::string action;
  /// Other operators that qualified at the same rank, in preference order.
  std::vector<std::string> alternatives;
  /// Distance layer of the state in the final fixpoint (goal states are 0).
  std::size_t rank = 0;
};

/// Memoryless policy restricted to the states it can reach from the initial state.
class Policy {
 public:
  Policy() = default;
  explicit Policy(VocabularyPtr vocab) : vocab_(std::move(vocab)) {}

  void set(const State& s, PolicyEntry e) { map_[s] = std::move(e); }
  void set(const State& s, std::string action) { map_[s] = PolicyEntry{std::move(action), {}, 0}; }
  void erase(const State& s) { map_.erase(s); }
  const PolicyEntry* find(const State& s) const;
  const std::string* action(const State& s) const;

  const std::map<State, PolicyEntry>& entries() const { return map_; }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  const VocabularyPtr& vocab() const { return vocab_; }

 private:
  VocabularyPtr vocab_;
  std::map<State, PolicyEntry> map_;
};

struct SolveOptions {
  std::size_t node_cap = 1'000'000;
  /// Sort key among qualifying operators; the smallest wins. Defaults to the name.
  std::function<std::string(const GroundOperator&)> preference;
};

struct SolveResult {
  bool solved = false;
  Policy policy;
  /// States in the explored reachable space.
  std::size_t explored = 0;
};

/// Nested fixpoint: the greatest safe region Y around least progress layers X.
/// A fair operator qualifies when all successors stay in Y and one enters X;
/// an unfair operator needs every successor in X. Throws BudgetExceeded.
SolveResult solve_dual(const FondProblem& problem, const Fairness& fairness, const SolveOptions& options = {});
SolveResult solve_strong_cyclic(const FondProblem& problem, const SolveOptions& options = {});
SolveResult solve_strong(const FondProblem& problem, const SolveOptions& options = {});

struct VerifyResult {
  bool ok = true;
  std::string diagnosis;
  /// Path from the initial state to the offending state.
  std::vector<State> path;
  std::vector<std::string> path_ops;
  explicit operator bool() const noexcept { return ok; }
};

/// Checks the policy graph: every reachable non-goal state must carry an
/// applicable action, and no reachable set of non-goal states may trap an
/// execution that is fair with respect to the fair operators.
VerifyResult verify_dual(const Policy& policy, const FondProblem& problem, const Fairness& fairness,
                         std::size_t node_cap = 1'000'000);

struct PolicyGraph {
  struct Node {
    State state;
    bool goal = false;
    std::string action;
    std::string label;
  };
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::string op;
    bool unfair = false;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

/// Policy-reachable graph in breadth-first order from the initial state.
/// `label` annotates nodes (e.g. with the operating tier).
PolicyGraph export_policy_graph(const Policy& policy, const FondProblem& problem, const Fairness& fairness,
                                const std::function<std::string(const State&)>& label = {},
                                std::size_t node_cap = 1'000'000);

std::string to_dot(const PolicyGraph& graph, const Vocabulary& vocab);

}  // namespace tierplan
