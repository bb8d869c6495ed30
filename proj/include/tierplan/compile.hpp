#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tierplan/model.hpp"

namespace tierplan {

enum class Role { FairAct, UnfairAct, Continue, Degrade, CheckGoal, ExplainedBy };

std::string to_string(Role r);

struct Provenance {
  Role role = Role::FairAct;
  /// Source domain operator for fair, unfair and explained-by operators.
  std::string source;
  /// Operating tier (fair, continue, checkgoal, degrade origin) or the
  /// explaining tier of an explained-by operator.
  std::string tier;
  /// Degrade target tier.
  std::string target;
  /// Branch label of an explained-by operator, e.g. "e2".
  std::string label;
};

/// Dual-FOND problem obtained from a multi-tier problem. Atom ids below
/// `base_atoms` coincide with the source vocabulary.
struct CompiledProblem {
  FondProblem problem;
  Fairness fairness;
  std::map<std::string, Provenance> provenance;
  /// Branch labels of each unfair operator, aligned with its branches.
  std::map<std::string, std::vector<std::string>> branch_labels;
  std::vector<std::string> tier_ids;
  std::vector<std::size_t> tier_height;
  std::size_t base_atoms = 0;
  bool flattened = false;

  std::vector<AtomId> lvl;
  std::vector<AtomId> eps;
  AtomId act = 0;
  AtomId end = 0;
  std::map<std::string, AtomId> u;
  /// Branch markers introduced by flattening.
  std::vector<AtomId> markers;

  const FondDomain& domain() const { return problem.domain; }
  /// The lvl, eps, act, u and end atoms.
  std::vector<AtomId> bookkeeping() const;
  /// Index of the operating tier of a compiled state, if exactly one lvl atom holds.
  std::optional<std::size_t> tier_of(const State& s) const;
  /// Extended state s + lvl_D + act with every other bookkeeping atom false.
  State acting_state(const State& base, std::size_t tier) const;
  /// Tie-break key: checkgoal, then domain actions by name, then the
  /// alignment machinery, then degrades to higher targets first.
  std::string preference_key(const GroundOperator& op) const;
  const Provenance* origin(std::string_view op) const;
};

/// Throws ValidationFailed when the problem does not validate.
CompiledProblem compile(const MtpProblem& problem);

/// Simplifies `guard` using the literals that `context` entails as top-level conjuncts.
Formula simplify_guard(const Formula& guard, const Formula& context);

/// Replaces conditional effects by branch markers plus one deterministic
/// explained-by operator per guard. Problems without conditional effects are
/// returned unchanged.
CompiledProblem flatten(const CompiledProblem& compiled);

}  // namespace tierplan
