#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tierplan/compile.hpp"
#include "tierplan/solve.hpp"

namespace tierplan {

/// One policy per tier over base-vocabulary states. An empty action set
/// marks a state where the tier goal is reached.
class MtController {
 public:
  using TierPolicy = std::map<State, std::vector<std::string>>;

  MtController() = default;
  explicit MtController(std::vector<std::string> tier_ids);

  const std::vector<std::string>& tier_ids() const { return tier_ids_; }
  void set(std::size_t tier, const State& s, std::vector<std::string> actions);
  /// Null when the tier has no entry for `s`.
  const std::vector<std::string>* actions(std::size_t tier, const State& s) const;
  const TierPolicy& policy(std::size_t tier) const { return policies_.at(tier); }
  std::size_t size() const;

 private:
  std::vector<std::string> tier_ids_;
  std::vector<TierPolicy> policies_;
};

/// C_D(s) = pi(s + lvl_D + act) with all other bookkeeping atoms false.
MtController extract_mtc(const Policy& policy, const CompiledProblem& compiled);

using TriggerMap = std::vector<std::set<State>>;

/// Least fixpoint of the triggering-state definition. Each execution of C_D'
/// from a trigger of D' is tracked together with the set of tiers in which
/// the execution so far is legal; a step that stays legal in D < D' but in no
/// tier above D lands in a trigger of D. Throws EscapesAllTiers when a
/// successor is admitted by no tier.
TriggerMap triggering_states(const MtpProblem& problem, const MtController& mtc);

struct MtcFailure {
  std::string tier;
  State trigger;
  std::string diagnosis;
};

struct MtcReport {
  bool ok = true;
  TriggerMap triggers;
  std::vector<MtcFailure> failures;
  explicit operator bool() const noexcept { return ok; }
};

/// Each tier policy must solve its tier problem from every trigger of that
/// tier, with the tier's own effects treated as fair.
MtcReport verify_mtc(const MtpProblem& problem, const MtController& mtc);

std::string to_text(const MtcReport& report, const MtpProblem& problem);

}  // namespace tierplan
