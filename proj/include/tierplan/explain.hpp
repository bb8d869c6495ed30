#pragma once

#include <string>
#include <string_view>

#include "tierplan/formula.hpp"
#include "tierplan/model.hpp"

namespace tierplan {

struct ExplainsFormula {
  std::string op;
  std::string tier;
  LiteralSet observed;
  Formula formula;
};

/// Condition on the pre-state under which some branch of `op` yields the
/// same successor as applying `observed`: one disjunct per branch over the
/// symmetric difference; inconsistent disjuncts drop out and an empty
/// difference makes the whole formula true.
Formula explains_formula(const GroundOperator& op, const LiteralSet& observed);

ExplainsFormula explains(const FondDomain& tier, std::string_view op, const LiteralSet& observed,
                         const std::string& tier_id = {});

/// Brute-force membership of `next` among the successors of `op` in `s`.
bool lemma1_oracle(const FondDomain& tier, const State& s, std::string_view op, const State& next);

}  // namespace tierplan
