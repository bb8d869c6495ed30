#include "tierplan/explain.hpp"

#include <algorithm>

namespace tierplan {

Formula explains_formula(const GroundOperator& op, const LiteralSet& observed) {
  if (!observed.consistent()) throw Error("observed effect of '" + op.name + "' is inconsistent");
  std::vector<Formula> disjuncts;
  for (const auto& branch : op.branches) {
    if (branch.conditional()) throw Error("operator '" + op.name + "' has conditional effects");
    const LiteralSet diff = observed.symmetric_difference(branch.literals);
    if (!diff.consistent()) continue;
    if (diff.empty()) return Formula::top();
    disjuncts.push_back(Formula::conj(diff));
  }
  if (disjuncts.empty()) return Formula::bottom();
  if (disjuncts.size() == 1) return disjuncts.front();
  return Formula::disj(std::move(disjuncts));
}

ExplainsFormula explains(const FondDomain& tier, std::string_view op, const LiteralSet& observed,
                         const std::string& tier_id) {
  const auto& o = tier.at(op);
  return {o.name, tier_id, observed, explains_formula(o, observed)};
}

bool lemma1_oracle(const FondDomain& tier, const State& s, std::string_view op, const State& next) {
  const auto succ = successor_states(tier, s, op);
  return std::binary_search(succ.begin(), succ.end(), next);
}

}  // namespace tierplan
