#include "tierplan/pipeline.hpp"

namespace tierplan {

CompiledFiles render_compiled(const CompiledProblem& cp, const std::string& name) {
  const auto mode = cp.flattened ? pddl::PrintMode::Oneof : pddl::PrintMode::Conditional;
  const auto dom = name + "-compiled";
  return {pddl::print_domain(cp.domain(), mode, dom),
          pddl::print_problem(cp.problem.domain.vocab(), cp.problem.initial, cp.problem.goal, dom, name),
          fairness_json(cp)};
}

Solution solve_mtp(const MtpProblem& problem, std::size_t node_cap) {
  Solution out{compile(problem), {}, std::nullopt};
  SolveOptions opts;
  opts.node_cap = node_cap;
  const auto& cp = out.compiled;
  opts.preference = [&cp](const GroundOperator& op) { return cp.preference_key(op); };
  out.result = solve_dual(cp.problem, cp.fairness, opts);
  if (out.result.solved) out.mtc = extract_mtc(out.result.policy, cp);
  return out;
}

PolicyGraph policy_graph(const Solution& s, std::size_t node_cap) {
  const auto& cp = s.compiled;
  auto label = [&cp](const State& st) {
    const auto t = cp.tier_of(st);
    return t ? cp.tier_ids[*t] : std::string();
  };
  return export_policy_graph(s.result.policy, cp.problem, cp.fairness, label, node_cap);
}

}  // namespace tierplan
