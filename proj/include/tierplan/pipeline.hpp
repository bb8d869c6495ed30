#pragma once

#include <optional>
#include <string>

#include "tierplan/io.hpp"

namespace tierplan {

struct CompiledFiles {
  std::string domain;
  std::string problem;
  Json fairness;
};

/// PDDL text for a compiled problem. Unflattened problems print conditional effects.
CompiledFiles render_compiled(const CompiledProblem& cp, const std::string& name);

struct Solution {
  CompiledProblem compiled;
  SolveResult result;
  /// Present when the compiled problem was solved.
  std::optional<MtController> mtc;
};

/// Compiles, solves with the compiler's tie-break order and extracts the MTC.
Solution solve_mtp(const MtpProblem& problem, std::size_t node_cap = 1'000'000);

PolicyGraph policy_graph(const Solution& s, std::size_t node_cap = 1'000'000);

}  // namespace tierplan
