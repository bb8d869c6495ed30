#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tierplan/error.hpp"
#include "tierplan/formula.hpp"
#include "tierplan/state.hpp"

namespace tierplan {

struct ConditionalEffect {
  Formula condition;
  LiteralSet effect;

  friend bool operator==(const ConditionalEffect&, const ConditionalEffect&) = default;
};

/// One oneof branch: unconditional literals plus optional when-clauses.
/// Input domains only ever carry the unconditional part.
struct Effect {
  LiteralSet literals;
  std::vector<ConditionalEffect> when;

  Effect() = default;
  explicit Effect(LiteralSet lits) : literals(std::move(lits)) {}

  bool conditional() const noexcept { return !when.empty(); }
  /// Literals that fire in `s`; when-clauses are evaluated against `s`.
  LiteralSet active(const State& s) const;
  State apply(const State& s) const { return s.applied(active(s)); }

  friend bool operator==(const Effect&, const Effect&) = default;
};

bool operator<(const Effect& a, const Effect& b);

struct GroundOperator {
  std::string name;
  /// Action schema the operator was grounded from (its own name when built directly).
  std::string schema;
  std::vector<std::string> args;
  Formula precondition;
  std::vector<Effect> branches;

  bool applicable(const State& s) const { return precondition.holds(s); }
  bool conditional() const;
};

/// Grounded FOND domain: vocabulary plus named operators in canonical order.
class FondDomain {
 public:
  FondDomain() = default;
  FondDomain(VocabularyPtr vocab, std::vector<GroundOperator> ops);

  const Vocabulary& vocab() const { return *vocab_; }
  const VocabularyPtr& vocab_ptr() const { return vocab_; }
  const std::vector<GroundOperator>& operators() const { return ops_; }

  const GroundOperator* find(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  const GroundOperator& at(std::string_view name) const;

  /// Distinct schema names, sorted.
  std::vector<std::string> schemas() const;

 private:
  VocabularyPtr vocab_;
  std::vector<GroundOperator> ops_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Sorts operators by (schema, args) and branches canonically; deduplicates branches.
void canonicalize(std::vector<GroundOperator>& ops);

struct FondProblem {
  FondDomain domain;
  State initial;
  Formula goal;
};

/// Which operators are treated as unfair. The two degenerate modes give
/// strong-cyclic (nothing unfair) and strong (everything unfair) semantics.
struct Fairness {
  enum class Mode { Mixed, AllFair, AllUnfair };
  Mode mode = Mode::AllFair;
  std::set<std::string, std::less<>> unfair;

  static Fairness all_fair() { return {}; }
  static Fairness all_unfair() { return {Mode::AllUnfair, {}}; }
  static Fairness mixed(std::set<std::string, std::less<>> names) { return {Mode::Mixed, std::move(names)}; }

  bool is_unfair(std::string_view op) const {
    if (mode == Mode::Mixed) return unfair.count(op) > 0;
    return mode == Mode::AllUnfair;
  }
};

/// Distinct successors of every branch, sorted; no precondition check.
std::vector<State> successors(const GroundOperator& op, const State& s);

/// Successor set of applying `op` in `state`. Throws PreconditionViolated
/// (naming the first failing conjunct) or UnknownOperator.
std::vector<State> successor_states(const FondDomain& domain, const State& state, std::string_view op);

bool structurally_equal(const FondDomain& a, const FondDomain& b);

// -- refinement -------------------------------------------------------------

struct RefinementWitness {
  std::string op;
  std::optional<Effect> branch;
  std::string reason;
};

struct RefinementResult {
  bool holds = true;
  /// All offending operators/branches in canonical order; the first is the witness.
  std::vector<RefinementWitness> witnesses;
  explicit operator bool() const noexcept { return holds; }
};

/// Whether `higher` is a oneof-refinement of `lower`: same vocabulary, same
/// operator names and preconditions, and branch-set inclusion per operator.
RefinementResult check_oneof_refinement(const FondDomain& lower, const FondDomain& higher);

struct Execution {
  std::vector<State> states;
  std::vector<std::string> ops;
};

struct ExecutionRefinementResult {
  bool holds = true;
  std::optional<Execution> counterexample;
  explicit operator bool() const noexcept { return holds; }
};

/// Bounded check that every execution of `higher` from `start` of at most
/// `depth` steps is also an execution of `lower`. The counterexample is a
/// shortest violating execution.
ExecutionRefinementResult check_execution_refinement(const FondDomain& lower, const FondDomain& higher,
                                                     const State& start, std::size_t depth);

// -- multi-tier structure ---------------------------------------------------

/// Reflexive-transitive closure of a cover relation over tier indices.
class TierOrder {
 public:
  TierOrder() = default;
  TierOrder(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> covers);

  std::size_t size() const noexcept { return n_; }
  bool leq(std::size_t a, std::size_t b) const { return closure_[a * n_ + b]; }
  bool less(std::size_t a, std::size_t b) const { return a != b && leq(a, b); }
  bool comparable(std::size_t a, std::size_t b) const { return leq(a, b) || leq(b, a); }
  const std::vector<std::pair<std::size_t, std::size_t>>& covers() const { return covers_; }

  bool antisymmetric() const;
  std::optional<std::size_t> greatest() const;
  std::optional<std::size_t> minimum() const;
  /// Strict pairs (lower, higher), sorted.
  std::vector<std::pair<std::size_t, std::size_t>> strict_pairs() const;
  /// Length of the longest strict chain below `t`.
  std::size_t height(std::size_t t) const;
  /// Tiers ordered bottom-up (by height, then index).
  std::vector<std::size_t> bottom_up() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> covers_;
  std::vector<bool> closure_;
};

struct Tier {
  std::string id;
  FondDomain domain;
  Formula goal;
};

struct MtpProblem {
  VocabularyPtr vocab;
  std::vector<Tier> tiers;
  TierOrder order;
  State initial;

  std::optional<std::size_t> tier_index(std::string_view id) const;
  std::size_t tier_at(std::string_view id) const;
  /// Greatest tier; throws if the order has none.
  std::size_t top() const;
};

struct Finding {
  std::string kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const noexcept { return findings.empty(); }
  bool has(std::string_view kind) const;
};

ValidationReport validate_mtp(const MtpProblem& problem);

class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace tierplan
