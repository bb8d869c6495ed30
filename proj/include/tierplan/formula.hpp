#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tierplan/state.hpp"

namespace tierplan {

/// Propositional condition over ground atoms.
class Formula {
 public:
  enum class Kind { True, False, Lit, And, Or, Not };

  Formula() = default;  // constant true

  static Formula top() { return Formula(); }
  static Formula bottom();
  static Formula literal(Literal l);
  static Formula atom(AtomId a, bool positive = true) { return literal({a, positive}); }
  static Formula conj(std::vector<Formula> children);
  static Formula disj(std::vector<Formula> children);
  static Formula negation(Formula child);
  static Formula conj(const LiteralSet& lits);

  Kind kind() const noexcept { return kind_; }
  Literal lit() const noexcept { return lit_; }
  const std::vector<Formula>& children() const noexcept { return children_; }

  bool is_true() const noexcept { return kind_ == Kind::True; }
  bool is_false() const noexcept { return kind_ == Kind::False; }

  bool holds(const State& s) const;

  /// Negation normal form, nested and/or flattened, children sorted and
  /// deduplicated, constants folded, complementary literal pairs inside a
  /// single conjunction (disjunction) collapsed to false (true).
  Formula canonical() const;

  /// The literal set if this is a literal or a conjunction of literals.
  std::optional<LiteralSet> literal_conjunction() const;

  /// Top-level conjuncts (the formula itself if it is not a conjunction).
  std::vector<Formula> conjuncts() const;

  void collect_atoms(std::set<AtomId>& out) const;

  /// PDDL condition syntax.
  std::string pddl(const Vocabulary& vocab) const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator<(const Formula& a, const Formula& b);

 private:
  Kind kind_ = Kind::True;
  Literal lit_{};
  std::vector<Formula> children_;
};

inline bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

/// Replaces every literal decided by `context` (a conjunction of literals)
/// with a constant and folds the result.
Formula simplify_under(const Formula& f, const LiteralSet& context);

}  // namespace tierplan
