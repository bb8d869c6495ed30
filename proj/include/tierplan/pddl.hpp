#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tierplan/formula.hpp"
#include "tierplan/model.hpp"

namespace tierplan::pddl {

struct TypedName {
  std::string name;
  std::string type = "object";
  bool operator==(const TypedName&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedName> params;
  bool operator==(const PredicateDecl&) const = default;
};

/// Predicate applied to variables ("?o") or constants.
struct SchemaAtom {
  std::string predicate;
  std::vector<std::string> args;
  bool operator==(const SchemaAtom&) const = default;
};

struct SchemaLiteral {
  SchemaAtom atom;
  bool positive = true;
  bool operator==(const SchemaLiteral&) const = default;
};

struct SchemaFormula {
  enum class Kind { True, Atom, And, Or, Not };
  Kind kind = Kind::True;
  SchemaAtom atom;
  std::vector<SchemaFormula> children;
  bool operator==(const SchemaFormula&) const = default;
};

struct SchemaAction {
  std::string name;
  std::vector<TypedName> params;
  SchemaFormula precondition;
  /// One literal list per oneof branch; a deterministic effect has one branch.
  std::vector<std::vector<SchemaLiteral>> branches;
  bool operator==(const SchemaAction&) const = default;
};

struct SchemaDomain {
  std::string name = "domain";
  std::vector<std::string> requirements;
  /// Declared types with their parent type.
  std::vector<TypedName> types;
  std::vector<TypedName> constants;
  std::vector<PredicateDecl> predicates;
  std::vector<SchemaAction> actions;

  const SchemaAction* find_action(std::string_view name) const;
  /// Predicates that occur in some effect.
  std::set<std::string> fluent_predicates() const;
  bool operator==(const SchemaDomain&) const = default;
};

/// Parses a domain file. `file` only labels error locations. Files may omit
/// the (define ...) wrapper and the :requirements/:domain boilerplate; when no
/// :predicates section is present, predicates are inferred from their uses.
SchemaDomain parse_domain(std::string_view text, const std::string& file = "<input>");

struct GroundOptions {
  /// Predicates treated as fluents. Defaults to the domain's own effect
  /// predicates; multi-tier loading passes the union over all tiers.
  std::optional<std::set<std::string>> fluents;
  /// When false, every predicate is a fluent and `statics` must be empty.
  bool compile_statics = true;
};

/// Grounds a schema over typed objects. Static predicates are evaluated
/// against `statics` (closed world) and compiled away; operators whose static
/// precondition fails are dropped. Domain constants are added to `objects`.
FondDomain ground(const SchemaDomain& schema, const std::vector<TypedName>& objects,
                  const std::vector<GroundAtom>& statics, const GroundOptions& options = {});

/// Same, but atoms are interned into an existing vocabulary that must already
/// contain every fluent atom. Used so that all tiers share one vocabulary.
FondDomain ground_into(const SchemaDomain& schema, const std::vector<TypedName>& objects,
                       const std::vector<GroundAtom>& statics, const GroundOptions& options,
                       const VocabularyPtr& vocab);

/// Fluent vocabulary for a set of schemas: every type-correct ground atom of
/// every fluent predicate, sorted.
VocabularyPtr fluent_vocabulary(const std::vector<const SchemaDomain*>& schemas,
                                const std::vector<TypedName>& objects, const std::set<std::string>& fluents);

enum class PrintMode { Oneof, Conditional };

/// Emits a ground domain as PDDL. Oneof mode rejects conditional effects.
std::string print_domain(const FondDomain& domain, PrintMode mode = PrintMode::Oneof,
                         const std::string& name = "domain");

std::string print_schema(const SchemaDomain& domain);

std::string print_problem(const Vocabulary& vocab, const State& init, const Formula& goal,
                          const std::string& domain_name = "domain", const std::string& name = "problem");

/// Parses a ground condition, e.g. "(and (at c0) (not (scratch)))".
Formula parse_condition(std::string_view text, const Vocabulary& vocab);

}  // namespace tierplan::pddl
