#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tierplan {

using AtomId = std::uint32_t;

struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  /// PDDL spelling, e.g. "(at c0)" or "(scratch)".
  std::string str() const;

  auto operator<=>(const GroundAtom&) const = default;
  bool operator==(const GroundAtom&) const = default;
};

/// Parses "(at c0)" / "at c0" into a ground atom.
GroundAtom parse_atom(std::string_view text);

/// Interned set of ground atoms. Ids are dense and stable once assigned.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<GroundAtom> atoms);

  AtomId add(GroundAtom atom);
  std::optional<AtomId> find(const GroundAtom& atom) const;
  std::optional<AtomId> find(std::string_view text) const;
  AtomId at(std::string_view text) const;

  const GroundAtom& atom(AtomId id) const { return atoms_.at(id); }
  std::string name(AtomId id) const { return atoms_.at(id).str(); }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<GroundAtom>& atoms() const noexcept { return atoms_; }

 private:
  std::vector<GroundAtom> atoms_;
  std::unordered_map<std::string, AtomId> index_;
};

using VocabularyPtr = std::shared_ptr<const Vocabulary>;

struct Literal {
  AtomId atom = 0;
  bool positive = true;

  Literal complement() const { return {atom, !positive}; }
  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

/// Sorted, duplicate-free literal set.
class LiteralSet {
 public:
  LiteralSet() = default;
  LiteralSet(std::initializer_list<Literal> lits);
  explicit LiteralSet(std::vector<Literal> lits);

  void insert(Literal l);
  bool contains(Literal l) const;
  /// True when no atom occurs with both polarities.
  bool consistent() const;
  bool empty() const noexcept { return lits_.empty(); }
  std::size_t size() const noexcept { return lits_.size(); }

  auto begin() const { return lits_.begin(); }
  auto end() const { return lits_.end(); }
  const std::vector<Literal>& literals() const noexcept { return lits_; }

  /// (this \ other) ∪ (other \ this)
  LiteralSet symmetric_difference(const LiteralSet& other) const;
  bool subset_of(const LiteralSet& other) const;

  auto operator<=>(const LiteralSet&) const = default;
  bool operator==(const LiteralSet&) const = default;

 private:
  std::vector<Literal> lits_;
};

/// Set of atoms true in a state, stored as a bitset. Two states are equal iff
/// they hold the same atoms, independent of the vocabulary they came from.
class State {
 public:
  State() = default;
  State(std::initializer_list<AtomId> atoms);

  bool contains(AtomId a) const noexcept {
    const std::size_t w = a / 64;
    return w < words_.size() && ((words_[w] >> (a % 64)) & 1U) != 0;
  }
  bool satisfies(Literal l) const noexcept { return contains(l.atom) == l.positive; }

  void insert(AtomId a);
  void erase(AtomId a);
  void apply(Literal l) { l.positive ? insert(l.atom) : erase(l.atom); }

  /// Deletes first, then adds.
  State applied(const LiteralSet& effect) const;
  /// Keeps only atoms with id < limit.
  State projected(std::size_t limit) const;

  std::vector<AtomId> atoms() const;
  std::size_t count() const noexcept;
  bool empty() const noexcept { return words_.empty(); }

  std::size_t hash() const noexcept;

  std::strong_ordering operator<=>(const State& other) const noexcept;
  bool operator==(const State& other) const noexcept { return words_ == other.words_; }

 private:
  void trim();
  std::vector<std::uint64_t> words_;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept { return s.hash(); }
};

std::string to_string(const State& s, const Vocabulary& vocab);
std::string to_string(Literal l, const Vocabulary& vocab);
std::string to_string(const LiteralSet& lits, const Vocabulary& vocab);

/// Parses a list of atom spellings into a state; throws on unknown atoms.
State make_state(const Vocabulary& vocab, const std::vector<std::string>& atoms);
std::vector<std::string> atom_names(const State& s, const Vocabulary& vocab);

}  // namespace tierplan
