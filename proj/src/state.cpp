#include "tierplan/state.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "tierplan/error.hpp"

namespace tierplan {

std::string GroundAtom::str() const {
  std::string out = "(" + predicate;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

GroundAtom parse_atom(std::string_view text) {
  std::string s(text);
  for (char& c : s)
    if (c == '(' || c == ')') c = ' ';
  std::istringstream in(s);
  GroundAtom atom;
  if (!(in >> atom.predicate)) throw Error("empty atom '" + std::string(text) + "'");
  for (std::string arg; in >> arg;) atom.args.push_back(arg);
  for (auto& c : atom.predicate) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto& a : atom.args)
    for (auto& c : a) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return atom;
}

Vocabulary::Vocabulary(std::vector<GroundAtom> atoms) {
  for (auto& a : atoms) add(std::move(a));
}

AtomId Vocabulary::add(GroundAtom atom) {
  auto key = atom.str();
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const auto id = static_cast<AtomId>(atoms_.size());
  atoms_.push_back(std::move(atom));
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<AtomId> Vocabulary::find(const GroundAtom& atom) const {
  if (auto it = index_.find(atom.str()); it != index_.end()) return it->second;
  return std::nullopt;
}

std::optional<AtomId> Vocabulary::find(std::string_view text) const {
  return find(parse_atom(text));
}

AtomId Vocabulary::at(std::string_view text) const {
  if (auto id = find(text)) return *id;
  throw Error("unknown atom '" + std::string(text) + "'");
}

LiteralSet::LiteralSet(std::initializer_list<Literal> lits) : LiteralSet(std::vector<Literal>(lits)) {}

LiteralSet::LiteralSet(std::vector<Literal> lits) : lits_(std::move(lits)) {
  std::sort(lits_.begin(), lits_.end());
  lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
}

void LiteralSet::insert(Literal l) {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), l);
  if (it == lits_.end() || *it != l) lits_.insert(it, l);
}

bool LiteralSet::contains(Literal l) const {
  return std::binary_search(lits_.begin(), lits_.end(), l);
}

bool LiteralSet::consistent() const {
  for (std::size_t i = 1; i < lits_.size(); ++i)
    if (lits_[i].atom == lits_[i - 1].atom) return false;
  return true;
}

LiteralSet LiteralSet::symmetric_difference(const LiteralSet& other) const {
  std::vector<Literal> out;
  std::set_symmetric_difference(lits_.begin(), lits_.end(), other.lits_.begin(), other.lits_.end(),
                                std::back_inserter(out));
  LiteralSet r;
  r.lits_ = std::move(out);
  return r;
}

bool LiteralSet::subset_of(const LiteralSet& other) const {
  return std::includes(other.lits_.begin(), other.lits_.end(), lits_.begin(), lits_.end());
}

State::State(std::initializer_list<AtomId> atoms) {
  for (auto a : atoms) insert(a);
}

void State::insert(AtomId a) {
  const std::size_t w = a / 64;
  if (w >= words_.size()) words_.resize(w + 1, 0);
  words_[w] |= std::uint64_t{1} << (a % 64);
}

void State::erase(AtomId a) {
  const std::size_t w = a / 64;
  if (w >= words_.size()) return;
  words_[w] &= ~(std::uint64_t{1} << (a % 64));
  trim();
}

void State::trim() {
  while (!words_.empty() && words_.back() == 0) words_.pop_back();
}

State State::applied(const LiteralSet& effect) const {
  State next = *this;
  for (auto l : effect)
    if (!l.positive) next.erase(l.atom);
  for (auto l : effect)
    if (l.positive) next.insert(l.atom);
  return next;
}

State State::projected(std::size_t limit) const {
  State out;
  for (auto a : atoms())
    if (a < limit) out.insert(a);
  return out;
}

std::vector<AtomId> State::atoms() const {
  std::vector<AtomId> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    auto bits = words_[w];
    while (bits != 0) {
      const int b = std::countr_zero(bits);
      out.push_back(static_cast<AtomId>(w * 64 + static_cast<std::size_t>(b)));
      bits &= bits - 1;
    }
  }
  return out;
}

std::size_t State::count() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t State::hash() const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (auto w : words_) {
    h ^= static_cast<std::size_t>(w);
    h *= 1099511628211ULL;
  }
  return h;
}

std::strong_ordering State::operator<=>(const State& other) const noexcept {
  const auto a = atoms();
  const auto b = other.atoms();
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

std::string to_string(const State& s, const Vocabulary& vocab) {
  std::string out = "{";
  bool first = true;
  for (auto a : s.atoms()) {
    if (!first) out += ", ";
    first = false;
    out += a < vocab.size() ? vocab.name(a) : "#" + std::to_string(a);
  }
  return out + "}";
}

std::string to_string(Literal l, const Vocabulary& vocab) {
  return l.positive ? vocab.name(l.atom) : "(not " + vocab.name(l.atom) + ")";
}

std::string to_string(const LiteralSet& lits, const Vocabulary& vocab) {
  if (lits.size() == 1) return to_string(*lits.begin(), vocab);
  std::string out = "(and";
  for (auto l : lits) out += " " + to_string(l, vocab);
  return out + ")";
}

State make_state(const Vocabulary& vocab, const std::vector<std::string>& atoms) {
  State s;
  for (const auto& a : atoms) s.insert(vocab.at(a));
  return s;
}

std::vector<std::string> atom_names(const State& s, const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (auto a : s.atoms()) out.push_back(vocab.name(a));
  return out;
}

}  // namespace tierplan
