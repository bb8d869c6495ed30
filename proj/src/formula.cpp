#include "tierplan/formula.hpp"

#include <algorithm>

namespace tierplan {

Formula Formula::bottom() {
  Formula f;
  f.kind_ = Kind::False;
  return f;
}

Formula Formula::literal(Literal l) {
  Formula f;
  f.kind_ = Kind::Lit;
  f.lit_ = l;
  return f;
}

Formula Formula::conj(std::vector<Formula> children) {
  Formula f;
  f.kind_ = Kind::And;
  f.children_ = std::move(children);
  return f;
}

Formula Formula::disj(std::vector<Formula> children) {
  Formula f;
  f.kind_ = Kind::Or;
  f.children_ = std::move(children);
  return f;
}

Formula Formula::negation(Formula child) {
  Formula f;
  f.kind_ = Kind::Not;
  f.children_.push_back(std::move(child));
  return f;
}

Formula Formula::conj(const LiteralSet& lits) {
  if (lits.size() == 1) return literal(*lits.begin());
  std::vector<Formula> cs;
  for (auto l : lits) cs.push_back(literal(l));
  return conj(std::move(cs));
}

bool Formula::holds(const State& s) const {
  switch (kind_) {
    case Kind::True:
      return true;
    case Kind::False:
      return false;
    case Kind::Lit:
      return s.satisfies(lit_);
    case Kind::And:
      return std::all_of(children_.begin(), children_.end(), [&](const Formula& c) { return c.holds(s); });
    case Kind::Or:
      return std::any_of(children_.begin(), children_.end(), [&](const Formula& c) { return c.holds(s); });
    case Kind::Not:
      return !children_.front().holds(s);
  }
  return false;
}

namespace {

Formula nnf(const Formula& f, bool negate) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
      return negate ? Formula::bottom() : Formula::top();
    case K::False:
      return negate ? Formula::top() : Formula::bottom();
    case K::Lit:
      return Formula::literal(negate ? f.lit().complement() : f.lit());
    case K::Not:
      return nnf(f.children().front(), !negate);
    case K::And:
    case K::Or: {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(nnf(c, negate));
      const bool is_and = (f.kind() == K::And) != negate;
      return is_and ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
  }
  return f;
}

// Input is in NNF.
Formula fold(const Formula& f) {
  using K = Formula::Kind;
  if (f.kind() != K::And && f.kind() != K::Or) return f;
  const bool is_and = f.kind() == K::And;
  std::vector<Formula> flat;
  for (const auto& c : f.children()) {
    Formula fc = fold(c);
    if (fc.kind() == f.kind()) {
      for (const auto& g : fc.children()) flat.push_back(g);
    } else if (fc.is_true()) {
      if (!is_and) return Formula::top();
    } else if (fc.is_false()) {
      if (is_and) return Formula::bottom();
    } else {
      flat.push_back(std::move(fc));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (flat[i].kind() != K::Lit) continue;
    for (std::size_t j = i + 1; j < flat.size(); ++j)
      if (flat[j].kind() == K::Lit && flat[j].lit() == flat[i].lit().complement())
        return is_and ? Formula::bottom() : Formula::top();
  }
  if (flat.empty()) return is_and ? Formula::top() : Formula::bottom();
  if (flat.size() == 1) return flat.front();
  return is_and ? Formula::conj(std::move(flat)) : Formula::disj(std::move(flat));
}

int kind_rank(Formula::Kind k) { return static_cast<int>(k); }

}  // namespace

Formula Formula::canonical() const { return fold(nnf(*this, false)); }

std::optional<LiteralSet> Formula::literal_conjunction() const {
  if (kind_ == Kind::True) return LiteralSet{};
  if (kind_ == Kind::Lit) return LiteralSet{lit_};
  if (kind_ != Kind::And) return std::nullopt;
  LiteralSet out;
  for (const auto& c : children_) {
    auto sub = c.literal_conjunction();
    if (!sub) return std::nullopt;
    for (auto l : *sub) out.insert(l);
  }
  return out;
}

std::vector<Formula> Formula::conjuncts() const {
  if (kind_ != Kind::And) return {*this};
  std::vector<Formula> out;
  for (const auto& c : children_)
    for (auto& g : c.conjuncts()) out.push_back(std::move(g));
  return out;
}

void Formula::collect_atoms(std::set<AtomId>& out) const {
  if (kind_ == Kind::Lit) out.insert(lit_.atom);
  for (const auto& c : children_) c.collect_atoms(out);
}

std::string Formula::pddl(const Vocabulary& vocab) const {
  switch (kind_) {
    case Kind::True:
      return "(and)";
    case Kind::False:
      return "(or)";
    case Kind::Lit:
      return to_string(lit_, vocab);
    case Kind::Not:
      return "(not " + children_.front().pddl(vocab) + ")";
    case Kind::And:
    case Kind::Or: {
      std::string out = kind_ == Kind::And ? "(and" : "(or";
      for (const auto& c : children_) out += " " + c.pddl(vocab);
      return out + ")";
    }
  }
  return {};
}

bool operator==(const Formula& a, const Formula& b) {
  return a.kind_ == b.kind_ && a.lit_ == b.lit_ && a.children_ == b.children_;
}

bool operator<(const Formula& a, const Formula& b) {
  if (a.kind_ != b.kind_) {
    // Literals first so printed conjunctions read naturally.
    if (a.kind_ == Formula::Kind::Lit) return true;
    if (b.kind_ == Formula::Kind::Lit) return false;
    return kind_rank(a.kind_) < kind_rank(b.kind_);
  }
  if (a.lit_ != b.lit_) return a.lit_ < b.lit_;
  return std::lexicographical_compare(a.children_.begin(), a.children_.end(), b.children_.begin(),
                                      b.children_.end());
}

namespace {

Formula substitute(const Formula& f, const LiteralSet& context) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Lit:
      if (context.contains(f.lit())) return Formula::top();
      if (context.contains(f.lit().complement())) return Formula::bottom();
      return f;
    case K::Not:
      return Formula::negation(substitute(f.children().front(), context));
    case K::And:
    case K::Or: {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(substitute(c, context));
      return f.kind() == K::And ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    default:
      return f;
  }
}

}  // namespace

Formula simplify_under(const Formula& f, const LiteralSet& context) {
  return substitute(f.canonical(), context).canonical();
}

}  // namespace tierplan
