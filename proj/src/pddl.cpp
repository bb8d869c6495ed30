#include "tierplan/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "tierplan/error.hpp"

namespace tierplan::pddl {

namespace {

struct Sexp {
  bool is_atom = false;
  std::string text;
  std::vector<Sexp> items;
  std::size_t line = 1;
  std::size_t col = 1;

  bool is_list() const { return !is_atom; }
  const std::string& head() const {
    static const std::string none;
    return items.empty() || !items.front().is_atom ? none : items.front().text;
  }
};

class Reader {
 public:
  Reader(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    skip();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip();
    }
    return out;
  }

  [[noreturn]] void fail(const Sexp& at, const std::string& what) const {
    throw ParseError(file_, at.line, at.col, what);
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Sexp read() {
    Sexp node;
    node.line = line_;
    node.col = col_;
    const char c = text_[pos_];
    if (c == ')') throw ParseError(file_, line_, col_, "unexpected ')'");
    if (c == '(') {
      advance();
      skip();
      while (true) {
        if (pos_ >= text_.size()) throw ParseError(file_, node.line, node.col, "unbalanced '('");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        node.items.push_back(read());
        skip();
      }
      return node;
    }
    node.is_atom = true;
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      node.text.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(d))));
      advance();
    }
    return node;
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

bool is_variable(const std::string& s) { return !s.empty() && s.front() == '?'; }

class DomainParser {
 public:
  DomainParser(Reader& reader, std::string file) : reader_(reader), file_(std::move(file)) {}

  SchemaDomain parse(const std::vector<Sexp>& top) {
    std::vector<const Sexp*> sections;
    if (top.size() == 1 && top.front().is_list() && top.front().head() == "define") {
      for (std::size_t i = 1; i < top.front().items.size(); ++i) sections.push_back(&top.front().items[i]);
    } else {
      for (const auto& s : top) sections.push_back(&s);
    }
    for (const auto* s : sections) section(*s);
    finish();
    return std::move(d_);
  }

 private:
  [[noreturn]] void unsupported(const Sexp& at, const std::string& construct) const {
    throw UnsupportedConstruct(file_, at.line, at.col, construct);
  }

  const Sexp& expect_list(const Sexp& s, const char* what) const {
    if (!s.is_list()) reader_.fail(s, std::string("expected ") + what);
    return s;
  }

  const std::string& expect_atom(const Sexp& s, const char* what) const {
    if (!s.is_atom) reader_.fail(s, std::string("expected ") + what);
    return s.text;
  }

  void section(const Sexp& s) {
    if (!s.is_list() || s.items.empty()) reader_.fail(s, "expected a section");
    const auto& h = s.head();
    if (h == "domain") {
      if (s.items.size() != 2) reader_.fail(s, "expected (domain <name>)");
      d_.name = expect_atom(s.items[1], "domain name");
    } else if (h == ":requirements") {
      for (std::size_t i = 1; i < s.items.size(); ++i) d_.requirements.push_back(expect_atom(s.items[i], "requirement"));
    } else if (h == ":types") {
      d_.types = typed_list(s, 1);
      has_types_ = true;
    } else if (h == ":constants") {
      d_.constants = typed_list(s, 1);
    } else if (h == ":predicates") {
      has_predicates_ = true;
      for (std::size_t i = 1; i < s.items.size(); ++i) {
        const auto& p = expect_list(s.items[i], "predicate declaration");
        if (p.items.empty()) reader_.fail(p, "empty predicate declaration");
        PredicateDecl decl{expect_atom(p.items[0], "predicate name"), typed_list(p, 1)};
        d_.predicates.push_back(std::move(decl));
      }
    } else if (h == ":action") {
      action(s);
    } else if (h == ":functions") {
      unsupported(s, "numeric fluents (:functions)");
    } else if (h == ":durative-action" || h == ":derived" || h == ":constraints") {
      unsupported(s, h);
    } else if (h == ":goal" || h == ":init" || h == ":objects") {
      unsupported(s, h + " in a domain file");
    } else {
      reader_.fail(s, "unknown section '" + h + "'");
    }
  }

  std::vector<TypedName> typed_list(const Sexp& s, std::size_t from) const {
    std::vector<TypedName> out;
    std::size_t pending = 0;
    for (std::size_t i = from; i < s.items.size(); ++i) {
      const auto& it = s.items[i];
      if (it.is_atom && it.text == "-") {
        if (i + 1 >= s.items.size()) reader_.fail(it, "missing type after '-'");
        const auto& t = s.items[i + 1];
        if (t.is_list()) unsupported(t, t.head().empty() ? "compound type" : t.head());
        for (std::size_t k = out.size() - pending; k < out.size(); ++k) out[k].type = t.text;
        pending = 0;
        ++i;
        continue;
      }
      out.push_back({expect_atom(it, "name"), "object"});
      ++pending;
    }
    return out;
  }

  SchemaAtom atom(const Sexp& s) const {
    if (s.items.empty()) reader_.fail(s, "empty atom");
    SchemaAtom a{expect_atom(s.items[0], "predicate"), {}};
    for (std::size_t i = 1; i < s.items.size(); ++i) a.args.push_back(expect_atom(s.items[i], "term"));
    note_use(a, s);
    return a;
  }

  void note_use(const SchemaAtom& a, const Sexp& at) const {
    uses_.push_back({a, at.line, at.col});
  }

  SchemaFormula condition(const Sexp& s) const {
    expect_list(s, "condition");
    const auto& h = s.head();
    SchemaFormula f;
    if (h == "and" || h == "or") {
      f.kind = h == "and" ? SchemaFormula::Kind::And : SchemaFormula::Kind::Or;
      for (std::size_t i = 1; i < s.items.size(); ++i) f.children.push_back(condition(s.items[i]));
    } else if (h == "not") {
      if (s.items.size() != 2) reader_.fail(s, "'not' takes one argument");
      f.kind = SchemaFormula::Kind::Not;
      f.children.push_back(condition(s.items[1]));
    } else if (h == "imply" || h == "exists" || h == "forall" || h == "=" || h == "when" || h == "oneof") {
      unsupported(s, h);
    } else if (h == "<" || h == ">" || h == "<=" || h == ">=") {
      unsupported(s, "numeric comparison '" + h + "'");
    } else {
      f.kind = SchemaFormula::Kind::Atom;
      f.atom = atom(s);
    }
    return f;
  }

  void effect_literals(const Sexp& s, std::vector<SchemaLiteral>& out) const {
    expect_list(s, "effect");
    const auto& h = s.head();
    if (h == "and") {
      for (std::size_t i = 1; i < s.items.size(); ++i) effect_literals(s.items[i], out);
    } else if (h == "not") {
      if (s.items.size() != 2) reader_.fail(s, "'not' takes one argument");
      const auto& inner = expect_list(s.items[1], "atom");
      if (inner.head() == "and" || inner.head() == "not") reader_.fail(inner, "expected an atom under 'not'");
      out.push_back({atom(inner), false});
    } else if (h == "when") {
      unsupported(s, "conditional effect (when)");
    } else if (h == "oneof") {
      unsupported(s, "nested oneof");
    } else if (h == "forall" || h == "increase" || h == "decrease" || h == "assign" || h == "scale-up" ||
               h == "scale-down" || h == "probabilistic") {
      unsupported(s, h);
    } else {
      out.push_back({atom(s), true});
    }
  }

  void action(const Sexp& s) {
    if (s.items.size() < 2) reader_.fail(s, "action without a name");
    SchemaAction a;
    a.name = expect_atom(s.items[1], "action name");
    bool has_effect = false;
    for (std::size_t i = 2; i < s.items.size(); i += 2) {
      const auto& key = expect_atom(s.items[i], "action keyword");
      if (i + 1 >= s.items.size()) reader_.fail(s.items[i], "missing value for " + key);
      const auto& val = s.items[i + 1];
      if (key == ":parameters") {
        a.params = typed_list(expect_list(val, "parameter list"), 0);
      } else if (key == ":precondition") {
        a.precondition = condition(val);
      } else if (key == ":effect") {
        has_effect = true;
        expect_list(val, "effect");
        if (val.head() == "oneof") {
          for (std::size_t k = 1; k < val.items.size(); ++k) {
            std::vector<SchemaLiteral> branch;
            effect_literals(val.items[k], branch);
            a.branches.push_back(std::move(branch));
          }
          if (a.branches.empty()) reader_.fail(val, "oneof without branches");
        } else {
          std::vector<SchemaLiteral> branch;
          effect_literals(val, branch);
          a.branches.push_back(std::move(branch));
        }
      } else if (key == ":observe" || key == ":duration") {
        unsupported(val, key);
      } else {
        reader_.fail(s.items[i], "unknown action keyword '" + key + "'");
      }
    }
    if (!has_effect) a.branches.push_back({});
    for (const auto& other : d_.actions)
      if (other.name == a.name) reader_.fail(s, "duplicate action '" + a.name + "'");
    check_variables(a, s);
    d_.actions.push_back(std::move(a));
  }

  void check_variables(const SchemaAction& a, const Sexp& at) const {
    std::set<std::string> vars;
    for (const auto& p : a.params) {
      if (!is_variable(p.name)) reader_.fail(at, "parameter '" + p.name + "' of '" + a.name + "' must start with '?'");
      vars.insert(p.name);
    }
    auto check = [&](const SchemaAtom& x) {
      for (const auto& t : x.args)
        if (is_variable(t) && !vars.count(t))
          reader_.fail(at, "undeclared variable '" + t + "' in action '" + a.name + "'");
    };
    std::vector<const SchemaFormula*> stack{&a.precondition};
    while (!stack.empty()) {
      const auto* f = stack.back();
      stack.pop_back();
      if (f->kind == SchemaFormula::Kind::Atom) check(f->atom);
      for (const auto& c : f->children) stack.push_back(&c);
    }
    for (const auto& b : a.branches)
      for (const auto& l : b) check(l.atom);
  }

  void finish() {
    std::map<std::string, std::size_t> arity;
    if (has_types_) {
      std::set<std::string> known{"object"};
      for (const auto& t : d_.types) known.insert(t.name);
      auto check_type = [&](const std::string& t, const std::string& where) {
        if (!known.count(t)) throw ParseError(file_, 1, 1, "unknown type '" + t + "' in " + where);
      };
      for (const auto& t : d_.types) check_type(t.type, "type declaration");
      for (const auto& c : d_.constants) check_type(c.type, "constant '" + c.name + "'");
      for (const auto& p : d_.predicates)
        for (const auto& x : p.params) check_type(x.type, "predicate '" + p.name + "'");
      for (const auto& a : d_.actions)
        for (const auto& x : a.params) check_type(x.type, "action '" + a.name + "'");
    }
    for (const auto& p : d_.predicates) arity[p.name] = p.params.size();
    for (const auto& u : uses_) {
      auto it = arity.find(u.atom.predicate);
      if (it == arity.end()) {
        if (has_predicates_)
          throw ParseError(file_, u.line, u.col, "undeclared predicate '" + u.atom.predicate + "'");
        PredicateDecl decl{u.atom.predicate, {}};
        for (std::size_t i = 0; i < u.atom.args.size(); ++i) decl.params.push_back({"?x" + std::to_string(i), "object"});
        d_.predicates.push_back(decl);
        arity[u.atom.predicate] = u.atom.args.size();
      } else if (it->second != u.atom.args.size()) {
        throw ParseError(file_, u.line, u.col,
                         "predicate '" + u.atom.predicate + "' expects " + std::to_string(it->second) + " arguments");
      }
    }
  }

  struct Use {
    SchemaAtom atom;
    std::size_t line;
    std::size_t col;
  };

  Reader& reader_;
  std::string file_;
  SchemaDomain d_;
  bool has_types_ = false;
  bool has_predicates_ = false;
  mutable std::vector<Use> uses_;
};

}  // namespace

const SchemaAction* SchemaDomain::find_action(std::string_view n) const {
  for (const auto& a : actions)
    if (a.name == n) return &a;
  return nullptr;
}

std::set<std::string> SchemaDomain::fluent_predicates() const {
  std::set<std::string> out;
  for (const auto& a : actions)
    for (const auto& b : a.branches)
      for (const auto& l : b) out.insert(l.atom.predicate);
  return out;
}

SchemaDomain parse_domain(std::string_view text, const std::string& file) {
  Reader reader(text, file);
  auto top = reader.read_all();
  DomainParser parser(reader, file);
  return parser.parse(top);
}

// -- grounding --------------------------------------------------------------

namespace {

class TypeTable {
 public:
  TypeTable(const std::vector<const SchemaDomain*>& schemas, const std::vector<TypedName>& objects) {
    bool typed = false;
    for (const auto* s : schemas) {
      for (const auto& t : s->types) {
        parent_[t.name] = t.type;
        typed = true;
      }
    }
    parent_["object"] = "";
    auto add_object = [&](const TypedName& o) {
      if (typed && !parent_.count(o.type)) throw Error("unknown type '" + o.type + "' for object '" + o.name + "'");
      if (!typed) parent_.emplace(o.type, "object");
      auto [it, fresh] = object_type_.emplace(o.name, o.type);
      if (!fresh && it->second != o.type) throw Error("object '" + o.name + "' declared with two types");
    };
    for (const auto& o : objects) add_object(o);
    for (const auto* s : schemas)
      for (const auto& c : s->constants) add_object(c);
  }

  bool is_a(const std::string& type, const std::string& target) const {
    for (std::string t = type; !t.empty();) {
      if (t == target) return true;
      auto it = parent_.find(t);
      if (it == parent_.end()) break;
      t = it->second;
    }
    return target == "object";
  }

  void require_type(const std::string& t) const {
    if (!parent_.count(t)) throw Error("unknown type '" + t + "'");
  }

  bool known_object(const std::string& o) const { return object_type_.count(o) > 0; }

  std::vector<std::string> objects_of(const std::string& type) const {
    require_type(type);
    std::vector<std::string> out;
    for (const auto& [name, t] : object_type_)
      if (is_a(t, type)) out.push_back(name);
    return out;  // map order: sorted
  }

 private:
  std::map<std::string, std::string> parent_;
  std::map<std::string, std::string> object_type_;
};

template <class F>
void for_each_binding(const std::vector<std::vector<std::string>>& domains, F&& f) {
  std::vector<std::string> current(domains.size());
  std::vector<std::size_t> idx(domains.size(), 0);
  for (const auto& d : domains)
    if (d.empty()) return;
  while (true) {
    for (std::size_t i = 0; i < domains.size(); ++i) current[i] = domains[i][idx[i]];
    f(current);
    std::size_t k = domains.size();
    while (k > 0) {
      --k;
      if (++idx[k] < domains[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (domains.empty()) return;
  }
}

class Grounder {
 public:
  Grounder(const SchemaDomain& schema, const TypeTable& types, const std::set<std::string>& fluents,
           const std::set<std::string>& statics, const VocabularyPtr& vocab)
      : schema_(schema), types_(types), fluents_(fluents), statics_(statics), vocab_(vocab) {}

  std::vector<GroundOperator> run() {
    std::vector<GroundOperator> ops;
    for (const auto& a : schema_.actions) {
      std::vector<std::vector<std::string>> domains;
      for (const auto& p : a.params) domains.push_back(types_.objects_of(p.type));
      for_each_binding(domains, [&](const std::vector<std::string>& args) {
        if (auto op = instantiate(a, args)) ops.push_back(std::move(*op));
      });
    }
    canonicalize(ops);
    return ops;
  }

 private:
  GroundAtom bind(const SchemaAtom& a, const std::map<std::string, std::string>& sub) const {
    GroundAtom g{a.predicate, {}};
    for (const auto& t : a.args) {
      if (is_variable(t)) {
        g.args.push_back(sub.at(t));
      } else {
        if (!types_.known_object(t)) throw Error("unknown object '" + t + "'");
        g.args.push_back(t);
      }
    }
    return g;
  }

  AtomId fluent_id(const GroundAtom& g) const {
    if (auto id = vocab_->find(g)) return *id;
    throw Error("atom " + g.str() + " is outside the fluent vocabulary (type mismatch?)");
  }

  Formula condition(const SchemaFormula& f, const std::map<std::string, std::string>& sub) const {
    using K = SchemaFormula::Kind;
    switch (f.kind) {
      case K::True:
        return Formula::top();
      case K::Atom: {
        auto g = bind(f.atom, sub);
        if (!fluents_.count(g.predicate)) return statics_.count(g.str()) ? Formula::top() : Formula::bottom();
        return Formula::atom(fluent_id(g));
      }
      case K::Not:
        return Formula::negation(condition(f.children.front(), sub));
      case K::And:
      case K::Or: {
        std::vector<Formula> cs;
        for (const auto& c : f.children) cs.push_back(condition(c, sub));
        return f.kind == K::And ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
      }
    }
    return Formula::top();
  }

  std::optional<GroundOperator> instantiate(const SchemaAction& a, const std::vector<std::string>& args) const {
    std::map<std::string, std::string> sub;
    for (std::size_t i = 0; i < a.params.size(); ++i) sub[a.params[i].name] = args[i];
    Formula pre = condition(a.precondition, sub).canonical();
    if (pre.is_false()) return std::nullopt;
    GroundOperator op;
    op.schema = a.name;
    op.args = args;
    op.name = a.name;
    for (const auto& x : args) op.name += "_" + x;
    op.precondition = std::move(pre);
    for (const auto& b : a.branches) {
      LiteralSet lits;
      for (const auto& l : b) lits.insert({fluent_id(bind(l.atom, sub)), l.positive});
      // Delete-then-add: an atom both deleted and added ends up true.
      std::vector<Literal> kept;
      for (auto l : lits)
        if (l.positive || !lits.contains(l.complement())) kept.push_back(l);
      op.branches.emplace_back(LiteralSet(std::move(kept)));
    }
    return op;
  }

  const SchemaDomain& schema_;
  const TypeTable& types_;
  const std::set<std::string>& fluents_;
  const std::set<std::string>& statics_;
  const VocabularyPtr& vocab_;
};

std::set<std::string> fluents_for(const SchemaDomain& schema, const GroundOptions& opt) {
  if (!opt.compile_statics) {
    std::set<std::string> all;
    for (const auto& p : schema.predicates) all.insert(p.name);
    return all;
  }
  return opt.fluents ? *opt.fluents : schema.fluent_predicates();
}

std::set<std::string> static_set(const std::vector<GroundAtom>& statics, const std::set<std::string>& fluents,
                                 const TypeTable& types) {
  std::set<std::string> out;
  for (const auto& s : statics) {
    if (fluents.count(s.predicate)) throw Error("static fact " + s.str() + " uses fluent predicate");
    for (const auto& a : s.args)
      if (!types.known_object(a)) throw Error("unknown object '" + a + "' in static fact " + s.str());
    out.insert(s.str());
  }
  return out;
}

}  // namespace

VocabularyPtr fluent_vocabulary(const std::vector<const SchemaDomain*>& schemas, const std::vector<TypedName>& objects,
                                const std::set<std::string>& fluents) {
  TypeTable types(schemas, objects);
  std::map<std::string, const PredicateDecl*> decls;
  for (const auto* s : schemas)
    for (const auto& p : s->predicates) decls.emplace(p.name, &p);
  std::vector<GroundAtom> atoms;
  for (const auto& [name, decl] : decls) {
    if (!fluents.count(name)) continue;
    std::vector<std::vector<std::string>> domains;
    for (const auto& p : decl->params) domains.push_back(types.objects_of(p.type));
    for_each_binding(domains, [&](const std::vector<std::string>& args) { atoms.push_back({name, args}); });
  }
  std::sort(atoms.begin(), atoms.end());
  return std::make_shared<const Vocabulary>(std::move(atoms));
}

FondDomain ground_into(const SchemaDomain& schema, const std::vector<TypedName>& objects,
                       const std::vector<GroundAtom>& statics, const GroundOptions& options,
                       const VocabularyPtr& vocab) {
  if (!options.compile_statics && !statics.empty()) throw Error("static facts given while statics are disabled");
  TypeTable types({&schema}, objects);
  const auto fluents = fluents_for(schema, options);
  const auto stat = static_set(statics, fluents, types);
  Grounder g(schema, types, fluents, stat, vocab);
  return FondDomain(vocab, g.run());
}

FondDomain ground(const SchemaDomain& schema, const std::vector<TypedName>& objects,
                  const std::vector<GroundAtom>& statics, const GroundOptions& options) {
  const auto fluents = fluents_for(schema, options);
  auto vocab = fluent_vocabulary({&schema}, objects, fluents);
  return ground_into(schema, objects, statics, options, vocab);
}

// -- printing ---------------------------------------------------------------

namespace {

std::string branch_text(const LiteralSet& lits, const Vocabulary& v) {
  if (lits.empty()) return "(and)";
  return to_string(lits, v);
}

std::string when_text(const ConditionalEffect& w, const Vocabulary& v) {
  return "(when " + w.condition.pddl(v) + " " + branch_text(w.effect, v) + ")";
}

std::string conditional_branch(const LiteralSet& rest, const std::vector<ConditionalEffect>& whens,
                               const Vocabulary& v) {
  std::vector<std::string> parts;
  for (auto l : rest) parts.push_back(to_string(l, v));
  for (const auto& w : whens) parts.push_back(when_text(w, v));
  if (parts.size() == 1) return parts.front();
  std::string out = "(and";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

std::string effect_text(const GroundOperator& op, const Vocabulary& v, PrintMode mode) {
  if (!op.conditional()) {
    if (op.branches.size() == 1) return branch_text(op.branches.front().literals, v);
    std::string out = "(oneof";
    for (const auto& b : op.branches) out += "\n        " + branch_text(b.literals, v);
    return out + ")";
  }
  if (mode == PrintMode::Oneof)
    throw Error("operator '" + op.name + "' has conditional effects; use conditional mode or flatten first");
  // Factor literals shared by every branch out of the oneof.
  std::vector<Literal> common = op.branches.front().literals.literals();
  for (const auto& b : op.branches) {
    std::vector<Literal> keep;
    for (auto l : common)
      if (b.literals.contains(l)) keep.push_back(l);
    common = std::move(keep);
  }
  const LiteralSet shared(common);
  std::vector<std::string> branches;
  for (const auto& b : op.branches) {
    std::vector<Literal> rest;
    for (auto l : b.literals)
      if (!shared.contains(l)) rest.push_back(l);
    branches.push_back(conditional_branch(LiteralSet(std::move(rest)), b.when, v));
  }
  std::string body;
  if (branches.size() == 1) {
    body = branches.front();
  } else {
    body = "(oneof";
    for (const auto& b : branches) body += "\n        " + b;
    body += ")";
  }
  if (shared.empty()) return body;
  std::string out = "(and";
  for (auto l : shared) out += " " + to_string(l, v);
  return out + "\n      " + body + ")";
}

}  // namespace

std::string print_domain(const FondDomain& domain, PrintMode mode, const std::string& name) {
  const auto& v = domain.vocab();
  std::map<std::string, std::size_t> preds;
  std::set<std::string> constants;
  for (const auto& a : v.atoms()) {
    preds.emplace(a.predicate, a.args.size());
    constants.insert(a.args.begin(), a.args.end());
  }
  std::ostringstream out;
  out << "(define (domain " << name << ")\n";
  out << "  (:requirements :strips :negative-preconditions :disjunctive-preconditions :non-deterministic";
  const bool conditional = std::any_of(domain.operators().begin(), domain.operators().end(),
                                       [](const GroundOperator& op) { return op.conditional(); });
  if (conditional && mode == PrintMode::Conditional) out << " :conditional-effects";
  out << ")\n";
  if (!constants.empty()) {
    out << "  (:constants";
    for (const auto& c : constants) out << " " << c;
    out << ")\n";
  }
  out << "  (:predicates";
  for (const auto& [p, n] : preds) {
    out << " (" << p;
    for (std::size_t i = 0; i < n; ++i) out << " ?x" << i;
    out << ")";
  }
  out << ")\n";
  for (const auto& op : domain.operators()) {
    out << "  (:action " << op.name << "\n";
    out << "    :parameters ()\n";
    out << "    :precondition " << op.precondition.pddl(v) << "\n";
    out << "    :effect " << effect_text(op, v, mode) << ")\n";
  }
  out << ")\n";
  return out.str();
}

namespace {

std::string typed(const std::vector<TypedName>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += " ";
    out += xs[i].name;
    if (i + 1 == xs.size() || xs[i + 1].type != xs[i].type) out += " - " + xs[i].type;
  }
  return out;
}

std::string schema_atom(const SchemaAtom& a) {
  std::string out = "(" + a.predicate;
  for (const auto& x : a.args) out += " " + x;
  return out + ")";
}

std::string schema_condition(const SchemaFormula& f) {
  using K = SchemaFormula::Kind;
  switch (f.kind) {
    case K::True:
      return "";
    case K::Atom:
      return schema_atom(f.atom);
    case K::Not:
      return "(not " + schema_condition(f.children.front()) + ")";
    case K::And:
    case K::Or: {
      std::string out = f.kind == K::And ? "(and" : "(or";
      for (const auto& c : f.children) out += " " + schema_condition(c);
      return out + ")";
    }
  }
  return {};
}

std::string schema_branch(const std::vector<SchemaLiteral>& b) {
  std::string out = "(and";
  for (const auto& l : b) out += " " + (l.positive ? schema_atom(l.atom) : "(not " + schema_atom(l.atom) + ")");
  return out + ")";
}

}  // namespace

std::string print_schema(const SchemaDomain& d) {
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    out << "  (:requirements";
    for (const auto& r : d.requirements) out << " " << r;
    out << ")\n";
  }
  if (!d.types.empty()) out << "  (:types " << typed(d.types) << ")\n";
  if (!d.constants.empty()) out << "  (:constants " << typed(d.constants) << ")\n";
  out << "  (:predicates";
  for (const auto& p : d.predicates) {
    out << " (" << p.name;
    if (!p.params.empty()) out << " " << typed(p.params);
    out << ")";
  }
  out << ")\n";
  for (const auto& a : d.actions) {
    out << "  (:action " << a.name << "\n";
    out << "    :parameters (" << typed(a.params) << ")\n";
    if (a.precondition.kind != SchemaFormula::Kind::True)
      out << "    :precondition " << schema_condition(a.precondition) << "\n";
    if (a.branches.size() == 1) {
      out << "    :effect " << schema_branch(a.branches.front()) << ")\n";
    } else {
      out << "    :effect (oneof";
      for (const auto& b : a.branches) out << "\n      " << schema_branch(b);
      out << "))\n";
    }
  }
  out << ")\n";
  return out.str();
}

std::string print_problem(const Vocabulary& vocab, const State& init, const Formula& goal,
                          const std::string& domain_name, const std::string& name) {
  std::ostringstream out;
  out << "(define (problem " << name << ")\n";
  out << "  (:domain " << domain_name << ")\n";
  out << "  (:init";
  for (auto a : init.atoms()) out << " " << vocab.name(a);
  out << ")\n";
  out << "  (:goal " << goal.pddl(vocab) << "))\n";
  return out.str();
}

namespace {

Formula ground_condition(const Sexp& s, const Vocabulary& vocab, const Reader& reader) {
  if (!s.is_list()) reader.fail(s, "expected a condition");
  const auto& h = s.head();
  if (h == "and" || h == "or") {
    std::vector<Formula> cs;
    for (std::size_t i = 1; i < s.items.size(); ++i) cs.push_back(ground_condition(s.items[i], vocab, reader));
    return h == "and" ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
  }
  if (h == "not") {
    if (s.items.size() != 2) reader.fail(s, "'not' takes one argument");
    return Formula::negation(ground_condition(s.items[1], vocab, reader));
  }
  GroundAtom g;
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (!s.items[i].is_atom) reader.fail(s.items[i], "expected a term");
    if (i == 0)
      g.predicate = s.items[i].text;
    else
      g.args.push_back(s.items[i].text);
  }
  auto id = vocab.find(g);
  if (!id) reader.fail(s, "unknown atom " + g.str());
  return Formula::atom(*id);
}

}  // namespace

Formula parse_condition(std::string_view text, const Vocabulary& vocab) {
  Reader reader(text, "<condition>");
  auto items = reader.read_all();
  if (items.size() != 1) throw ParseError("<condition>", 1, 1, "expected exactly one condition");
  return ground_condition(items.front(), vocab, reader);
}

}  // namespace tierplan::pddl
