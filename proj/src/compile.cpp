#include "tierplan/compile.hpp"

#include <algorithm>
#include <cstdio>

#include "tierplan/explain.hpp"

namespace tierplan {

std::string to_string(Role r) {
  switch (r) {
    case Role::FairAct:
      return "fair-act";
    case Role::UnfairAct:
      return "unfair-act";
    case Role::Continue:
      return "continue";
    case Role::Degrade:
      return "degrade";
    case Role::CheckGoal:
      return "checkgoal";
    case Role::ExplainedBy:
      return "explained-by";
  }
  return {};
}

std::vector<AtomId> CompiledProblem::bookkeeping() const {
  std::vector<AtomId> out(lvl.begin(), lvl.end());
  out.insert(out.end(), eps.begin(), eps.end());
  out.push_back(act);
  for (const auto& [_, id] : u) out.push_back(id);
  out.push_back(end);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> CompiledProblem::tier_of(const State& s) const {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < lvl.size(); ++i) {
    if (!s.contains(lvl[i])) continue;
    if (found) return std::nullopt;
    found = i;
  }
  return found;
}

State CompiledProblem::acting_state(const State& base, std::size_t tier) const {
  State s = base.projected(base_atoms);
  s.insert(lvl.at(tier));
  s.insert(act);
  return s;
}

std::string CompiledProblem::preference_key(const GroundOperator& op) const {
  const auto* p = origin(op.name);
  if (!p) return "9" + op.name;
  switch (p->role) {
    case Role::CheckGoal:
      return "0" + op.name;
    case Role::FairAct:
      return "1" + op.name;
    case Role::UnfairAct:
    case Role::ExplainedBy:
      return "2" + op.name;
    case Role::Continue:
      return "3" + op.name;
    case Role::Degrade: {
      std::size_t h = 0;
      for (std::size_t i = 0; i < tier_ids.size(); ++i)
        if (tier_ids[i] == p->target) h = tier_height[i];
      char buf[16];
      std::snprintf(buf, sizeof buf, "%06zu", 999999 - h);
      return "4" + std::string(buf) + op.name;
    }
  }
  return "9" + op.name;
}

const Provenance* CompiledProblem::origin(std::string_view op) const {
  auto it = provenance.find(std::string(op));
  return it == provenance.end() ? nullptr : &it->second;
}

Formula simplify_guard(const Formula& guard, const Formula& context) {
  LiteralSet known;
  for (const auto& c : context.canonical().conjuncts())
    if (c.kind() == Formula::Kind::Lit) known.insert(c.lit());
  return simplify_under(guard, known);
}

namespace {

Literal pos(AtomId a) { return {a, true}; }
Literal neg(AtomId a) { return {a, false}; }

bool has_branch(const GroundOperator& op, const LiteralSet& e) {
  return std::any_of(op.branches.begin(), op.branches.end(), [&](const Effect& b) { return b.literals == e; });
}

class Compiler {
 public:
  explicit Compiler(const MtpProblem& p) : p_(p) {}

  CompiledProblem run() {
    auto report = validate_mtp(p_);
    if (!report.ok()) throw ValidationFailed(std::move(report));
    build_vocabulary();
    const std::size_t top = p_.top();
    std::vector<GroundOperator> ops;
    for (std::size_t t = 0; t < p_.tiers.size(); ++t) {
      for (const auto& o : p_.tiers[t].domain.operators()) ops.push_back(fair_op(o, t));
      ops.push_back(continue_op(t));
      ops.push_back(checkgoal_op(t));
    }
    for (const auto& o : p_.tiers[top].domain.operators()) ops.push_back(unfair_op(o.name));
    for (auto [lo, hi] : p_.order.strict_pairs()) ops.push_back(degrade_op(hi, lo));
    canonicalize(ops);

    cp_.problem.domain = FondDomain(vocab_, std::move(ops));
    cp_.problem.initial = p_.initial;
    cp_.problem.initial.insert(cp_.lvl[top]);
    cp_.problem.initial.insert(cp_.act);
    cp_.problem.goal = Formula::atom(cp_.end);
    std::set<std::string, std::less<>> unfair;
    for (const auto& [name, prov] : cp_.provenance)
      if (prov.role == Role::UnfairAct) unfair.insert(name);
    cp_.fairness = Fairness::mixed(std::move(unfair));
    return std::move(cp_);
  }

 private:
  void build_vocabulary() {
    auto v = std::make_shared<Vocabulary>(p_.vocab->atoms());
    cp_.base_atoms = v->size();
    for (const auto& t : p_.tiers) {
      cp_.tier_ids.push_back(t.id);
      cp_.tier_height.push_back(p_.order.height(cp_.tier_ids.size() - 1));
    }
    for (const auto& t : p_.tiers) cp_.lvl.push_back(v->add({"lvl-" + t.id, {}}));
    for (const auto& t : p_.tiers) cp_.eps.push_back(v->add({"eps-" + t.id, {}}));
    cp_.act = v->add({"act", {}});
    for (const auto& s : p_.tiers[p_.top()].domain.schemas()) cp_.u[s] = v->add({"u-" + s, {}});
    cp_.end = v->add({"end", {}});
    vocab_ = v;
  }

  AtomId u_of(const GroundOperator& o) const { return cp_.u.at(o.schema); }

  Formula acting_guard(std::size_t tier) const {
    std::vector<Formula> cs{Formula::atom(cp_.lvl[tier]), Formula::atom(cp_.act)};
    for (const auto& [_, id] : cp_.u) cs.push_back(Formula::atom(id, false));
    cs.push_back(Formula::atom(cp_.end, false));
    return Formula::conj(std::move(cs));
  }

  GroundOperator fair_op(const GroundOperator& o, std::size_t t) {
    const auto& id = p_.tiers[t].id;
    GroundOperator f;
    f.name = o.name + "_" + id;
    f.schema = o.schema + "_" + id;
    f.args = o.args;
    f.precondition = Formula::conj({o.precondition, acting_guard(t)}).canonical();
    f.branches = o.branches;
    f.branches.emplace_back(LiteralSet{pos(u_of(o))});
    cp_.provenance[f.name] = {Role::FairAct, o.name, id, {}, {}};
    return f;
  }

  Formula eps_disjunction(const std::vector<std::size_t>& tiers) const {
    std::vector<Formula> ds;
    for (auto t : tiers) ds.push_back(Formula::atom(cp_.eps[t]));
    return Formula::disj(std::move(ds));
  }

  LiteralSet reset_eps() const {
    LiteralSet out;
    for (auto e : cp_.eps) out.insert(neg(e));
    return out;
  }

  GroundOperator continue_op(std::size_t t) {
    std::vector<std::size_t> above;
    for (std::size_t x = 0; x < p_.tiers.size(); ++x)
      if (p_.order.leq(t, x)) above.push_back(x);
    GroundOperator c;
    c.name = c.schema = "continue_" + p_.tiers[t].id;
    c.precondition = Formula::conj({Formula::atom(cp_.act, false), Formula::atom(cp_.lvl[t]),
                                    eps_disjunction(above), Formula::atom(cp_.end, false)})
                         .canonical();
    LiteralSet eff = reset_eps();
    eff.insert(pos(cp_.act));
    c.branches.emplace_back(std::move(eff));
    cp_.provenance[c.name] = {Role::Continue, {}, p_.tiers[t].id, {}, {}};
    return c;
  }

  // Degrade from `from` to the strictly lower `to` when the last effect was
  // explained by `to` or by a tier above `to` that neither lies strictly
  // between the two nor is above `from`.
  GroundOperator degrade_op(std::size_t from, std::size_t to) {
    const auto& ord = p_.order;
    std::vector<std::size_t> explainers;
    for (std::size_t x = 0; x < p_.tiers.size(); ++x) {
      if (!ord.leq(to, x) || ord.leq(from, x)) continue;
      if (ord.less(to, x) && ord.less(x, from)) continue;
      explainers.push_back(x);
    }
    GroundOperator d;
    d.name = d.schema = "degrade_" + p_.tiers[from].id + "_" + p_.tiers[to].id;
    d.precondition = Formula::conj({Formula::atom(cp_.act, false), Formula::atom(cp_.lvl[from]),
                                    eps_disjunction(explainers), Formula::atom(cp_.end, false)})
                         .canonical();
    LiteralSet eff = reset_eps();
    eff.insert(neg(cp_.lvl[from]));
    eff.insert(pos(cp_.lvl[to]));
    eff.insert(pos(cp_.act));
    d.branches.emplace_back(std::move(eff));
    cp_.provenance[d.name] = {Role::Degrade, {}, p_.tiers[from].id, p_.tiers[to].id, {}};
    return d;
  }

  GroundOperator checkgoal_op(std::size_t t) {
    GroundOperator g;
    g.name = g.schema = "checkgoal_" + p_.tiers[t].id;
    g.precondition = Formula::conj({p_.tiers[t].goal, acting_guard(t)}).canonical();
    g.branches.emplace_back(LiteralSet{pos(cp_.end)});
    cp_.provenance[g.name] = {Role::CheckGoal, {}, p_.tiers[t].id, {}, {}};
    return g;
  }

  GroundOperator unfair_op(const std::string& name) {
    const auto& ord = p_.order;
    const std::size_t n = p_.tiers.size();
    const GroundOperator& base = p_.tiers[p_.top()].domain.at(name);
    const AtomId u = u_of(base);

    GroundOperator x;
    x.name = name + "_unfair";
    x.schema = base.schema + "_unfair";
    x.args = base.args;
    x.precondition = Formula::conj({Formula::atom(cp_.act), Formula::atom(u), base.precondition,
                                    Formula::atom(cp_.end, false)})
                         .canonical();

    struct Branch {
      Effect effect;
      std::string label;
    };
    std::vector<Branch> branches;
    for (auto d : ord.bottom_up()) {
      const auto& od = p_.tiers[d].domain.at(name);
      for (const auto& e : od.branches) {
        bool older = false;
        for (std::size_t lo = 0; lo < n && !older; ++lo)
          older = ord.less(lo, d) && has_branch(p_.tiers[lo].domain.at(name), e.literals);
        if (older) continue;

        std::vector<Formula> expl(n);
        for (std::size_t t = 0; t < n; ++t) expl[t] = explains_formula(p_.tiers[t].domain.at(name), e.literals);
        Effect b(LiteralSet{neg(cp_.act), neg(u)});
        for (std::size_t t = 0; t < n; ++t) {
          if (!ord.leq(d, t)) continue;
          std::vector<Formula> c{expl[t]};
          for (std::size_t hi = 0; hi < n; ++hi)
            if (ord.less(t, hi)) c.push_back(Formula::negation(expl[hi]));
          Formula guard = simplify_guard(Formula::conj(std::move(c)), x.precondition);
          if (guard.is_false()) continue;
          LiteralSet eff = e.literals;
          eff.insert(pos(cp_.eps[t]));
          b.when.push_back({std::move(guard), std::move(eff)});
        }
        std::size_t h = 0;
        for (std::size_t t = 0; t < n; ++t)
          if (has_branch(p_.tiers[t].domain.at(name), e.literals)) h = std::max(h, cp_.tier_height[t]);
        branches.push_back({std::move(b), "e" + std::to_string(h + 1)});
      }
    }
    std::sort(branches.begin(), branches.end(), [](const Branch& a, const Branch& b) { return a.effect < b.effect; });
    std::map<std::string, int> seen;
    auto& labels = cp_.branch_labels[x.name];
    for (auto& b : branches) {
      const int k = ++seen[b.label];
      labels.push_back(k == 1 ? b.label : b.label + "_" + std::to_string(k));
      x.branches.push_back(std::move(b.effect));
    }
    cp_.provenance[x.name] = {Role::UnfairAct, name, {}, {}, {}};
    return x;
  }

  const MtpProblem& p_;
  CompiledProblem cp_;
  VocabularyPtr vocab_;
};

}  // namespace

CompiledProblem compile(const MtpProblem& problem) { return Compiler(problem).run(); }

CompiledProblem flatten(const CompiledProblem& in) {
  const auto& ops = in.domain().operators();
  if (std::none_of(ops.begin(), ops.end(), [](const GroundOperator& o) { return o.conditional(); })) return in;

  CompiledProblem out = in;
  auto v = std::make_shared<Vocabulary>(in.domain().vocab().atoms());
  std::vector<GroundOperator> flat;
  std::set<std::string, std::less<>> unfair;
  for (const auto& op : ops) {
    if (!op.conditional()) {
      flat.push_back(op);
      if (in.fairness.is_unfair(op.name)) unfair.insert(op.name);
      continue;
    }
    const auto* prov = in.origin(op.name);
    const std::string source = prov ? prov->source : op.name;
    const auto labels_it = in.branch_labels.find(op.name);
    // Source precondition: the unfair precondition minus its bookkeeping conjuncts.
    std::vector<Formula> keep;
    for (const auto& c : op.precondition.conjuncts()) {
      std::set<AtomId> atoms;
      c.collect_atoms(atoms);
      if (std::none_of(atoms.begin(), atoms.end(), [&](AtomId a) { return a >= in.base_atoms; })) keep.push_back(c);
    }
    const Formula source_pre = Formula::conj(std::move(keep)).canonical();

    GroundOperator head = op;
    head.branches.clear();
    for (std::size_t k = 0; k < op.branches.size(); ++k) {
      const auto& b = op.branches[k];
      const std::string label = labels_it != in.branch_labels.end() && k < labels_it->second.size()
                                    ? labels_it->second[k]
                                    : "b" + std::to_string(k);
      const AtomId marker = v->add({"eff-" + label + "-" + source, {}});
      out.markers.push_back(marker);
      Effect hb(b.literals);
      hb.literals.insert({marker, true});
      head.branches.push_back(std::move(hb));
      for (const auto& w : b.when) {
        std::string tier;
        for (std::size_t t = 0; t < in.eps.size(); ++t)
          if (w.effect.contains({in.eps[t], true})) tier = in.tier_ids[t];
        GroundOperator e;
        e.name = source + "_" + label + "_explained_by_" + tier;
        e.schema = e.name;
        e.precondition = Formula::conj({w.condition, Formula::atom(marker), source_pre, Formula::atom(in.end, false)})
                             .canonical();
        LiteralSet eff = w.effect;
        eff.insert({marker, false});
        e.branches.emplace_back(std::move(eff));
        out.provenance[e.name] = {Role::ExplainedBy, source, tier, {}, label};
        flat.push_back(std::move(e));
      }
    }
    unfair.insert(head.name);
    flat.push_back(std::move(head));
  }
  canonicalize(flat);
  out.problem.domain = FondDomain(v, std::move(flat));
  out.fairness = Fairness::mixed(std::move(unfair));
  out.flattened = true;
  out.branch_labels.clear();
  return out;
}

}  // namespace tierplan
