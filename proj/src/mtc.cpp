#include "tierplan/mtc.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace tierplan {

MtController::MtController(std::vector<std::string> tier_ids)
    : tier_ids_(std::move(tier_ids)), policies_(tier_ids_.size()) {}

void MtController::set(std::size_t tier, const State& s, std::vector<std::string> actions) {
  policies_.at(tier)[s] = std::move(actions);
}

const std::vector<std::string>* MtController::actions(std::size_t tier, const State& s) const {
  const auto& p = policies_.at(tier);
  auto it = p.find(s);
  return it == p.end() ? nullptr : &it->second;
}

std::size_t MtController::size() const {
  std::size_t n = 0;
  for (const auto& p : policies_) n += p.size();
  return n;
}

MtController extract_mtc(const Policy& policy, const CompiledProblem& cp) {
  MtController out(cp.tier_ids);
  for (const auto& [s, entry] : policy.entries()) {
    const auto tier = cp.tier_of(s);
    if (!tier || cp.acting_state(s, *tier) != s) continue;
    const auto* prov = cp.origin(entry.action);
    if (!prov) continue;
    if (prov->role == Role::FairAct)
      out.set(*tier, s.projected(cp.base_atoms), {prov->source});
    else if (prov->role == Role::CheckGoal)
      out.set(*tier, s.projected(cp.base_atoms), {});
  }
  return out;
}

namespace {

using Mask = std::uint64_t;

Mask bit(std::size_t t) { return Mask{1} << t; }

}  // namespace

TriggerMap triggering_states(const MtpProblem& p, const MtController& mtc) {
  const std::size_t n = p.tiers.size();
  if (n > 64) throw Error("at most 64 tiers are supported");
  const Mask all = n == 64 ? ~Mask{0} : bit(n) - 1;
  TriggerMap trig(n);
  const std::size_t top = p.top();
  trig[top].insert(p.initial);
  std::deque<std::pair<std::size_t, State>> work{{top, p.initial}};

  while (!work.empty()) {
    const auto [cur, start] = work.front();
    work.pop_front();
    std::set<std::pair<State, Mask>> seen{{start, all}};
    std::deque<std::pair<State, Mask>> frontier{{start, all}};
    while (!frontier.empty()) {
      const auto [t, mask] = frontier.front();
      frontier.pop_front();
      if (p.tiers[cur].goal.holds(t)) continue;
      const auto* acts = mtc.actions(cur, t);
      if (!acts) continue;
      for (const auto& o : *acts) {
        std::vector<std::vector<State>> succ(n);
        std::set<State> all_succ;
        for (std::size_t x = 0; x < n; ++x) {
          const auto* op = p.tiers[x].domain.find(o);
          if (!op || !op->applicable(t)) continue;
          succ[x] = successors(*op, t);
          all_succ.insert(succ[x].begin(), succ[x].end());
        }
        for (const auto& u : all_succ) {
          Mask legal = 0;
          for (std::size_t x = 0; x < n; ++x)
            if (std::binary_search(succ[x].begin(), succ[x].end(), u)) legal |= bit(x);
          const Mask next = mask & legal;
          if (next == 0)
            throw EscapesAllTiers("transition " + to_string(t, *p.vocab) + " --" + o + "-> " +
                                  to_string(u, *p.vocab) + " is legal in no tier");
          if (next & bit(cur)) {
            if (seen.insert({u, next}).second) frontier.push_back({u, next});
            continue;
          }
          for (std::size_t d = 0; d < n; ++d) {
            if (!(next & bit(d)) || !p.order.less(d, cur)) continue;
            bool higher = false;
            for (std::size_t h = 0; h < n && !higher; ++h) higher = (next & bit(h)) && p.order.less(d, h);
            if (higher) continue;
            if (trig[d].insert(u).second) work.push_back({d, u});
          }
        }
      }
    }
  }
  return trig;
}

namespace {

// Strong-cyclic check of a set-valued tier policy from `start`: no dead ends
// and no fair end component among the non-goal states.
std::string check_tier_policy(const MtpProblem& p, std::size_t tier, const MtController& mtc, const State& start) {
  const auto& dom = p.tiers[tier].domain;
  const auto& goal = p.tiers[tier].goal;
  const auto& vocab = *p.vocab;
  std::vector<State> states{start};
  std::unordered_map<State, std::size_t, StateHash> index{{start, 0}};
  // Per state: one successor list per prescribed action.
  std::vector<std::vector<std::vector<std::size_t>>> moves;
  for (std::size_t i = 0; i < states.size(); ++i) {
    moves.emplace_back();
    const State s = states[i];
    if (goal.holds(s)) continue;
    const auto* acts = mtc.actions(tier, s);
    if (!acts || acts->empty()) return "no action prescribed in non-goal state " + to_string(s, vocab);
    for (const auto& o : *acts) {
      const auto* op = dom.find(o);
      if (!op) return "unknown operator '" + o + "' prescribed in " + to_string(s, vocab);
      if (!op->applicable(s)) return "operator '" + o + "' is not applicable in " + to_string(s, vocab);
      std::vector<std::size_t> succ;
      for (const auto& t : successors(*op, s)) {
        auto [it, fresh] = index.emplace(t, states.size());
        if (fresh) states.push_back(t);
        succ.push_back(it->second);
      }
      moves[i].push_back(std::move(succ));
    }
  }

  const std::size_t n = states.size();
  std::vector<bool> alive(n);
  for (std::size_t i = 0; i < n; ++i) alive[i] = !goal.holds(states[i]);
  // Fair end components: drop actions that can leave the component of their
  // state, then states left without actions, until nothing changes.
  std::vector<std::vector<bool>> kept(n);
  for (std::size_t i = 0; i < n; ++i) kept[i].assign(moves[i].size(), alive[i]);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      std::deque<std::size_t> q{i};
      while (!q.empty()) {
        const auto v = q.front();
        q.pop_front();
        for (std::size_t a = 0; a < moves[v].size(); ++a) {
          if (!kept[v][a]) continue;
          for (auto w : moves[v][a])
            if (alive[w] && !reach[i][w]) {
              reach[i][w] = true;
              q.push_back(w);
            }
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      bool any = false;
      for (std::size_t a = 0; a < moves[i].size(); ++a) {
        if (!kept[i][a]) continue;
        const auto& succ = moves[i][a];
        if (!std::all_of(succ.begin(), succ.end(),
                         [&](std::size_t j) { return alive[j] && reach[i][j] && reach[j][i]; })) {
          kept[i][a] = false;
          changed = true;
        } else {
          any = true;
        }
      }
      if (!any) {
        alive[i] = false;
        changed = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (alive[i]) return "execution can cycle forever without reaching the goal through " + to_string(states[i], vocab);
  return {};
}

}  // namespace

MtcReport verify_mtc(const MtpProblem& p, const MtController& mtc) {
  MtcReport r;
  r.triggers = triggering_states(p, mtc);
  for (std::size_t d = 0; d < p.tiers.size(); ++d) {
    for (const auto& s : r.triggers[d]) {
      auto diag = check_tier_policy(p, d, mtc, s);
      if (diag.empty()) continue;
      r.ok = false;
      r.failures.push_back({p.tiers[d].id, s, std::move(diag)});
    }
  }
  return r;
}

std::string to_text(const MtcReport& r, const MtpProblem& p) {
  std::ostringstream out;
  out << (r.ok ? "MTC is a solution controller" : "MTC is NOT a solution controller") << "\n";
  for (std::size_t d = 0; d < p.tiers.size(); ++d) {
    out << "  tier " << p.tiers[d].id << ": " << r.triggers[d].size() << " triggering state(s)\n";
    for (const auto& s : r.triggers[d]) out << "    " << to_string(s, *p.vocab) << "\n";
  }
  for (const auto& f : r.failures)
    out << "  FAIL tier " << f.tier << " from " << to_string(f.trigger, *p.vocab) << ": " << f.diagnosis << "\n";
  return out.str();
}

}  // namespace tierplan
