#include "tierplan/sim.hpp"

#include <algorithm>

namespace tierplan {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::Step:
      return "step";
    case EventKind::Degrade:
      return "degrade";
    case EventKind::Goal:
      return "goal";
    case EventKind::Stuck:
      return "stuck";
    case EventKind::Cap:
      return "step-cap";
  }
  return {};
}

std::size_t ScriptedChooser::choose(const ChoiceContext&) {
  if (next_ >= script_.size()) {
    ++next_;
    return 0;
  }
  return script_[next_++];
}

std::string ScriptedChooser::describe() const {
  std::string out = "scripted:[";
  for (std::size_t i = 0; i < script_.size(); ++i) out += (i ? "," : "") + std::to_string(script_[i]);
  return out + "]";
}

std::size_t RandomChooser::choose(const ChoiceContext& ctx) {
  std::uniform_int_distribution<std::size_t> pick(0, ctx.outcomes.size() - 1);
  return pick(rng_);
}

std::size_t AdversarialChooser::choose(const ChoiceContext& ctx) {
  const auto& order = ctx.problem.order;
  auto level = [&](const Outcome& o) {
    std::size_t h = 0;
    for (auto t : o.explained_by) h = std::max(h, order.height(t));
    return h;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < ctx.outcomes.size(); ++i)
    if (level(ctx.outcomes[i]) < level(ctx.outcomes[best])) best = i;
  return best;
}

std::vector<std::size_t> classify_transition(const MtpProblem& p, const State& s, std::string_view op,
                                             const State& next) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < p.tiers.size(); ++t) {
    const auto succ = successor_states(p.tiers[t].domain, s, op);
    if (std::binary_search(succ.begin(), succ.end(), next)) out.push_back(t);
  }
  return out;
}

std::optional<std::size_t> degrade_target(const MtpProblem& p, std::size_t current,
                                          const std::vector<std::size_t>& explained_by,
                                          std::vector<std::size_t>* tie) {
  std::vector<std::size_t> maximal;
  for (auto d : explained_by) {
    if (!p.order.less(d, current)) continue;
    bool dominated = false;
    for (auto h : explained_by) dominated = dominated || (p.order.less(d, h) && p.order.less(h, current));
    if (!dominated) maximal.push_back(d);
  }
  if (maximal.empty()) return std::nullopt;
  if (tie) tie->assign(maximal.begin() + 1, maximal.end());
  return maximal.front();
}

Session::Session(const MtpProblem& problem, const MtController& mtc, std::size_t ground_truth)
    : problem_(problem), mtc_(mtc), truth_(ground_truth), state_(problem.initial), tier_(problem.top()) {
  if (ground_truth >= problem.tiers.size()) throw Error("unknown ground-truth tier");
  std::vector<TraceEvent> ignored;
  settle(ignored);
}

std::optional<std::string> Session::prescribed() const {
  if (finished_) return std::nullopt;
  const auto* acts = mtc_.actions(tier_, state_);
  if (!acts || acts->empty()) return std::nullopt;
  return acts->front();
}

std::vector<std::string> Session::prescribed_all() const {
  if (finished_) return {};
  const auto* acts = mtc_.actions(tier_, state_);
  return acts ? *acts : std::vector<std::string>{};
}

std::vector<Outcome> Session::outcomes(const std::string& action) const {
  const auto& op = problem_.tiers[truth_].domain.at(action);
  std::vector<Outcome> out;
  for (std::size_t b = 0; b < op.branches.size(); ++b) {
    State next = op.branches[b].apply(state_);
    if (std::any_of(out.begin(), out.end(), [&](const Outcome& o) { return o.successor == next; })) continue;
    auto explained = classify_transition(problem_, state_, action, next);
    out.push_back({std::move(next), b, std::move(explained)});
  }
  return out;
}

void Session::settle(std::vector<TraceEvent>& out) {
  TraceEvent e;
  e.state = state_;
  e.tier = tier_;
  if (problem_.tiers[tier_].goal.holds(state_)) {
    e.kind = EventKind::Goal;
  } else {
    const auto action = prescribed();
    if (action && problem_.tiers[truth_].domain.at(*action).applicable(state_)) return;
    e.kind = EventKind::Stuck;
    e.note = action ? "prescribed action '" + *action + "' is not applicable" : "no action prescribed";
  }
  finished_ = true;
  events_.push_back(e);
  out.push_back(std::move(e));
}

std::vector<TraceEvent> Session::advance(std::size_t index) {
  if (finished_) throw Error("session already finished");
  return advance(*prescribed(), index);
}

std::vector<TraceEvent> Session::advance(const std::string& action, std::size_t index) {
  if (finished_) throw Error("session already finished");
  const auto allowed = prescribed_all();
  if (std::find(allowed.begin(), allowed.end(), action) == allowed.end())
    throw Error("action '" + action + "' is not prescribed in the current state");
  const auto options = outcomes(action);
  if (index >= options.size())
    throw IllegalSuccessor("outcome " + std::to_string(index) + " out of range for '" + action + "' (" +
                           std::to_string(options.size()) + " outcomes)");
  const auto& chosen = options[index];

  std::vector<TraceEvent> out;
  TraceEvent e;
  e.state = state_;
  e.tier = tier_;
  e.action = action;
  e.successor = chosen.successor;
  e.explained_by = chosen.explained_by;
  const bool explained = std::find(e.explained_by.begin(), e.explained_by.end(), tier_) != e.explained_by.end();
  ++steps_;
  if (explained) {
    e.kind = EventKind::Step;
  } else {
    std::vector<std::size_t> tie;
    const auto target = degrade_target(problem_, tier_, chosen.explained_by, &tie);
    if (!target) {
      e.kind = EventKind::Stuck;
      e.note = "transition is explained by no tier below " + problem_.tiers[tier_].id;
      state_ = chosen.successor;
      finished_ = true;
      events_.push_back(e);
      out.push_back(std::move(e));
      return out;
    }
    e.kind = EventKind::Degrade;
    e.from = tier_;
    e.to = *target;
    if (!tie.empty()) {
      e.note = "tie with";
      for (auto t : tie) e.note += " " + problem_.tiers[t].id;
    }
    tier_ = *target;
  }
  state_ = chosen.successor;
  events_.push_back(e);
  out.push_back(std::move(e));
  settle(out);
  return out;
}

void Session::stop_at_cap() {
  if (finished_) return;
  TraceEvent e;
  e.kind = EventKind::Cap;
  e.state = state_;
  e.tier = tier_;
  finished_ = true;
  events_.push_back(std::move(e));
}

Trace run_session(const MtpProblem& problem, const MtController& mtc, std::size_t ground_truth,
                  OutcomeChooser& chooser, std::size_t step_cap) {
  Session s(problem, mtc, ground_truth);
  while (!s.finished()) {
    if (s.steps() >= step_cap) {
      s.stop_at_cap();
      break;
    }
    const std::string action = *s.prescribed();
    const auto options = s.outcomes(action);
    const ChoiceContext ctx{problem, s.state(), s.tier(), action, options, s.steps()};
    s.advance(chooser.choose(ctx));
  }
  Trace t;
  t.ground_truth = problem.tiers[ground_truth].id;
  t.chooser = chooser.describe();
  t.events = s.events();
  t.outcome = t.events.empty() ? EventKind::Cap : t.events.back().kind;
  return t;
}

}  // namespace tierplan
