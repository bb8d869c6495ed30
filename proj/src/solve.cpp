#include "tierplan/solve.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace tierplan {

const PolicyEntry* Policy::find(const State& s) const {
  auto it = map_.find(s);
  return it == map_.end() ? nullptr : &it->second;
}

const std::string* Policy::action(const State& s) const {
  const auto* e = find(s);
  return e ? &e->action : nullptr;
}

namespace {

constexpr std::size_t kUnranked = std::numeric_limits<std::size_t>::max();

struct Arc {
  std::size_t op;
  bool unfair;
  std::vector<std::uint32_t> succ;
};

struct Space {
  std::vector<State> states;
  std::unordered_map<State, std::uint32_t, StateHash> index;
  std::vector<bool> goal;
  std::vector<std::vector<Arc>> arcs;

  std::uint32_t intern(const State& s, std::size_t cap, std::deque<std::uint32_t>& queue, const Formula& g) {
    auto [it, fresh] = index.emplace(s, static_cast<std::uint32_t>(states.size()));
    if (fresh) {
      if (states.size() >= cap) throw BudgetExceeded(cap);
      states.push_back(s);
      goal.push_back(g.holds(s));
      arcs.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  }
};

Space explore(const FondProblem& p, const Fairness& fairness, std::size_t cap) {
  Space sp;
  std::deque<std::uint32_t> queue;
  sp.intern(p.initial, cap, queue, p.goal);
  const auto& ops = p.domain.operators();
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    if (sp.goal[i]) continue;
    const State s = sp.states[i];
    for (std::size_t k = 0; k < ops.size(); ++k) {
      if (!ops[k].applicable(s)) continue;
      Arc arc{k, fairness.is_unfair(ops[k].name), {}};
      for (const auto& t : successors(ops[k], s)) arc.succ.push_back(sp.intern(t, cap, queue, p.goal));
      sp.arcs[i].push_back(std::move(arc));
    }
  }
  return sp;
}

bool qualifies(const Arc& a, const std::vector<bool>& safe, const std::vector<std::size_t>& rank, std::size_t k) {
  bool progress = a.unfair;
  for (auto t : a.succ) {
    if (!safe[t]) return false;
    const bool lower = rank[t] < k;
    if (a.unfair && !lower) return false;
    if (!a.unfair && lower) progress = true;
  }
  return progress;
}

std::string default_key(const GroundOperator& op) { return op.name; }

}  // namespace

SolveResult solve_dual(const FondProblem& p, const Fairness& fairness, const SolveOptions& options) {
  const Space sp = explore(p, fairness, options.node_cap);
  const std::size_t n = sp.states.size();
  std::vector<bool> safe(n, true);
  std::vector<std::size_t> rank(n, kUnranked);

  while (true) {
    std::fill(rank.begin(), rank.end(), kUnranked);
    for (std::size_t i = 0; i < n; ++i)
      if (sp.goal[i]) rank[i] = 0;
    for (std::size_t k = 1;; ++k) {
      std::vector<std::size_t> layer;
      for (std::size_t i = 0; i < n; ++i) {
        if (!safe[i] || rank[i] != kUnranked) continue;
        for (const auto& a : sp.arcs[i])
          if (qualifies(a, safe, rank, k)) {
            layer.push_back(i);
            break;
          }
      }
      if (layer.empty()) break;
      for (auto i : layer) rank[i] = k;
    }
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (safe[i] && rank[i] == kUnranked) {
        safe[i] = false;
        changed = true;
      }
    }
    if (!changed) break;
  }

  SolveResult out;
  out.explored = n;
  out.policy = Policy(p.domain.vocab_ptr());
  if (rank[0] == kUnranked) return out;
  out.solved = true;

  const auto& key = options.preference ? options.preference : std::function(default_key);
  const auto& ops = p.domain.operators();
  std::vector<bool> seen(n, false);
  std::deque<std::uint32_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    if (sp.goal[i]) continue;
    std::vector<std::pair<std::string, const Arc*>> options_here;
    for (const auto& a : sp.arcs[i])
      if (qualifies(a, safe, rank, rank[i])) options_here.emplace_back(key(ops[a.op]), &a);
    std::sort(options_here.begin(), options_here.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    PolicyEntry e;
    e.rank = rank[i];
    e.action = ops[options_here.front().second->op].name;
    for (std::size_t j = 1; j < options_here.size(); ++j) e.alternatives.push_back(ops[options_here[j].second->op].name);
    out.policy.set(sp.states[i], std::move(e));
    for (auto t : options_here.front().second->succ)
      if (!seen[t]) {
        seen[t] = true;
        queue.push_back(t);
      }
  }
  return out;
}

SolveResult solve_strong_cyclic(const FondProblem& p, const SolveOptions& options) {
  return solve_dual(p, Fairness::all_fair(), options);
}

SolveResult solve_strong(const FondProblem& p, const SolveOptions& options) {
  return solve_dual(p, Fairness::all_unfair(), options);
}

namespace {

struct Graph {
  std::vector<State> states;
  std::vector<bool> goal;
  std::vector<std::string> action;
  std::vector<bool> unfair;
  std::vector<std::vector<std::size_t>> succ;
  std::vector<std::size_t> parent;
  std::vector<std::string> via;
  std::size_t dead = std::numeric_limits<std::size_t>::max();
  std::string dead_reason;
};

Graph build_graph(const Policy& policy, const FondProblem& p, const Fairness& fairness, std::size_t cap,
                  bool stop_at_dead_end) {
  Graph g;
  std::unordered_map<State, std::size_t, StateHash> index;
  auto intern = [&](const State& s, std::size_t parent, const std::string& via) {
    auto [it, fresh] = index.emplace(s, g.states.size());
    if (fresh) {
      if (g.states.size() >= cap) throw BudgetExceeded(cap);
      g.states.push_back(s);
      g.goal.push_back(p.goal.holds(s));
      g.action.emplace_back();
      g.unfair.push_back(false);
      g.succ.emplace_back();
      g.parent.push_back(parent);
      g.via.push_back(via);
    }
    return it->second;
  };
  intern(p.initial, std::numeric_limits<std::size_t>::max(), {});
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    if (g.goal[i]) continue;
    const State s = g.states[i];
    const auto* name = policy.action(s);
    const GroundOperator* op = name ? p.domain.find(*name) : nullptr;
    std::string reason;
    if (!name)
      reason = "no policy action";
    else if (!op)
      reason = "policy names unknown operator '" + *name + "'";
    else if (!op->applicable(s))
      reason = "policy action '" + *name + "' is not applicable";
    if (!reason.empty()) {
      if (g.dead == std::numeric_limits<std::size_t>::max()) {
        g.dead = i;
        g.dead_reason = reason;
      }
      if (stop_at_dead_end) break;
      continue;
    }
    g.action[i] = op->name;
    g.unfair[i] = fairness.is_unfair(op->name);
    for (const auto& t : successors(*op, s)) {
      const auto j = intern(t, i, op->name);
      g.succ[i].push_back(j);
    }
  }
  return g;
}

// Tarjan's algorithm over the nodes flagged in `alive`.
std::vector<std::size_t> scc_ids(const std::vector<std::vector<std::size_t>>& succ, const std::vector<bool>& alive) {
  const std::size_t n = succ.size();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, none), low(n, 0), comp(n, none);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, comps = 0;
  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (!alive[root] || index[root] != none) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& f = call.back();
      if (f.next < succ[f.v].size()) {
        const auto w = succ[f.v][f.next++];
        if (!alive[w]) continue;
        if (index[w] == none) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const auto v = f.v;
      if (low[v] == index[v]) {
        while (true) {
          const auto w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
          if (w == v) break;
        }
        ++comps;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return comp;
}

void fill_path(const Graph& g, std::size_t node, VerifyResult& r) {
  std::vector<std::size_t> chain;
  for (auto i = node; i != std::numeric_limits<std::size_t>::max(); i = g.parent[i]) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  for (std::size_t k = 0; k < chain.size(); ++k) {
    r.path.push_back(g.states[chain[k]]);
    if (k > 0) r.path_ops.push_back(g.via[chain[k]]);
  }
}

}  // namespace

VerifyResult verify_dual(const Policy& policy, const FondProblem& p, const Fairness& fairness, std::size_t cap) {
  const Graph g = build_graph(policy, p, fairness, cap, true);
  const auto& vocab = p.domain.vocab();
  VerifyResult r;
  if (g.dead != std::numeric_limits<std::size_t>::max()) {
    r.ok = false;
    fill_path(g, g.dead, r);
    r.diagnosis = "dead end at " + to_string(g.states[g.dead], vocab) + ": " + g.dead_reason;
    if (!r.path_ops.empty()) r.diagnosis += " (reached via " + r.path_ops.back() + ")";
    return r;
  }

  // Shrink the non-goal region to its fair end components.
  const std::size_t n = g.states.size();
  std::vector<bool> alive(n);
  for (std::size_t i = 0; i < n; ++i) alive[i] = !g.goal[i];
  while (true) {
    const auto comp = scc_ids(g.succ, alive);
    std::vector<std::size_t> drop;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      bool inside = false, escapes = false;
      for (auto j : g.succ[i]) {
        if (alive[j] && comp[j] == comp[i])
          inside = true;
        else
          escapes = true;
      }
      if (g.unfair[i] ? !inside : (escapes || !inside)) drop.push_back(i);
    }
    if (drop.empty()) break;
    for (auto i : drop) alive[i] = false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    std::size_t size = std::count(alive.begin(), alive.end(), true);
    r.ok = false;
    fill_path(g, i, r);
    r.diagnosis = "execution can cycle forever without reaching the goal through " +
                  to_string(g.states[i], vocab) + " (" + std::to_string(size) + " trapped states";
    if (g.unfair[i]) r.diagnosis += "; adversarial choice of " + g.action[i];
    r.diagnosis += ")";
    return r;
  }
  return r;
}

PolicyGraph export_policy_graph(const Policy& policy, const FondProblem& p, const Fairness& fairness,
                                const std::function<std::string(const State&)>& label, std::size_t cap) {
  const Graph g = build_graph(policy, p, fairness, cap, false);
  PolicyGraph out;
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    out.nodes.push_back({g.states[i], g.goal[i], g.action[i], label ? label(g.states[i]) : std::string()});
    for (auto j : g.succ[i]) out.edges.push_back({i, j, g.action[i], g.unfair[i]});
  }
  return out;
}

std::string to_dot(const PolicyGraph& graph, const Vocabulary& vocab) {
  std::ostringstream out;
  out << "digraph policy {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto& n = graph.nodes[i];
    std::string text = to_string(n.state, vocab);
    if (!n.label.empty()) text = "[" + n.label + "] " + text;
    if (!n.action.empty()) text += "\\n" + n.action;
    out << "  n" << i << " [label=\"" << text << "\"" << (n.goal ? ", peripheries=2" : "") << "];\n";
  }
  for (const auto& e : graph.edges)
    out << "  n" << e.from << " -> n" << e.to << " [label=\"" << e.op << "\"" << (e.unfair ? ", style=dashed" : "")
        << "];\n";
  out << "}\n";
  return out.str();
}

}  // namespace tierplan
