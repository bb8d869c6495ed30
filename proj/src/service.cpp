#include "tierplan/service.hpp"

#include <cstdlib>
#include <future>
#include <sstream>

namespace tierplan {

namespace {

Response error(int status, const std::string& message) {
  return {status, Json{{"schema_version", kSchemaVersion}, {"error", message}}};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string p = path.substr(0, path.find('?'));
  std::stringstream ss(p);
  for (std::string part; std::getline(ss, part, '/');)
    if (!part.empty()) out.push_back(part);
  return out;
}

Json tier_ids(const MtpProblem& p, const std::vector<std::size_t>& ts) {
  Json out = Json::array();
  for (auto t : ts) out.push_back(p.tiers[t].id);
  return out;
}

}  // namespace

struct Service::ProblemRecord {
  enum class Status { Idle, Running, Solved, Unsolvable, Failed };

  std::string id;
  LoadedProblem loaded;
  std::mutex mutex;
  Status status = Status::Idle;
  std::shared_future<void> job;
  std::shared_ptr<const Solution> solution;
  std::optional<MtcReport> report;
  std::string report_error;
  std::string failure;
};

struct Service::SessionRecord {
  std::string id;
  std::shared_ptr<ProblemRecord> problem;
  std::shared_ptr<const Solution> solution;
  std::size_t ground_truth = 0;
  std::mutex mutex;
  std::unique_ptr<Session> session;
  std::vector<std::pair<std::string, std::size_t>> history;
};

Service::Service(ServiceOptions options) : options_(options) {}

Service::~Service() {
  for (auto& [id, rec] : problems_)
    if (rec->job.valid()) rec->job.wait();
}

Response Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  Json j = Json::object();
  if (!body.empty()) {
    try {
      j = Json::parse(body);
    } catch (const Json::parse_error& e) {
      return error(400, std::string("malformed JSON body: ") + e.what());
    }
  }
  const auto parts = split_path(path);
  try {
    if (!parts.empty() && parts[0] == "problems") {
      if (parts.size() == 1 && method == "POST") return create_problem(j);
      if (parts.size() == 2 && method == "GET") return problem_artifact(parts[1], "summary");
      if (parts.size() == 3) {
        const auto& what = parts[2];
        if (what == "compile" && method == "POST") return compile_problem(parts[1], j);
        if (what == "solve" && method == "POST") return solve_problem(parts[1], true);
        if (what == "solve" && method == "GET") return solve_problem(parts[1], false);
        if ((what == "policy-graph" || what == "mtc" || what == "triggers") && method == "GET")
          return problem_artifact(parts[1], what);
      }
    } else if (!parts.empty() && parts[0] == "sessions") {
      if (parts.size() == 1 && method == "POST") return create_session(j);
      if (parts.size() == 2 && method == "GET") return get_session(parts[1]);
      if (parts.size() == 2 && method == "DELETE") return delete_session(parts[1]);
      if (parts.size() == 3 && parts[2] == "choose" && method == "POST") return choose(parts[1], j);
    }
    return error(404, "no route for " + method + " " + path);
  } catch (const Json::exception& e) {
    return error(400, std::string("bad request: ") + e.what());
  } catch (const BudgetExceeded& e) {
    return error(422, e.what());
  } catch (const Error& e) {
    return error(400, e.what());
  }
}

std::shared_ptr<Service::ProblemRecord> Service::problem(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = problems_.find(id);
  return it == problems_.end() ? nullptr : it->second;
}

std::shared_ptr<Service::SessionRecord> Service::session(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Response Service::create_problem(const Json& body) {
  const Json& manifest = body.contains("manifest") ? body["manifest"] : body;
  auto rec = std::make_shared<ProblemRecord>();
  rec->loaded = load_manifest(manifest);
  const auto report = validate_mtp(rec->loaded.problem);
  if (!report.ok()) {
    Json out = to_json(report);
    out["error"] = "problem does not validate";
    return {422, out};
  }
  {
    std::lock_guard lock(mutex_);
    rec->id = "p" + std::to_string(next_problem_++);
    problems_[rec->id] = rec;
  }
  Json tiers = Json::array();
  for (const auto& t : rec->loaded.problem.tiers) tiers.push_back(t.id);
  return {201, Json{{"schema_version", kSchemaVersion},
                    {"problem_id", rec->id},
                    {"name", rec->loaded.name},
                    {"tiers", std::move(tiers)},
                    {"atoms", rec->loaded.problem.vocab->size()}}};
}

Response Service::compile_problem(const std::string& id, const Json& body) {
  auto rec = problem(id);
  if (!rec) return error(404, "unknown problem '" + id + "'");
  auto cp = compile(rec->loaded.problem);
  if (body.value("flatten", false)) cp = flatten(cp);
  auto files = render_compiled(cp, rec->loaded.name);
  return {200, Json{{"schema_version", kSchemaVersion},
                    {"problem_id", id},
                    {"flattened", cp.flattened},
                    {"operators", cp.domain().operators().size()},
                    {"atoms", cp.domain().vocab().size()},
                    {"domain", std::move(files.domain)},
                    {"problem", std::move(files.problem)},
                    {"fairness", std::move(files.fairness)}}};
}

Response Service::solve_problem(const std::string& id, bool start) {
  auto rec = problem(id);
  if (!rec) return error(404, "unknown problem '" + id + "'");
  std::shared_future<void> job;
  {
    std::lock_guard lock(rec->mutex);
    if (rec->status == ProblemRecord::Status::Idle) {
      if (!start) return error(409, "no solve has been started for '" + id + "'");
      rec->status = ProblemRecord::Status::Running;
      const auto cap = options_.node_cap;
      rec->job = std::async(std::launch::async, [rec, cap] {
        std::shared_ptr<const Solution> sol;
        std::optional<MtcReport> report;
        std::string report_error;
        std::string failure;
        try {
          sol = std::make_shared<const Solution>(solve_mtp(rec->loaded.problem, cap));
          if (sol->mtc) {
            try {
              report = verify_mtc(rec->loaded.problem, *sol->mtc);
            } catch (const EscapesAllTiers& e) {
              report_error = e.what();
            }
          }
        } catch (const std::exception& e) {
          failure = e.what();
        }
        std::lock_guard inner(rec->mutex);
        rec->solution = sol;
        rec->report = std::move(report);
        rec->report_error = std::move(report_error);
        rec->failure = std::move(failure);
        if (!rec->failure.empty())
          rec->status = ProblemRecord::Status::Failed;
        else
          rec->status = sol->result.solved ? ProblemRecord::Status::Solved : ProblemRecord::Status::Unsolvable;
      }).share();
    }
    job = rec->job;
  }
  if (start) job.wait_for(options_.solve_budget);

  std::lock_guard lock(rec->mutex);
  Json out{{"schema_version", kSchemaVersion}, {"problem_id", id}};
  switch (rec->status) {
    case ProblemRecord::Status::Running:
      out["status"] = "running";
      out["poll"] = "/problems/" + id + "/solve";
      return {202, out};
    case ProblemRecord::Status::Failed:
      out["status"] = "failed";
      out["error"] = rec->failure;
      return {422, out};
    default:
      break;
  }
  const auto& sol = *rec->solution;
  out["status"] = sol.result.solved ? "solved" : "unsolvable";
  out["explored"] = sol.result.explored;
  if (sol.result.solved) {
    out["policy_size"] = sol.result.policy.size();
    out["mtc_size"] = sol.mtc->size();
    out["mtc_solution"] = rec->report ? Json(rec->report->ok) : Json(false);
  }
  return {200, out};
}

Response Service::problem_artifact(const std::string& id, const std::string& what) {
  auto rec = problem(id);
  if (!rec) return error(404, "unknown problem '" + id + "'");
  std::lock_guard lock(rec->mutex);
  const auto& p = rec->loaded.problem;
  if (what == "summary") {
    Json tiers = Json::array();
    for (const auto& t : p.tiers)
      tiers.push_back({{"id", t.id}, {"goal", t.goal.pddl(*p.vocab)}, {"operators", t.domain.operators().size()}});
    Json order = Json::array();
    for (const auto& [lo, hi] : p.order.strict_pairs()) order.push_back({p.tiers[lo].id, p.tiers[hi].id});
    return {200, Json{{"schema_version", kSchemaVersion},
                      {"problem_id", id},
                      {"name", rec->loaded.name},
                      {"tiers", std::move(tiers)},
                      {"order", std::move(order)},
                      {"top", p.tiers[p.top()].id},
                      {"initial", to_json(p.initial, *p.vocab)}}};
  }
  if (rec->status != ProblemRecord::Status::Solved) return error(409, "problem '" + id + "' has no solution yet");
  const auto& sol = *rec->solution;
  if (what == "policy-graph") {
    Json g = to_json(policy_graph(sol, options_.node_cap), sol.compiled.domain().vocab());
    g["problem_id"] = id;
    return {200, g};
  }
  if (what == "mtc") {
    Json m = to_json(*sol.mtc, *p.vocab);
    m["problem_id"] = id;
    if (rec->report)
      m["verification"] = to_json(*rec->report, p);
    else
      m["verification"] = Json{{"solution", false}, {"error", rec->report_error}};
    return {200, m};
  }
  if (!rec->report) return error(422, rec->report_error);
  Json t = triggers_json(rec->report->triggers, p);
  t["problem_id"] = id;
  return {200, t};
}

namespace {

Json snapshot(const std::string& id, const std::string& problem_id, const MtpProblem& p, std::size_t truth,
              const Session& s, const std::vector<std::pair<std::string, std::size_t>>& history) {
  const auto& vocab = *p.vocab;
  Json out{{"schema_version", kSchemaVersion},
           {"session_id", id},
           {"problem_id", problem_id},
           {"ground_truth", p.tiers[truth].id},
           {"steps", s.steps()},
           {"finished", s.finished()},
           {"state", to_json(s.state(), vocab)},
           {"tier", p.tiers[s.tier()].id},
           {"tier_goal", p.tiers[s.tier()].goal.pddl(vocab)}};
  if (s.finished() && !s.events().empty()) out["outcome"] = to_string(s.events().back().kind);
  Json prescribed = Json::array();
  for (const auto& a : s.prescribed_all()) {
    Json succ = Json::array();
    const auto options = s.outcomes(a);
    for (std::size_t i = 0; i < options.size(); ++i)
      succ.push_back({{"index", i},
                      {"state", to_json(options[i].successor, vocab)},
                      {"explained_by", tier_ids(p, options[i].explained_by)}});
    prescribed.push_back({{"action", a}, {"successors", std::move(succ)}});
  }
  out["prescribed"] = std::move(prescribed);
  Json hist = Json::array();
  for (const auto& [a, i] : history) hist.push_back({{"action", a}, {"successor", i}});
  out["history"] = std::move(hist);
  Json events = Json::array();
  for (const auto& e : s.events()) events.push_back(to_json(e, p));
  out["events"] = std::move(events);
  return out;
}

}  // namespace

Response Service::create_session(const Json& body) {
  const auto pid = body.at("problem_id").get<std::string>();
  if (body.value("chooser", std::string("interactive")) != "interactive")
    return error(400, "sessions only support the interactive chooser");
  auto rec = problem(pid);
  if (!rec) return error(404, "unknown problem '" + pid + "'");
  auto s = std::make_shared<SessionRecord>();
  {
    std::lock_guard lock(rec->mutex);
    if (rec->status != ProblemRecord::Status::Solved) return error(409, "problem '" + pid + "' has no solution yet");
    s->solution = rec->solution;
  }
  const auto& p = rec->loaded.problem;
  const auto gt = body.at("ground_truth").get<std::string>();
  bool known = false;
  for (const auto& t : p.tiers) known = known || t.id == gt;
  if (!known) return error(404, "unknown tier '" + gt + "'");
  s->problem = rec;
  s->ground_truth = p.tier_at(gt);
  s->session = std::make_unique<Session>(p, *s->solution->mtc, s->ground_truth);
  {
    std::lock_guard lock(mutex_);
    s->id = "s" + std::to_string(next_session_++);
    sessions_[s->id] = s;
  }
  std::lock_guard lock(s->mutex);
  return {201, snapshot(s->id, pid, p, s->ground_truth, *s->session, s->history)};
}

Response Service::get_session(const std::string& id) {
  auto s = session(id);
  if (!s) return error(404, "unknown session '" + id + "'");
  std::lock_guard lock(s->mutex);
  return {200, snapshot(id, s->problem->id, s->problem->loaded.problem, s->ground_truth, *s->session, s->history)};
}

Response Service::choose(const std::string& id, const Json& body) {
  auto s = session(id);
  if (!s) return error(404, "unknown session '" + id + "'");
  std::lock_guard lock(s->mutex);
  auto& session = *s->session;
  const auto& p = s->problem->loaded.problem;
  if (session.finished()) return error(409, "session '" + id + "' has no pending choice");
  const auto allowed = session.prescribed_all();
  const auto action = body.contains("action") ? body["action"].get<std::string>() : allowed.front();
  if (std::find(allowed.begin(), allowed.end(), action) == allowed.end())
    return error(409, "action '" + action + "' is not pending in session '" + id + "'");
  if (!body.contains("successor") || !body["successor"].is_number_integer())
    return error(400, "'successor' must be an integer index");
  const auto index = body["successor"].get<long long>();
  const auto options = session.outcomes(action);
  if (index < 0 || static_cast<std::size_t>(index) >= options.size())
    return error(422, "successor " + std::to_string(index) + " is not an outcome of '" + action + "'");
  const auto events = session.advance(action, static_cast<std::size_t>(index));
  s->history.emplace_back(action, static_cast<std::size_t>(index));
  Json ev = Json::array();
  for (const auto& e : events) ev.push_back(to_json(e, p));
  return {200, Json{{"schema_version", kSchemaVersion},
                    {"events", std::move(ev)},
                    {"snapshot", snapshot(id, s->problem->id, p, s->ground_truth, session, s->history)}}};
}

Response Service::delete_session(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (!sessions_.erase(id)) return error(404, "unknown session '" + id + "'");
  return {200, Json{{"schema_version", kSchemaVersion}, {"deleted", id}}};
}

int default_port() {
  if (const char* env = std::getenv("TIERPLAN_PORT")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw Error(std::string("TIERPLAN_PORT is not a port number: ") + env);
    }
  }
  return 8080;
}

}  // namespace tierplan
