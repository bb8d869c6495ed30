#include "tierplan/io.hpp"

#include <fstream>
#include <sstream>

namespace tierplan {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

std::vector<pddl::TypedName> read_objects(const Json& j) {
  std::vector<pddl::TypedName> out;
  if (j.is_object()) {
    for (const auto& [type, names] : j.items())
      for (const auto& n : names) out.push_back({n.get<std::string>(), type});
  } else if (j.is_array()) {
    for (const auto& item : j) {
      const auto text = item.get<std::string>();
      const auto dash = text.find(" - ");
      if (dash == std::string::npos)
        out.push_back({text, "object"});
      else
        out.push_back({text.substr(0, dash), text.substr(dash + 3)});
    }
  } else if (!j.is_null()) {
    throw Error("manifest 'objects' must be a list or a type map");
  }
  for (auto& o : out) {
    for (auto& c : o.name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (auto& c : o.type) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string goal_text(const Json& g) {
  if (g.is_string()) return g.get<std::string>();
  if (g.is_array()) {
    std::string out = "(and";
    for (const auto& a : g) out += " " + a.get<std::string>();
    return out + ")";
  }
  throw Error("tier goal must be a PDDL condition string or a list of literals");
}

}  // namespace

LoadedProblem load_manifest(const Json& m, const std::filesystem::path& base) {
  if (!m.is_object()) throw Error("manifest must be a JSON object");
  if (!m.contains("tiers") || !m["tiers"].is_array()) throw Error("manifest needs a 'tiers' list");
  LoadedProblem out;
  out.name = m.value("name", std::string("mtp"));

  std::vector<std::string> ids;
  for (const auto& t : m["tiers"]) {
    const auto id = t.at("id").get<std::string>();
    ids.push_back(id);
    if (t.contains("domain")) {
      out.schemas.push_back(pddl::parse_domain(t["domain"].get<std::string>(), id + ".pddl"));
    } else {
      const auto file = base / t.at("domain_file").get<std::string>();
      out.schemas.push_back(pddl::parse_domain(read_text(file), file.string()));
    }
  }

  std::set<std::string> fluents;
  std::vector<const pddl::SchemaDomain*> ptrs;
  for (const auto& s : out.schemas) {
    ptrs.push_back(&s);
    const auto f = s.fluent_predicates();
    fluents.insert(f.begin(), f.end());
  }
  const auto objects = read_objects(m.value("objects", Json()));
  auto vocab = pddl::fluent_vocabulary(ptrs, objects, fluents);

  std::vector<GroundAtom> statics;
  for (const auto& a : m.value("statics", Json::array())) statics.push_back(parse_atom(a.get<std::string>()));
  std::vector<std::string> init;
  for (const auto& a : m.value("init", Json::array())) {
    auto atom = parse_atom(a.get<std::string>());
    if (fluents.count(atom.predicate))
      init.push_back(atom.str());
    else
      statics.push_back(std::move(atom));
  }

  pddl::GroundOptions opts;
  opts.fluents = fluents;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& t = m["tiers"][i];
    Tier tier;
    tier.id = ids[i];
    tier.domain = pddl::ground_into(out.schemas[i], objects, statics, opts, vocab);
    tier.goal = pddl::parse_condition(goal_text(t.at("goal")), *vocab);
    out.problem.tiers.push_back(std::move(tier));
  }

  std::vector<std::pair<std::size_t, std::size_t>> covers;
  for (const auto& pair : m.value("order", Json::array())) {
    if (!pair.is_array() || pair.size() != 2) throw Error("order entries must be [lower, higher] pairs");
    auto index = [&](const Json& id) {
      const auto s = id.get<std::string>();
      for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == s) return i;
      throw Error("order references unknown tier '" + s + "'");
    };
    covers.emplace_back(index(pair[0]), index(pair[1]));
  }
  out.problem.order = TierOrder(ids.size(), std::move(covers));
  out.problem.vocab = vocab;
  out.problem.initial = make_state(*vocab, init);
  return out;
}

LoadedProblem load_manifest_file(const std::filesystem::path& path) {
  Json m;
  try {
    m = Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return load_manifest(m, path.parent_path());
}

Json bundle_manifest(const std::filesystem::path& path) {
  Json m = Json::parse(read_text(path));
  for (auto& t : m.at("tiers")) {
    if (!t.contains("domain_file")) continue;
    t["domain"] = read_text(path.parent_path() / t["domain_file"].get<std::string>());
    t.erase("domain_file");
  }
  return m;
}

Json to_json(const State& s, const Vocabulary& vocab) {
  Json out = Json::array();
  for (const auto& n : atom_names(s, vocab)) out.push_back(n);
  return out;
}

State state_from_json(const Json& j, const Vocabulary& vocab) {
  std::vector<std::string> names;
  for (const auto& a : j) names.push_back(a.get<std::string>());
  return make_state(vocab, names);
}

Json to_json(const ValidationReport& r) {
  Json out{{"schema_version", kSchemaVersion}, {"valid", r.ok()}, {"findings", Json::array()}};
  for (const auto& f : r.findings) out["findings"].push_back({{"kind", f.kind}, {"message", f.message}});
  return out;
}

Json to_json(const Policy& p, const Vocabulary& vocab) {
  Json entries = Json::array();
  for (const auto& [s, e] : p.entries())
    entries.push_back(
        {{"state", to_json(s, vocab)}, {"action", e.action}, {"alternatives", e.alternatives}, {"rank", e.rank}});
  return {{"schema_version", kSchemaVersion}, {"entries", std::move(entries)}};
}

Policy policy_from_json(const Json& j, const VocabularyPtr& vocab) {
  Policy p(vocab);
  for (const auto& e : j.at("entries")) {
    PolicyEntry entry;
    entry.action = e.at("action").get<std::string>();
    entry.alternatives = e.value("alternatives", std::vector<std::string>{});
    entry.rank = e.value("rank", std::size_t{0});
    p.set(state_from_json(e.at("state"), *vocab), std::move(entry));
  }
  return p;
}

Json fairness_json(const CompiledProblem& cp) {
  Json out{{"schema_version", kSchemaVersion}, {"flattened", cp.flattened}};
  out["unfair"] = Json::array();
  for (const auto& op : cp.domain().operators())
    if (cp.fairness.is_unfair(op.name)) out["unfair"].push_back(op.name);
  Json prov = Json::object();
  for (const auto& op : cp.domain().operators()) {
    const auto* p = cp.origin(op.name);
    if (!p) continue;
    Json e{{"role", to_string(p->role)}};
    if (!p->source.empty()) e["source"] = p->source;
    if (!p->tier.empty()) e["tier"] = p->tier;
    if (!p->target.empty()) e["target"] = p->target;
    if (!p->label.empty()) e["label"] = p->label;
    prov[op.name] = std::move(e);
  }
  out["provenance"] = std::move(prov);
  return out;
}

Json to_json(const PolicyGraph& g, const Vocabulary& vocab) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    Json node{{"id", i}, {"state", to_json(n.state, vocab)}, {"goal", n.goal}};
    if (!n.action.empty()) node["action"] = n.action;
    if (!n.label.empty()) node["tier"] = n.label;
    nodes.push_back(std::move(node));
  }
  Json edges = Json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"from", e.from}, {"to", e.to}, {"op", e.op}, {"kind", e.unfair ? "unfair" : "fair"}});
  return {{"schema_version", kSchemaVersion}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

Json to_json(const MtController& mtc, const Vocabulary& vocab) {
  Json tiers = Json::object();
  for (std::size_t t = 0; t < mtc.tier_ids().size(); ++t) {
    Json entries = Json::array();
    for (const auto& [s, acts] : mtc.policy(t)) entries.push_back({{"state", to_json(s, vocab)}, {"actions", acts}});
    tiers[mtc.tier_ids()[t]] = std::move(entries);
  }
  return {{"schema_version", kSchemaVersion}, {"tiers", std::move(tiers)}};
}

MtController mtc_from_json(const Json& j, const MtpProblem& p) {
  std::vector<std::string> ids;
  for (const auto& t : p.tiers) ids.push_back(t.id);
  MtController mtc(ids);
  for (const auto& [id, entries] : j.at("tiers").items()) {
    const auto t = p.tier_at(id);
    for (const auto& e : entries)
      mtc.set(t, state_from_json(e.at("state"), *p.vocab), e.at("actions").get<std::vector<std::string>>());
  }
  return mtc;
}

Json triggers_json(const TriggerMap& trig, const MtpProblem& p) {
  Json tiers = Json::object();
  for (std::size_t t = 0; t < p.tiers.size(); ++t) {
    Json states = Json::array();
    for (const auto& s : trig[t]) states.push_back(to_json(s, *p.vocab));
    tiers[p.tiers[t].id] = std::move(states);
  }
  return {{"schema_version", kSchemaVersion}, {"triggers", std::move(tiers)}};
}

Json to_json(const MtcReport& r, const MtpProblem& p) {
  Json failures = Json::array();
  for (const auto& f : r.failures)
    failures.push_back({{"tier", f.tier}, {"trigger", to_json(f.trigger, *p.vocab)}, {"diagnosis", f.diagnosis}});
  return {{"schema_version", kSchemaVersion},
          {"solution", r.ok},
          {"triggers", triggers_json(r.triggers, p)["triggers"]},
          {"failures", std::move(failures)}};
}

Json to_json(const TraceEvent& e, const MtpProblem& p) {
  Json out{{"event", to_string(e.kind)}, {"tier", p.tiers[e.tier].id}, {"state", to_json(e.state, *p.vocab)}};
  if (!e.action.empty()) out["action"] = e.action;
  if (e.successor) out["successor"] = to_json(*e.successor, *p.vocab);
  if (!e.action.empty()) {
    Json ex = Json::array();
    for (auto t : e.explained_by) ex.push_back(p.tiers[t].id);
    out["explained_by"] = std::move(ex);
  }
  if (e.kind == EventKind::Degrade) {
    out["from"] = p.tiers[e.from].id;
    out["to"] = p.tiers[e.to].id;
  }
  if (!e.note.empty()) out["note"] = e.note;
  return out;
}

Json to_json(const Trace& t, const MtpProblem& p) {
  Json events = Json::array();
  for (const auto& e : t.events) events.push_back(to_json(e, p));
  return {{"schema_version", kSchemaVersion},
          {"ground_truth", t.ground_truth},
          {"chooser", t.chooser},
          {"outcome", to_string(t.outcome)},
          {"events", std::move(events)}};
}

}  // namespace tierplan
