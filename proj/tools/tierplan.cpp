#include <csignal>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tierplan/pipeline.hpp"
#include "tierplan/service.hpp"

using namespace tierplan;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kIo = 2, kUnsolvable = 3, kCap = 4 };

void print_report(const ValidationReport& r) {
  for (const auto& f : r.findings) std::cerr << "  " << f.kind << ": " << f.message << "\n";
}

/// Either "1,0,2" or the path of a JSON list of indices.
std::vector<std::size_t> parse_script(const std::string& text) {
  std::vector<std::size_t> out;
  if (fs::is_regular_file(text)) {
    const auto j = Json::parse(read_text(text));
    if (!j.is_array()) throw Error(text + ": script must be a JSON list of outcome indices");
    for (const auto& v : j) {
      if (!v.is_number_unsigned()) throw Error(text + ": bad script entry " + v.dump());
      out.push_back(v.get<std::size_t>());
    }
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const auto v = std::stoul(item, &used);
    if (used != item.size()) throw Error("bad script entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::size_t prompt(const ChoiceContext& ctx) {
  const auto& vocab = *ctx.problem.vocab;
  std::cout << "tier " << ctx.problem.tiers[ctx.tier].id << " in " << to_string(ctx.state, vocab) << "\n"
            << "action " << ctx.action << "\n";
  for (std::size_t i = 0; i < ctx.outcomes.size(); ++i) {
    std::cout << "  [" << i << "] " << to_string(ctx.outcomes[i].successor, vocab) << "  explained by:";
    for (auto t : ctx.outcomes[i].explained_by) std::cout << " " << ctx.problem.tiers[t].id;
    std::cout << "\n";
  }
  for (;;) {
    std::cout << "choose outcome> " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) throw Error("input closed during interactive simulation");
    try {
      const auto v = std::stoul(line);
      if (v < ctx.outcomes.size()) return v;
    } catch (const std::exception&) {
    }
    std::cout << "enter a number between 0 and " << ctx.outcomes.size() - 1 << "\n";
  }
}

MtController load_or_solve_mtc(const LoadedProblem& lp, const std::string& mtc_path, std::size_t cap,
                               int& status) {
  if (!mtc_path.empty()) return mtc_from_json(Json::parse(read_text(mtc_path)), lp.problem);
  auto sol = solve_mtp(lp.problem, cap);
  if (!sol.mtc) {
    status = kUnsolvable;
    return MtController(std::vector<std::string>{});
  }
  return *sol.mtc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-tier FOND planning toolkit"};
  app.require_subcommand(1);

  std::string manifest;
  std::string out;
  std::string mtc_path;
  std::string policy_path;
  std::size_t node_cap = 1'000'000;
  bool json_out = false;

  auto* validate = app.add_subcommand("validate", "Check the tier lattice and refinement conditions");
  validate->add_option("manifest", manifest, "Tier manifest (JSON)")->required();
  validate->add_flag("--json", json_out, "Print the report as JSON");

  bool flatten_flag = false;
  auto* compile_cmd = app.add_subcommand("compile", "Compile to a dual-FOND problem");
  compile_cmd->add_option("manifest", manifest, "Tier manifest (JSON)")->required();
  compile_cmd->add_option("-o,--out", out, "Output directory")->required();
  compile_cmd->add_flag("--flatten", flatten_flag, "Remove conditional effects");

  bool graph = false;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the compiled problem");
  solve_cmd->add_option("manifest", manifest, "Tier manifest (JSON)")->required();
  solve_cmd->add_option("-o,--out", out, "Output directory")->required();
  solve_cmd->add_option("--node-cap", node_cap, "Maximum number of explored states");
  solve_cmd->add_flag("--graph", graph, "Also write policy-graph.json and policy.dot");

  auto* extract = app.add_subcommand("extract", "Extract the multi-tier controller");
  extract->add_option("manifest", manifest, "Tier manifest (JSON)")->required();
  extract->add_option("--policy", policy_path, "policy.json from solve (solves again when omitted)");
  extract->add_option("-o,--out", out, "Output file")->required();
  extract->add_option("--node-cap", node_cap, "Maximum number of explored states");

  std::string report_path;
  std::string triggers_path;
  auto* verify = app.add_subcommand("verify", "Check that a controller solves every tier from its triggers");
  verify->add_option("manifest", manifest, "Tier manifest (JSON)")->required();
  verify->add_option("--mtc", mtc_path, "mtc.json")->required();
  verify->add_option("--report", report_path, "Write the report as JSON");
  verify->add_option("--triggers", triggers_path, "Write the triggering states as JSON");

  std::string ground_truth;
  std::optional<std::uint64_t> seed;
  std::string script;
  bool interactive = false;
  bool adversarial = false;
  std::size_t step_cap = 1000;
  auto* simulate = app.add_subcommand("simulate", "Execute the controller against a ground-truth tier");
  simulate->add_option("manifest", manifest, "Tier manifest (JSON)")->required();
  simulate->add_option("--mtc", mtc_path, "mtc.json (solves when omitted)");
  simulate->add_option("--ground-truth", ground_truth, "Tier that produces the outcomes")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "Random outcomes from this seed");
  auto* script_opt = simulate->add_option("--script", script, "Comma-separated outcome indices or a JSON list file");
  auto* inter_opt = simulate->add_flag("--interactive", interactive, "Prompt for each outcome");
  auto* adv_opt = simulate->add_flag("--adversarial", adversarial, "Always pick the lowest-tier outcome");
  seed_opt->excludes(script_opt)->excludes(inter_opt)->excludes(adv_opt);
  script_opt->excludes(inter_opt)->excludes(adv_opt);
  inter_opt->excludes(adv_opt);
  simulate->add_option("--step-cap", step_cap, "Stop after this many steps");
  simulate->add_option("-o,--out", out, "Write the trace as JSON");
  simulate->add_option("--node-cap", node_cap, "Maximum number of explored states");

  int port = 0;
  std::string host = "127.0.0.1";
  long budget_ms = 2000;
  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON service");
  serve->add_option("--port", port, "Port (default from TIERPLAN_PORT, else 8080)");
  serve->add_option("--host", host, "Interface to bind");
  serve->add_option("--solve-budget-ms", budget_ms, "Longest a request waits for a solve");
  serve->add_option("--node-cap", node_cap, "Maximum number of explored states");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      Service service({std::chrono::milliseconds(budget_ms), node_cap});
      HttpServer http(service);
      const int bound = http.bind(host, port ? port : default_port());
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      http.listen();
      return kOk;
    }

    const auto lp = load_manifest_file(manifest);
    const auto& p = lp.problem;

    if (*validate) {
      const auto report = validate_mtp(p);
      if (json_out)
        std::cout << dump(to_json(report));
      else if (report.ok())
        std::cout << "valid: " << p.tiers.size() << " tier(s), top " << p.tiers[p.top()].id << "\n";
      else {
        std::cout << "invalid\n";
        print_report(report);
      }
      return report.ok() ? kOk : kInvalid;
    }

    if (*compile_cmd) {
      auto cp = compile(p);
      if (flatten_flag) cp = flatten(cp);
      const auto files = render_compiled(cp, lp.name);
      write_text(fs::path(out) / "domain.pddl", files.domain);
      write_text(fs::path(out) / "problem.pddl", files.problem);
      write_text(fs::path(out) / "fairness.json", dump(files.fairness));
      std::cout << cp.domain().operators().size() << " operators, " << cp.domain().vocab().size()
                << " atoms\n";
      return kOk;
    }

    if (*solve_cmd) {
      const auto sol = solve_mtp(p, node_cap);
      std::cout << "explored " << sol.result.explored << " states\n";
      if (!sol.result.solved) {
        std::cout << "unsolvable\n";
        return kUnsolvable;
      }
      const auto& vocab = sol.compiled.domain().vocab();
      write_text(fs::path(out) / "policy.json", dump(to_json(sol.result.policy, vocab)));
      if (graph) {
        const auto g = policy_graph(sol, node_cap);
        write_text(fs::path(out) / "policy-graph.json", dump(to_json(g, vocab)));
        write_text(fs::path(out) / "policy.dot", to_dot(g, vocab));
      }
      std::cout << "solved: " << sol.result.policy.size() << " policy states\n";
      return kOk;
    }

    if (*extract) {
      MtController mtc{std::vector<std::string>{}};
      if (!policy_path.empty()) {
        const auto cp = compile(p);
        const auto policy = policy_from_json(Json::parse(read_text(policy_path)), cp.domain().vocab_ptr());
        mtc = extract_mtc(policy, cp);
      } else {
        auto sol = solve_mtp(p, node_cap);
        if (!sol.mtc) {
          std::cout << "unsolvable\n";
          return kUnsolvable;
        }
        mtc = std::move(*sol.mtc);
      }
      write_text(out, dump(to_json(mtc, *p.vocab)));
      std::cout << mtc.size() << " controller entries\n";
      return kOk;
    }

    if (*verify) {
      const auto mtc = mtc_from_json(Json::parse(read_text(mtc_path)), p);
      MtcReport report;
      try {
        report = verify_mtc(p, mtc);
      } catch (const EscapesAllTiers& e) {
        std::cout << "MTC is NOT a solution controller\n  " << e.what() << "\n";
        return kInvalid;
      }
      std::cout << to_text(report, p);
      if (!report_path.empty()) write_text(report_path, dump(to_json(report, p)));
      if (!triggers_path.empty()) write_text(triggers_path, dump(triggers_json(report.triggers, p)));
      return report.ok ? kOk : kInvalid;
    }

    if (*simulate) {
      int status = kOk;
      const auto mtc = load_or_solve_mtc(lp, mtc_path, node_cap, status);
      if (status != kOk) {
        std::cout << "unsolvable\n";
        return status;
      }
      std::unique_ptr<OutcomeChooser> chooser;
      if (seed)
        chooser = std::make_unique<RandomChooser>(*seed);
      else if (!script.empty())
        chooser = std::make_unique<ScriptedChooser>(parse_script(script));
      else if (interactive)
        chooser = std::make_unique<InteractiveChooser>(prompt);
      else if (adversarial)
        chooser = std::make_unique<AdversarialChooser>();
      else
        chooser = std::make_unique<RandomChooser>(0);
      const auto trace = run_session(p, mtc, p.tier_at(ground_truth), *chooser, step_cap);
      const auto text = dump(to_json(trace, p));
      if (out.empty())
        std::cout << text;
      else
        write_text(out, text);
      if (!out.empty()) std::cout << "outcome: " << to_string(trace.outcome) << "\n";
      return kOk;
    }
  } catch (const ValidationFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    print_report(e.report());
    return kInvalid;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
