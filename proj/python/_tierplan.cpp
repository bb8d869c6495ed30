#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tierplan/pipeline.hpp"
#include "tierplan/service.hpp"
#include "tierplan/sim.hpp"

namespace py = pybind11;
using namespace tierplan;

namespace {

// Manifests arrive either as a file path or as JSON text with inline domains.
LoadedProblem load(const std::string& source, bool is_path) {
  return is_path ? load_manifest_file(source) : load_manifest(Json::parse(source));
}

std::string validate_json(const std::string& source, bool is_path) {
  return to_json(validate_mtp(load(source, is_path).problem)).dump();
}

std::string compile_json(const std::string& source, bool is_path, bool flatten_it) {
  const auto lp = load(source, is_path);
  auto cp = compile(lp.problem);
  if (flatten_it) cp = flatten(cp);
  const auto files = render_compiled(cp, lp.name);
  return Json{{"domain", files.domain},
              {"problem", files.problem},
              {"fairness", files.fairness},
              {"operators", cp.domain().operators().size()},
              {"atoms", cp.domain().vocab().size()}}
      .dump();
}

std::string solve_json(const std::string& source, bool is_path, std::size_t node_cap) {
  const auto lp = load(source, is_path);
  Solution sol;
  {
    py::gil_scoped_release release;
    sol = solve_mtp(lp.problem, node_cap);
  }
  Json out{{"solved", sol.result.solved}, {"explored", sol.result.explored}};
  if (sol.result.solved) {
    out["policy"] = to_json(sol.result.policy, sol.compiled.domain().vocab());
    out["mtc"] = to_json(*sol.mtc, *lp.problem.vocab);
  }
  return out.dump();
}

std::string verify_json(const std::string& source, bool is_path, const std::string& mtc) {
  const auto lp = load(source, is_path);
  const auto controller = mtc_from_json(Json::parse(mtc), lp.problem);
  return to_json(verify_mtc(lp.problem, controller), lp.problem).dump();
}

std::string simulate_json(const std::string& source, bool is_path, const std::string& ground_truth,
                          std::optional<std::vector<std::size_t>> script, std::optional<std::uint64_t> seed,
                          bool adversarial, std::size_t step_cap, std::size_t node_cap) {
  const auto lp = load(source, is_path);
  const auto& p = lp.problem;
  const auto sol = solve_mtp(p, node_cap);
  if (!sol.mtc) throw Error("problem is unsolvable");
  std::unique_ptr<OutcomeChooser> chooser;
  if (script)
    chooser = std::make_unique<ScriptedChooser>(*script);
  else if (adversarial)
    chooser = std::make_unique<AdversarialChooser>();
  else
    chooser = std::make_unique<RandomChooser>(seed.value_or(0));
  return to_json(run_session(p, *sol.mtc, p.tier_at(ground_truth), *chooser, step_cap), p).dump();
}

}  // namespace

PYBIND11_MODULE(_tierplan, m) {
  m.doc() = "Multi-tier FOND planning core";
  py::register_exception<Error>(m, "TierplanError");
  m.attr("SCHEMA_VERSION") = kSchemaVersion;
  m.def("validate_json", &validate_json, py::arg("source"), py::arg("is_path"));
  m.def("compile_json", &compile_json, py::arg("source"), py::arg("is_path"), py::arg("flatten") = false);
  m.def("solve_json", &solve_json, py::arg("source"), py::arg("is_path"), py::arg("node_cap") = 1'000'000);
  m.def("verify_json", &verify_json, py::arg("source"), py::arg("is_path"), py::arg("mtc"));
  m.def("simulate_json", &simulate_json, py::arg("source"), py::arg("is_path"), py::arg("ground_truth"),
        py::arg("script") = py::none(), py::arg("seed") = py::none(), py::arg("adversarial") = false,
        py::arg("step_cap") = 1000, py::arg("node_cap") = 1'000'000);

  py::class_<Service>(m, "Service")
      .def(py::init([](int budget_ms, std::size_t node_cap) {
             return std::make_unique<Service>(ServiceOptions{std::chrono::milliseconds(budget_ms), node_cap});
           }),
           py::arg("solve_budget_ms") = 2000, py::arg("node_cap") = 1'000'000)
      .def(
          "handle_json",
          [](Service& s, const std::string& method, const std::string& path, const std::string& body) {
            Response r;
            {
              py::gil_scoped_release release;
              r = s.handle(method, path, body);
            }
            return std::make_pair(r.status, r.body.dump());
          },
          py::arg("method"), py::arg("path"), py::arg("body") = "");
}
