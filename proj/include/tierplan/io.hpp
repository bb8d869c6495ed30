#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "tierplan/compile.hpp"
#include "tierplan/mtc.hpp"
#include "tierplan/pddl.hpp"
#include "tierplan/sim.hpp"
#include "tierplan/solve.hpp"

namespace tierplan {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct LoadedProblem {
  std::string name;
  MtpProblem problem;
  std::vector<pddl::SchemaDomain> schemas;
};

/// Reads a tier manifest. Tier entries name a `domain_file` (relative to
/// `base`) or embed the `domain` text directly (bundle form). Initial-state
/// atoms over static predicates are moved to the static facts.
LoadedProblem load_manifest(const Json& manifest, const std::filesystem::path& base = {});
LoadedProblem load_manifest_file(const std::filesystem::path& path);

/// Replaces every `domain_file` by the embedded `domain` text.
Json bundle_manifest(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

Json to_json(const State& s, const Vocabulary& vocab);
State state_from_json(const Json& j, const Vocabulary& vocab);

Json to_json(const ValidationReport& r);
Json to_json(const Policy& p, const Vocabulary& vocab);
Policy policy_from_json(const Json& j, const VocabularyPtr& vocab);
Json fairness_json(const CompiledProblem& cp);
Json to_json(const PolicyGraph& g, const Vocabulary& vocab);
Json to_json(const MtController& mtc, const Vocabulary& vocab);
MtController mtc_from_json(const Json& j, const MtpProblem& problem);
Json triggers_json(const TriggerMap& t, const MtpProblem& problem);
Json to_json(const MtcReport& r, const MtpProblem& problem);
Json to_json(const TraceEvent& e, const MtpProblem& problem);
Json to_json(const Trace& t, const MtpProblem& problem);

/// Serialized text with a trailing newline; the exact bytes are stable.
std::string dump(const Json& j);

}  // namespace tierplan
