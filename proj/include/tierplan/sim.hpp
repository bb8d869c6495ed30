#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tierplan/mtc.hpp"

namespace tierplan {

/// One possible outcome of the prescribed action in the ground-truth tier.
struct Outcome {
  State successor;
  /// Index of the first ground-truth branch producing the successor.
  std::size_t branch = 0;
  /// Tier indices admitting the transition.
  std::vector<std::size_t> explained_by;
};

struct ChoiceContext {
  const MtpProblem& problem;
  const State& state;
  std::size_t tier;
  const std::string& action;
  const std::vector<Outcome>& outcomes;
  std::size_t step;
};

/// Picks the index of the outcome that ensues.
class OutcomeChooser {
 public:
  virtual ~OutcomeChooser() = default;
  virtual std::size_t choose(const ChoiceContext& ctx) = 0;
  /// Short description recorded in traces, e.g. "seeded-random:7".
  virtual std::string describe() const = 0;
};

/// Follows a list of outcome indices; steps past the end pick outcome 0.
class ScriptedChooser : public OutcomeChooser {
 public:
  explicit ScriptedChooser(std::vector<std::size_t> script) : script_(std::move(script)) {}
  std::size_t choose(const ChoiceContext& ctx) override;
  std::string describe() const override;

 private:
  std::vector<std::size_t> script_;
  std::size_t next_ = 0;
};

class RandomChooser : public OutcomeChooser {
 public:
  explicit RandomChooser(std::uint64_t seed) : seed_(seed), rng_(seed) {}
  std::size_t choose(const ChoiceContext& ctx) override;
  std::string describe() const override { return "seeded-random:" + std::to_string(seed_); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

/// Prefers outcomes whose highest explaining tier is as low as possible.
class AdversarialChooser : public OutcomeChooser {
 public:
  std::size_t choose(const ChoiceContext& ctx) override;
  std::string describe() const override { return "adversarial-lowest"; }
};

class InteractiveChooser : public OutcomeChooser {
 public:
  using Callback = std::function<std::size_t(const ChoiceContext&)>;
  explicit InteractiveChooser(Callback cb) : cb_(std::move(cb)) {}
  std::size_t choose(const ChoiceContext& ctx) override { return cb_(ctx); }
  std::string describe() const override { return "interactive"; }

 private:
  Callback cb_;
};

enum class EventKind { Step, Degrade, Goal, Stuck, Cap };

std::string to_string(EventKind k);

struct TraceEvent {
  EventKind kind = EventKind::Step;
  State state;
  std::size_t tier = 0;
  std::string action;
  std::optional<State> successor;
  std::vector<std::size_t> explained_by;
  /// Degrade origin and target.
  std::size_t from = 0;
  std::size_t to = 0;
  /// Tie notes for degrades and the reason for stuck events.
  std::string note;
};

struct Trace {
  std::string ground_truth;
  std::string chooser;
  std::vector<TraceEvent> events;
  EventKind outcome = EventKind::Cap;
};

class IllegalSuccessor : public Error {
 public:
  using Error::Error;
};

/// Tier indices whose transition relation admits (s, op, next).
std::vector<std::size_t> classify_transition(const MtpProblem& problem, const State& s, std::string_view op,
                                             const State& next);

/// Degradation target among the explaining tiers: the canonically first
/// maximal tier strictly below `current`. `tie` lists the other maximal ones.
std::optional<std::size_t> degrade_target(const MtpProblem& problem, std::size_t current,
                                          const std::vector<std::size_t>& explained_by,
                                          std::vector<std::size_t>* tie = nullptr);

/// Incremental executor. Each call to advance() consumes one outcome choice.
class Session {
 public:
  Session(const MtpProblem& problem, const MtController& mtc, std::size_t ground_truth);

  const State& state() const { return state_; }
  std::size_t tier() const { return tier_; }
  bool finished() const { return finished_; }
  const std::vector<TraceEvent>& events() const { return events_; }
  std::size_t steps() const { return steps_; }

  /// Action the controller prescribes now (first of the tier policy's set),
  /// or nothing when finished.
  std::optional<std::string> prescribed() const;
  /// Every action the tier policy allows in the current state.
  std::vector<std::string> prescribed_all() const;
  /// Outcomes of `action` in the ground-truth tier, ordered by branch.
  std::vector<Outcome> outcomes(const std::string& action) const;
  /// Executes the prescribed action with outcome `index`. Returns the events
  /// produced (a step or degrade, possibly followed by goal or stuck).
  std::vector<TraceEvent> advance(std::size_t index);
  /// Same with an explicit choice among the prescribed actions.
  std::vector<TraceEvent> advance(const std::string& action, std::size_t index);
  /// Records a cap event and finishes.
  void stop_at_cap();

 private:
  void settle(std::vector<TraceEvent>& out);

  const MtpProblem& problem_;
  const MtController& mtc_;
  std::size_t truth_;
  State state_;
  std::size_t tier_;
  bool finished_ = false;
  std::size_t steps_ = 0;
  std::vector<TraceEvent> events_;
};

Trace run_session(const MtpProblem& problem, const MtController& mtc, std::size_t ground_truth,
                  OutcomeChooser& chooser, std::size_t step_cap = 1000);

}  // namespace tierplan
