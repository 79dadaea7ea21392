#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "btv/core.hpp"
#include "btv/envmodel.hpp"

namespace btv {

/// An elaborated model: topology, environment and one behavior per leaf.
struct Model {
  Tree tree;
  EnvSpec env;
  std::vector<LeafBehavior> behaviors;

  const ConditionBehavior& condition(NodeIndex n) const;
  const ActionBehavior& action(NodeIndex n) const;
};

/// Dynamic per-node variables plus the environment valuation.
struct MachineState {
  std::vector<bool> ticked;
  std::vector<TickResult> result;
  std::vector<bool> analyzing_subtree;
  EnvState env;

  auto operator<=>(const MachineState&) const = default;
};

MachineState initial_state(const Model& model);

/// True when no node is ticked, i.e. a tick cycle may start here.
bool is_cycle_start(const MachineState& state);

/// Violations of the structural state predicates: a result implies the node
/// was ticked, and a ticked non-root node has a ticked parent.
std::vector<std::string> state_invariant_violations(const Tree& tree, const MachineState& state);

enum class EventKind : std::uint8_t {
  TickRoot, RootTicked, ResultArrived, RootReinitialize,
  FbInitial, FbSuccess, FbRunning, FbFailure, FbContinue,
  SeqInitial, SeqSuccess, SeqRunning, SeqFailure, SeqContinue,
  CondOutcome, ActOutcome,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct Outcome {
  TickResult result = TickResult::Success;
  /// Index of the action's outcome rule; 0 for conditions.
  std::uint32_t rule = 0;

  auto operator<=>(const Outcome&) const = default;
};

struct Event {
  EventKind kind = EventKind::TickRoot;
  NodeIndex node = 0;
  std::optional<NodeIndex> child;
  std::optional<Outcome> outcome;

  auto operator<=>(const Event&) const = default;
};

/// "sequence_ticked_continue(sequence_1, action_1)", "action_ticked(action_1) -> SUCCESS".
std::string describe(const Model& model, const Event& e);

/// Every event whose guard holds, ordered by node n_id, then event kind,
/// then outcome rule.
std::vector<Event> enabled_events(const Model& model, const MachineState& state);

bool is_enabled(const Model& model, const MachineState& state, const Event& e);

/// Successor of `state` under `e`. Throws NotEnabledError if the guard does
/// not hold and DomainViolation if an action effect leaves a domain.
MachineState apply_event(const Model& model, const MachineState& state, const Event& e);

/// Chooses among enabled events during simulation.
class Scheduler {
 public:
  /// Fixed priority: tick_root first, then the deepest control-flow event,
  /// then leaf events; ties broken by smallest n_id and outcome rule.
  static Scheduler deterministic();
  /// Uniform choice driven by a seeded mt19937_64.
  static Scheduler random(std::uint64_t seed);

  std::size_t pick(const Model& model, std::span<const Event> enabled);
  bool is_random() const { return rng_.has_value(); }

 private:
  std::optional<std::mt19937_64> rng_;
};

struct CycleResult {
  MachineState state;
  TickResult root_result = TickResult::Unknown;
  std::vector<Event> trace;
};

/// Raised when no event is enabled before the cycle completes.
class DeadlockError : public Error {
 public:
  DeadlockError(std::string message, std::vector<Event> partial_trace, MachineState state)
      : Error(std::move(message)), trace_(std::move(partial_trace)), state_(std::move(state)) {}
  const std::vector<Event>& trace() const noexcept { return trace_; }
  const MachineState& state() const noexcept { return state_; }

 private:
  std::vector<Event> trace_;
  MachineState state_;
};

/// Raised when a cycle exceeds its step budget.
class NonTerminationError : public Error {
 public:
  NonTerminationError(std::string message, std::vector<Event> partial_trace)
      : Error(std::move(message)), trace_(std::move(partial_trace)) {}
  const std::vector<Event>& trace() const noexcept { return trace_; }

 private:
  std::vector<Event> trace_;
};

/// Upper bound on events in one cycle of an n-node tree.
inline std::size_t cycle_step_budget(std::size_t n_nodes) { return 4 * n_nodes + 2; }

/// Runs events from a cycle-start state until root_reinitialize has fired.
CycleResult tick_cycle(const Model& model, const MachineState& state, Scheduler& scheduler);

/// Classic recursive tick used as an oracle for the event machine: sequences
/// run children left to right until one does not succeed, fallbacks until
/// one does not fail. Applies the root-result hook at the end. Throws
/// OracleInapplicable if a leaf has more than one enabled outcome.
std::pair<TickResult, EnvState> reference_tick(const Model& model, const EnvState& env);

}  // namespace btv
