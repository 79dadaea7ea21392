#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "btv/semantics.hpp"

namespace btv {

enum class Status : std::uint8_t { Holds, Violated, Deadlock, DomainViolation, BoundExceeded };

std::string_view to_string(Status status);
std::optional<Status> parse_status(std::string_view text);

struct ExploreOptions {
  std::uint64_t max_states = 1'000'000;
  std::optional<std::uint64_t> max_depth;
  unsigned workers = 1;
  /// Return every discovered state in Verdict::reachable (discovery order).
  bool keep_states = false;
};

struct TraceStep {
  Event event;
  MachineState state;  // state after the event
};

struct ExploreStats {
  std::uint64_t peak_frontier = 0;
  std::uint64_t depth = 0;  // number of completed BFS layers
  double wall_seconds = 0.0;
  unsigned workers = 1;
};

struct Verdict {
  Status status = Status::Holds;
  std::uint64_t states_explored = 0;
  std::uint64_t transitions = 0;
  /// Path from the initial state. For DOMAIN_VIOLATION it ends in the state
  /// where failing_event was attempted.
  std::vector<TraceStep> counterexample;
  std::optional<std::string> violated_invariant;
  std::optional<Event> failing_event;
  std::string detail;
  ExploreStats stats;
  std::vector<MachineState> reachable;
};

/// Layer-synchronous breadth-first exploration of every interleaving from
/// the initial state. Invariants are checked on each newly discovered state;
/// deadlocks and domain violations are detected while a layer is expanded and
/// take precedence over invariant failures found in the next layer. Within a
/// layer the first problem in (frontier order, event order) wins, so the
/// verdict and state count do not depend on the worker count.
Verdict explore(const Model& model, const ExploreOptions& options = {});

/// Re-applies `trace` from the initial state. Throws TraceError naming the
/// first step whose event is not enabled.
MachineState replay(const Model& model, std::span<const Event> trace);
MachineState replay(const Model& model, std::span<const TraceStep> trace);

/// All ways a single tick cycle can end, starting from a cycle-start state.
struct CycleOutcomes {
  /// (root result, env after root_reinitialize)
  std::set<std::pair<TickResult, EnvState>> terminals;
  std::uint64_t states = 0;
  bool deadlock = false;
};

CycleOutcomes explore_cycle(const Model& model, const MachineState& start);

}  // namespace btv
