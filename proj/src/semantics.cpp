#include "btv/semantics.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <tuple>

namespace btv {

const ConditionBehavior& Model::condition(NodeIndex n) const {
  return std::get<ConditionBehavior>(behaviors.at(n));
}

const ActionBehavior& Model::action(NodeIndex n) const {
  return std::get<ActionBehavior>(behaviors.at(n));
}

MachineState initial_state(const Model& model) {
  const std::size_t n = model.tree.size();
  return MachineState{std::vector<bool>(n, false), std::vector<TickResult>(n, TickResult::Unknown),
                      std::vector<bool>(n, false), model.env.initial_state()};
}

bool is_cycle_start(const MachineState& state) {
  return std::none_of(state.ticked.begin(), state.ticked.end(), [](bool t) { return t; });
}

std::vector<std::string> state_invariant_violations(const Tree& tree, const MachineState& state) {
  std::vector<std::string> out;
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    if (state.result[n] != TickResult::Unknown && !state.ticked[n]) {
      out.push_back("node '" + tree.name(n) + "' has result " +
                    std::string(to_string(state.result[n])) + " but is not ticked");
    }
    if (tree.type(n) == NodeType::Condition && state.result[n] == TickResult::Running) {
      out.push_back("condition '" + tree.name(n) + "' holds RUNNING");
    }
    if (auto p = tree.parent(n); p && state.ticked[n] && !state.ticked[*p]) {
      out.push_back("node '" + tree.name(n) + "' is ticked but its parent '" + tree.name(*p) +
                    "' is not");
    }
  }
  return out;
}

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 16> kEventNames{{
    {EventKind::TickRoot, "tick_root"},
    {EventKind::RootTicked, "root_ticked"},
    {EventKind::ResultArrived, "result_arrived"},
    {EventKind::RootReinitialize, "root_reinitialize"},
    {EventKind::FbInitial, "fallback_ticked_initial"},
    {EventKind::FbSuccess, "fallback_ticked_success"},
    {EventKind::FbRunning, "fallback_ticked_running"},
    {EventKind::FbFailure, "fallback_ticked_failure"},
    {EventKind::FbContinue, "fallback_ticked_continue"},
    {EventKind::SeqInitial, "sequence_ticked_initial"},
    {EventKind::SeqSuccess, "sequence_ticked_success"},
    {EventKind::SeqRunning, "sequence_ticked_running"},
    {EventKind::SeqFailure, "sequence_ticked_failure"},
    {EventKind::SeqContinue, "sequence_ticked_continue"},
    {EventKind::CondOutcome, "condition_ticked"},
    {EventKind::ActOutcome, "action_ticked"},
}};

bool is_leaf_event(EventKind kind) {
  return kind == EventKind::CondOutcome || kind == EventKind::ActOutcome;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kEventNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (const auto& [k, n] : kEventNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string describe(const Model& model, const Event& e) {
  std::string out(to_string(e.kind));
  out += "(" + model.tree.name(e.node);
  if (e.child) out += ", " + model.tree.name(*e.child);
  out += ")";
  if (e.outcome) {
    out += " -> ";
    out += to_string(e.outcome->result);
    if (e.kind == EventKind::ActOutcome && model.action(e.node).outcomes.size() > 1) {
      out += " [rule " + std::to_string(e.outcome->rule) + "]";
    }
  }
  return out;
}

namespace {

/// Ticked child with the largest n_id.
std::optional<NodeIndex> last_ticked(std::span<const NodeIndex> children, const MachineState& s) {
  for (auto it = children.rbegin(); it != children.rend(); ++it) {
    if (s.ticked[*it]) return *it;
  }
  return std::nullopt;
}

/// Unticked child with the smallest n_id.
std::optional<NodeIndex> first_unticked(std::span<const NodeIndex> children,
                                        const MachineState& s) {
  for (NodeIndex c : children) {
    if (!s.ticked[c]) return c;
  }
  return std::nullopt;
}

void node_events(const Model& model, const MachineState& s, NodeIndex n, std::vector<Event>& out) {
  const Tree& tree = model.tree;
  const auto children = tree.children(n);
  const bool pending = s.ticked[n] && s.result[n] == TickResult::Unknown;

  switch (tree.type(n)) {
    case NodeType::Root: {
      const NodeIndex child = children.front();
      if (!s.ticked[n] && s.result[n] == TickResult::Unknown) {
        out.push_back({EventKind::TickRoot, n, std::nullopt, std::nullopt});
      }
      if (s.ticked[n] && !s.ticked[child]) {
        out.push_back({EventKind::RootTicked, n, child, std::nullopt});
      }
      if (pending && s.result[child] != TickResult::Unknown) {
        out.push_back({EventKind::ResultArrived, n, child, std::nullopt});
      }
      if (s.ticked[n] && s.result[n] != TickResult::Unknown) {
        out.push_back({EventKind::RootReinitialize, n, std::nullopt, std::nullopt});
      }
      break;
    }
    case NodeType::Sequence:
    case NodeType::Fallback: {
      if (!pending) break;
      const bool fallback = tree.type(n) == NodeType::Fallback;
      const auto last = last_ticked(children, s);
      if (!last) {
        out.push_back({fallback ? EventKind::FbInitial : EventKind::SeqInitial, n,
                       children.front(), std::nullopt});
        break;
      }
      const auto next = first_unticked(children, s);
      switch (s.result[*last]) {
        case TickResult::Unknown:
          break;  // child subtree still resolving
        case TickResult::Running:
          out.push_back({fallback ? EventKind::FbRunning : EventKind::SeqRunning, n, std::nullopt,
                         std::nullopt});
          break;
        case TickResult::Success:
          if (fallback) {
            out.push_back({EventKind::FbSuccess, n, std::nullopt, std::nullopt});
          } else if (next) {
            out.push_back({EventKind::SeqContinue, n, *next, std::nullopt});
          } else {
            out.push_back({EventKind::SeqSuccess, n, std::nullopt, std::nullopt});
          }
          break;
        case TickResult::Failure:
          if (!fallback) {
            out.push_back({EventKind::SeqFailure, n, std::nullopt, std::nullopt});
          } else if (next) {
            out.push_back({EventKind::FbContinue, n, *next, std::nullopt});
          } else {
            out.push_back({EventKind::FbFailure, n, std::nullopt, std::nullopt});
          }
          break;
      }
      break;
    }
    case NodeType::Condition: {
      if (!pending) break;
      const bool holds = eval_predicate(model.condition(n).success_when, model.env, s.env);
      out.push_back({EventKind::CondOutcome, n, std::nullopt,
                     Outcome{holds ? TickResult::Success : TickResult::Failure, 0}});
      break;
    }
    case NodeType::Action: {
      if (!pending) break;
      const auto& outcomes = model.action(n).outcomes;
      for (std::uint32_t i = 0; i < outcomes.size(); ++i) {
        if (eval_predicate(outcomes[i].guard, model.env, s.env)) {
          out.push_back({EventKind::ActOutcome, n, std::nullopt, Outcome{outcomes[i].result, i}});
        }
      }
      break;
    }
  }
}

}  // namespace

std::vector<Event> enabled_events(const Model& model, const MachineState& state) {
  std::vector<Event> out;
  for (NodeIndex n : model.tree.by_id()) node_events(model, state, n, out);
  return out;
}

bool is_enabled(const Model& model, const MachineState& state, const Event& e) {
  if (e.node >= model.tree.size()) return false;
  std::vector<Event> candidates;
  node_events(model, state, e.node, candidates);
  return std::find(candidates.begin(), candidates.end(), e) != candidates.end();
}

MachineState apply_event(const Model& model, const MachineState& state, const Event& e) {
  if (!is_enabled(model, state, e)) {
    throw NotEnabledError("event " +
                          (e.node < model.tree.size() ? describe(model, e)
                                                      : std::string(to_string(e.kind))) +
                          " is not enabled");
  }
  const Tree& tree = model.tree;
  MachineState next = state;
  auto resolve_node = [&](TickResult r) {
    next.result[e.node] = r;
    if (auto p = tree.parent(e.node)) next.analyzing_subtree[*p] = false;
  };

  switch (e.kind) {
    case EventKind::TickRoot:
      next.ticked[e.node] = true;
      break;
    case EventKind::RootTicked:
      next.ticked[*e.child] = true;
      next.analyzing_subtree[*e.child] = true;
      break;
    case EventKind::ResultArrived:
      next.result[e.node] = state.result[*e.child];
      next.env = apply_effects(model.env.root_result_hook, model.env, state.env, Overflow::Clamp);
      break;
    case EventKind::RootReinitialize:
      std::fill(next.ticked.begin(), next.ticked.end(), false);
      std::fill(next.result.begin(), next.result.end(), TickResult::Unknown);
      break;
    case EventKind::FbInitial:
    case EventKind::FbContinue:
    case EventKind::SeqInitial:
    case EventKind::SeqContinue:
      next.ticked[*e.child] = true;
      next.analyzing_subtree[e.node] = true;
      break;
    case EventKind::FbSuccess:
    case EventKind::SeqSuccess:
      resolve_node(TickResult::Success);
      break;
    case EventKind::FbRunning:
    case EventKind::SeqRunning:
      resolve_node(TickResult::Running);
      break;
    case EventKind::FbFailure:
    case EventKind::SeqFailure:
      resolve_node(TickResult::Failure);
      break;
    case EventKind::CondOutcome:
      resolve_node(e.outcome->result);
      break;
    case EventKind::ActOutcome: {
      const auto& rule = model.action(e.node).outcomes.at(e.outcome->rule);
      next.env = apply_effects(rule.effects, model.env, state.env, Overflow::Error);
      resolve_node(rule.result);
      break;
    }
  }
  return next;
}

Scheduler Scheduler::deterministic() { return Scheduler{}; }

Scheduler Scheduler::random(std::uint64_t seed) {
  Scheduler s;
  s.rng_.emplace(seed);
  return s;
}

std::size_t Scheduler::pick(const Model& model, std::span<const Event> enabled) {
  if (enabled.empty()) throw std::invalid_argument("Scheduler::pick: no enabled event");
  if (rng_) return static_cast<std::size_t>((*rng_)() % enabled.size());

  auto key = [&](const Event& e) {
    const int cls = e.kind == EventKind::TickRoot ? 0 : (is_leaf_event(e.kind) ? 2 : 1);
    const std::int64_t depth = cls == 1 ? -static_cast<std::int64_t>(model.tree.depth(e.node)) : 0;
    const std::uint32_t rule = e.outcome ? e.outcome->rule : 0;
    return std::tuple(cls, depth, model.tree.id(e.node), rule);
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < enabled.size(); ++i) {
    if (key(enabled[i]) < key(enabled[best])) best = i;
  }
  return best;
}

CycleResult tick_cycle(const Model& model, const MachineState& state, Scheduler& scheduler) {
  if (!is_cycle_start(state)) {
    throw std::invalid_argument("tick_cycle: state is not at the start of a cycle");
  }
  CycleResult out{state, TickResult::Unknown, {}};
  const std::size_t budget = cycle_step_budget(model.tree.size());
  while (true) {
    if (out.trace.size() >= budget) {
      throw NonTerminationError("cycle did not complete within " + std::to_string(budget) +
                                    " events",
                                std::move(out.trace));
    }
    const auto enabled = enabled_events(model, out.state);
    if (enabled.empty()) {
      throw DeadlockError("no event enabled after " + std::to_string(out.trace.size()) +
                              " events of the cycle",
                          std::move(out.trace), std::move(out.state));
    }
    const Event e = enabled[scheduler.pick(model, enabled)];
    out.state = apply_event(model, out.state, e);
    out.trace.push_back(e);
    if (e.kind == EventKind::ResultArrived) out.root_result = out.state.result[e.node];
    if (e.kind == EventKind::RootReinitialize) return out;
  }
}

namespace {

TickResult reference_node(const Model& model, NodeIndex n, EnvState& env) {
  const Tree& tree = model.tree;
  switch (tree.type(n)) {
    case NodeType::Root:
      return reference_node(model, tree.children(n).front(), env);
    case NodeType::Sequence:
      for (NodeIndex c : tree.children(n)) {
        const TickResult r = reference_node(model, c, env);
        if (r != TickResult::Success) return r;
      }
      return TickResult::Success;
    case NodeType::Fallback:
      for (NodeIndex c : tree.children(n)) {
        const TickResult r = reference_node(model, c, env);
        if (r != TickResult::Failure) return r;
      }
      return TickResult::Failure;
    case NodeType::Condition:
      return eval_predicate(model.condition(n).success_when, model.env, env) ? TickResult::Success
                                                                             : TickResult::Failure;
    case NodeType::Action: {
      const ActionOutcome* chosen = nullptr;
      for (const auto& o : model.action(n).outcomes) {
        if (!eval_predicate(o.guard, model.env, env)) continue;
        if (chosen) {
          throw OracleInapplicable("action '" + tree.name(n) + "' has several enabled outcomes");
        }
        chosen = &o;
      }
      if (!chosen) throw OracleInapplicable("action '" + tree.name(n) + "' has no enabled outcome");
      env = apply_effects(chosen->effects, model.env, env, Overflow::Error);
      return chosen->result;
    }
  }
  return TickResult::Unknown;
}

}  // namespace

std::pair<TickResult, EnvState> reference_tick(const Model& model, const EnvState& env) {
  EnvState work = env;
  const TickResult r = reference_node(model, model.tree.root(), work);
  work = apply_effects(model.env.root_result_hook, model.env, work, Overflow::Clamp);
  return {r, std::move(work)};
}

}  // namespace btv
