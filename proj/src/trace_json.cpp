#include "btv/trace_json.hpp"

#include "btv/frontend.hpp"

namespace btv {

using nlohmann::json;

namespace {

json value_json(const EnvSpec& env, std::size_t slot, Value v) {
  if (env.variables[slot].domain.type == ValueType::Bool) return json(v != 0);
  return json(v);
}

json event_fields(const Model& model, const Event& e) {
  json out;
  out["event"] = std::string(to_string(e.kind));
  out["node"] = model.tree.name(e.node);
  out["child"] = e.child ? json(model.tree.name(*e.child)) : json(nullptr);
  out["outcome"] = e.outcome ? json(std::string(to_string(e.outcome->result))) : json(nullptr);
  out["rule"] = e.outcome ? json(e.outcome->rule) : json(nullptr);
  return out;
}

json node_json(const MachineState& s, NodeIndex n) {
  return json{{"ticked", static_cast<bool>(s.ticked[n])},
              {"result", std::string(to_string(s.result[n]))},
              {"analyzing_subtree", static_cast<bool>(s.analyzing_subtree[n])}};
}

json delta_json(const Model& model, const MachineState& before, const MachineState& after) {
  json nodes = json::object();
  for (NodeIndex n = 0; n < model.tree.size(); ++n) {
    json change = json::object();
    if (before.ticked[n] != after.ticked[n]) change["ticked"] = static_cast<bool>(after.ticked[n]);
    if (before.result[n] != after.result[n]) change["result"] = std::string(to_string(after.result[n]));
    if (before.analyzing_subtree[n] != after.analyzing_subtree[n]) {
      change["analyzing_subtree"] = static_cast<bool>(after.analyzing_subtree[n]);
    }
    if (!change.empty()) nodes[model.tree.name(n)] = std::move(change);
  }
  json env = json::object();
  for (std::size_t i = 0; i < model.env.variables.size(); ++i) {
    if (before.env.values[i] != after.env.values[i]) {
      env[model.env.variables[i].name] = value_json(model.env, i, after.env.values[i]);
    }
  }
  return json{{"nodes", std::move(nodes)}, {"env", std::move(env)}};
}

[[noreturn]] void bad_step(std::size_t k, const std::string& message) {
  throw TraceError("trace step " + std::to_string(k + 1) + ": " + message, k);
}

NodeIndex node_named(const Model& model, const json& value, std::size_t k, const char* field) {
  if (!value.is_string()) bad_step(k, std::string("field '") + field + "' must be a node name");
  auto n = model.tree.spec().find(value.get<std::string>());
  if (!n) bad_step(k, "unknown node '" + value.get<std::string>() + "'");
  return *n;
}

}  // namespace

json state_to_json(const Model& model, const MachineState& state) {
  json nodes = json::object();
  for (NodeIndex n = 0; n < model.tree.size(); ++n) nodes[model.tree.name(n)] = node_json(state, n);
  json env = json::object();
  for (std::size_t i = 0; i < model.env.variables.size(); ++i) {
    env[model.env.variables[i].name] = value_json(model.env, i, state.env.values[i]);
  }
  return json{{"nodes", std::move(nodes)}, {"env", std::move(env)}};
}

json steps_to_json(const Model& model, std::span<const TraceStep> steps) {
  json out = json::array();
  MachineState before = initial_state(model);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    json step = event_fields(model, steps[k].event);
    step["step"] = k + 1;
    step["state_delta"] = delta_json(model, before, steps[k].state);
    step["state"] = state_to_json(model, steps[k].state);
    out.push_back(std::move(step));
    before = steps[k].state;
  }
  return out;
}

json verdict_to_json(const Model& model, const Verdict& verdict) {
  json out;
  out["status"] = std::string(to_string(verdict.status));
  out["states_explored"] = verdict.states_explored;
  out["transitions"] = verdict.transitions;
  out["violated_invariant"] =
      verdict.violated_invariant ? json(*verdict.violated_invariant) : json(nullptr);
  out["detail"] = verdict.detail;
  out["failing_event"] =
      verdict.failing_event ? event_fields(model, *verdict.failing_event) : json(nullptr);
  out["counterexample"] = steps_to_json(model, verdict.counterexample);
  out["stats"] = json{{"peak_frontier", verdict.stats.peak_frontier},
                      {"depth", verdict.stats.depth},
                      {"wall_time_ms", verdict.stats.wall_seconds * 1000.0},
                      {"workers", verdict.stats.workers}};
  out["model"] = json{{"digest", model_digest(model)}};
  return out;
}

json trace_document(const Model& model, std::span<const TraceStep> steps) {
  json out;
  out["status"] = "TRACE";
  out["counterexample"] = steps_to_json(model, steps);
  out["model"] = json{{"digest", model_digest(model)}};
  return out;
}

std::vector<Event> trace_from_json(const Model& model, const json& doc) {
  if (!doc.is_object() || !doc.contains("counterexample") || !doc["counterexample"].is_array()) {
    throw TraceError("trace document has no 'counterexample' array", 0);
  }
  if (doc.contains("model") && doc["model"].is_object() && doc["model"].contains("digest")) {
    const auto& digest = doc["model"]["digest"];
    if (!digest.is_string() || digest.get<std::string>() != model_digest(model)) {
      throw TraceError("trace was produced for a different model", 0);
    }
  }
  std::vector<Event> out;
  const auto& steps = doc["counterexample"];
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const json& step = steps[k];
    if (!step.is_object()) bad_step(k, "expected an object");
    if (!step.contains("event") || !step["event"].is_string()) bad_step(k, "missing 'event'");
    auto kind = parse_event_kind(step["event"].get<std::string>());
    if (!kind) bad_step(k, "unknown event '" + step["event"].get<std::string>() + "'");
    if (!step.contains("node")) bad_step(k, "missing 'node'");

    Event e;
    e.kind = *kind;
    e.node = node_named(model, step["node"], k, "node");
    if (step.contains("child") && !step["child"].is_null()) {
      e.child = node_named(model, step["child"], k, "child");
    }
    if (step.contains("outcome") && !step["outcome"].is_null()) {
      if (!step["outcome"].is_string()) bad_step(k, "field 'outcome' must be a result name");
      auto result = parse_tick_result(step["outcome"].get<std::string>());
      if (!result) bad_step(k, "unknown outcome '" + step["outcome"].get<std::string>() + "'");
      std::uint32_t rule = 0;
      if (step.contains("rule") && !step["rule"].is_null()) {
        if (!step["rule"].is_number_unsigned()) bad_step(k, "field 'rule' must be a non-negative integer");
        rule = step["rule"].get<std::uint32_t>();
      }
      e.outcome = Outcome{*result, rule};
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace btv
