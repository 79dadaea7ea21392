#include "cli.hpp"

#include <fstream>
#include <ostream>
#include <thread>

#include "CLI11.hpp"

#include "btv/frontend.hpp"
#include "btv/trace_json.hpp"

namespace btv::cli {

namespace {

struct RunConfig {
  std::string command;
  std::string model_path;
  std::uint64_t max_states = 1'000'000;
  std::optional<std::uint64_t> max_depth;
  std::uint64_t ticks = 10;
  std::uint64_t seed = 0;
  std::string policy = "deterministic";
  std::string output = "text";
  std::string trace_out;
  unsigned workers = 1;
};

std::string value_text(const EnvSpec& env, std::size_t slot, Value v) {
  if (env.variables[slot].domain.type == ValueType::Bool) return v != 0 ? "true" : "false";
  return std::to_string(v);
}

std::string env_delta(const EnvSpec& env, const EnvState& before, const EnvState& after) {
  std::string out;
  for (std::size_t i = 0; i < env.variables.size(); ++i) {
    if (before.values[i] == after.values[i]) continue;
    if (!out.empty()) out += ", ";
    out += env.variables[i].name + ": " + value_text(env, i, before.values[i]) + " -> " +
           value_text(env, i, after.values[i]);
  }
  return out;
}

std::string invariant_names(const EnvSpec& env) {
  if (env.invariants.empty()) return "no invariants";
  std::string out = env.invariants.size() == 1 ? "invariant " : "invariants ";
  for (std::size_t i = 0; i < env.invariants.size(); ++i) {
    if (i) out += ", ";
    out += env.invariants[i].name;
  }
  return out;
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  std::ofstream file(path);
  if (!file) throw IoError("cannot write '" + path + "'");
  file << doc.dump(2) << '\n';
  if (!file) throw IoError("cannot write '" + path + "'");
}

void print_steps(const Model& model, std::span<const TraceStep> steps, std::ostream& out) {
  MachineState before = initial_state(model);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    out << "  " << (k + 1) << ". " << describe(model, steps[k].event);
    const std::string delta = env_delta(model.env, before.env, steps[k].state.env);
    if (!delta.empty()) out << "   [" << delta << "]";
    out << '\n';
    before = steps[k].state;
  }
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
  const ModelDocument doc = parse(read_file(config.model_path));
  const TreeSpec spec = build_tree_spec(doc, IdNumbering::Explicit);
  const ValidationReport report = validate_tree(spec);
  if (config.output == "json") {
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : report.violations) {
      violations.push_back({{"requirement", std::string(to_string(v.requirement))}, {"detail", v.detail}});
    }
    out << nlohmann::json{{"ok", report.ok()}, {"nodes", spec.size()}, {"violations", violations}}.dump(2)
        << '\n';
    if (!report.ok()) return kFailed;
    elaborate(doc);
    return kOk;
  }
  if (!report.ok()) {
    out << "INVALID: " << spec.size() << " nodes\n";
    for (const auto& v : report.violations) out << "  " << to_string(v.requirement) << ": " << v.detail << '\n';
    return kFailed;
  }
  const bool bfs_consistent = !report.has(Requirement::IdBfsWarn);
  for (const auto& v : report.violations) {
    out << "warning: " << to_string(v.requirement) << ": " << v.detail << '\n';
  }
  elaborate(doc);
  out << "OK: " << spec.size() << " nodes, ids " << (bfs_consistent ? "BFS-consistent" : "not BFS-consistent")
      << '\n';
  return kOk;
}

int cmd_check(const RunConfig& config, std::ostream& out) {
  const Model model = load_model(config.model_path);
  ExploreOptions options;
  options.max_states = config.max_states;
  options.max_depth = config.max_depth;
  options.workers = config.workers;
  const Verdict verdict = explore(model, options);

  if (!config.trace_out.empty() && !verdict.counterexample.empty()) {
    write_json_file(config.trace_out, verdict_to_json(model, verdict));
  }
  if (config.output == "json") {
    out << verdict_to_json(model, verdict).dump(2) << '\n';
    return exit_code(verdict.status);
  }

  out << to_string(verdict.status) << " — ";
  switch (verdict.status) {
    case Status::Holds:
      out << invariant_names(model.env) << "; " << verdict.states_explored << " states, " << verdict.transitions
          << " transitions\n";
      break;
    case Status::Violated:
      out << "invariant " << verdict.violated_invariant.value_or("?") << " fails; " << verdict.states_explored
          << " states explored\n";
      break;
    case Status::BoundExceeded:
      out << verdict.detail << "; " << verdict.states_explored << " states explored, depth "
          << verdict.stats.depth << '\n';
      break;
    case Status::Deadlock:
    case Status::DomainViolation:
      out << verdict.detail << "; " << verdict.states_explored << " states explored\n";
      break;
  }
  if (!verdict.counterexample.empty() || verdict.failing_event) {
    out << "counterexample (" << verdict.counterexample.size() << " steps):\n";
    print_steps(model, verdict.counterexample, out);
    if (verdict.failing_event) out << "  failing event: " << describe(model, *verdict.failing_event) << '\n';
    const EnvState& last =
        verdict.counterexample.empty() ? model.env.initial_state() : verdict.counterexample.back().state.env;
    out << "final env: " << format_valuation(model.env, last) << '\n';
  }
  return exit_code(verdict.status);
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Model model = load_model(config.model_path);
  Scheduler scheduler = config.policy == "random" ? Scheduler::random(config.seed) : Scheduler::deterministic();

  MachineState state = initial_state(model);
  std::vector<TraceStep> steps;
  nlohmann::json cycles = nlohmann::json::array();
  auto record = [&](std::span<const Event> events) {
    MachineState s = steps.empty() ? initial_state(model) : steps.back().state;
    for (const Event& e : events) {
      s = apply_event(model, s, e);
      steps.push_back({e, s});
    }
  };
  auto finish = [&](int code) {
    if (!config.trace_out.empty()) write_json_file(config.trace_out, trace_document(model, steps));
    if (config.output == "json") {
      out << nlohmann::json{{"cycles", cycles}, {"trace", steps_to_json(model, steps)}}.dump(2) << '\n';
    }
    return code;
  };

  for (std::uint64_t cycle = 1; cycle <= config.ticks; ++cycle) {
    try {
      CycleResult result = tick_cycle(model, state, scheduler);
      record(result.trace);
      state = std::move(result.state);
      const std::string env = format_valuation(model.env, state.env);
      if (config.output == "json") {
        cycles.push_back({{"cycle", cycle}, {"result", std::string(to_string(result.root_result))},
                          {"env", state_to_json(model, state)["env"]}});
      } else {
        out << "cycle " << cycle << ": " << to_string(result.root_result);
        if (!env.empty()) out << "  " << env;
        out << '\n';
      }
    } catch (const DeadlockError& e) {
      record(e.trace());
      err << "cycle " << cycle << ": " << e.what() << '\n';
      return finish(kFailed);
    } catch (const NonTerminationError& e) {
      record(e.trace());
      err << "cycle " << cycle << ": " << e.what() << '\n';
      return finish(kFailed);
    } catch (const DomainViolation& e) {
      err << "cycle " << cycle << ": " << e.what() << '\n';
      return finish(kFailed);
    }
  }
  return finish(kOk);
}

}  // namespace

int exit_code(Status status) {
  switch (status) {
    case Status::Holds: return kOk;
    case Status::BoundExceeded: return kBoundExceeded;
    case Status::Violated:
    case Status::Deadlock:
    case Status::DomainViolation: return kFailed;
  }
  return kFailed;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  config.workers = std::max(1u, std::thread::hardware_concurrency());

  CLI::App app{"Behavior tree safety checker"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model", config.model_path, "Model file (.bt)")->required();
    sub->add_option("--output", config.output, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
  };
  CLI::App* validate = app.add_subcommand("validate", "Check tree well-formedness");
  add_common(validate);

  CLI::App* check = app.add_subcommand("check", "Explore all reachable states and check invariants");
  add_common(check);
  check->add_option("--max-states", config.max_states, "State budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  check->add_option("--max-depth", config.max_depth, "BFS depth budget");
  check->add_option("--workers", config.workers, "Parallel expansion workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  check->add_option("--trace-out", config.trace_out, "Write the counterexample as JSON");

  CLI::App* simulate = app.add_subcommand("simulate", "Run consecutive tick cycles");
  add_common(simulate);
  simulate->add_option("--ticks", config.ticks, "Number of tick cycles")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", config.seed, "Seed for the random policy")->capture_default_str();
  simulate->add_option("--policy", config.policy, "Event scheduling policy")
      ->check(CLI::IsMember({"deterministic", "random"}))
      ->capture_default_str();
  simulate->add_option("--trace-out", config.trace_out, "Write the executed events as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  config.command = app.get_subcommands().front()->get_name();

  try {
    if (config.command == "validate") return cmd_validate(config, out);
    if (config.command == "check") return cmd_check(config, out);
    return cmd_simulate(config, out, err);
  } catch (const ValidationError& e) {
    err << config.model_path << ": " << e.what() << '\n';
    return kFailed;
  } catch (const Error& e) {
    err << config.model_path << ": " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace btv::cli
