#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "btv/trace_json.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace btv;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string model(const char* name) { return oracle::model_path(name); }

fs::path temp_file(const std::string& name, const std::string& content = {}) {
  const fs::path dir = fs::temp_directory_path() / "btv_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  if (!content.empty()) std::ofstream(p) << content;
  return p;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void check_verdict_schema(const nlohmann::json& doc) {
  REQUIRE(doc.is_object());
  CHECK(doc["status"].is_string());
  CHECK(doc["states_explored"].is_number_unsigned());
  CHECK(doc["transitions"].is_number_unsigned());
  CHECK((doc["violated_invariant"].is_null() || doc["violated_invariant"].is_string()));
  CHECK(doc["detail"].is_string());
  CHECK((doc["failing_event"].is_null() || doc["failing_event"].is_object()));
  REQUIRE(doc["counterexample"].is_array());
  for (const auto& step : doc["counterexample"]) {
    CHECK(step["step"].is_number_unsigned());
    CHECK(step["event"].is_string());
    CHECK(step["node"].is_string());
    CHECK((step["child"].is_null() || step["child"].is_string()));
    CHECK((step["outcome"].is_null() || step["outcome"].is_string()));
    CHECK(step["state_delta"]["nodes"].is_object());
    CHECK(step["state_delta"]["env"].is_object());
    CHECK(step["state"]["nodes"].is_object());
  }
  CHECK(doc["stats"]["peak_frontier"].is_number_unsigned());
  CHECK(doc["stats"]["depth"].is_number_unsigned());
  CHECK(doc["stats"]["wall_time_ms"].is_number());
  CHECK(doc["stats"]["workers"].is_number_unsigned());
  CHECK(doc["model"]["digest"].is_string());
}

}  // namespace

TEST_CASE("exit codes depend on the status only") {
  CHECK(cli::exit_code(Status::Holds) == 0);
  CHECK(cli::exit_code(Status::Violated) == 1);
  CHECK(cli::exit_code(Status::Deadlock) == 1);
  CHECK(cli::exit_code(Status::DomainViolation) == 1);
  CHECK(cli::exit_code(Status::BoundExceeded) == 3);
}

TEST_CASE("validate") {
  const Run ok = run({"validate", model("robot_wall.bt")});
  CHECK(ok.code == 0);
  CHECK(ok.out == "OK: 4 nodes, ids BFS-consistent\n");

  const auto two_roots = temp_file("two_roots.bt", "tree { root r1 { action a; } root r2 { action b; } }\n");
  const Run bad = run({"validate", two_roots.string()});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("REQ1") != std::string::npos);

  const Run json = run({"validate", two_roots.string(), "--output", "json"});
  CHECK(json.code == 1);
  const auto doc = nlohmann::json::parse(json.out);
  CHECK(doc["ok"] == false);
  CHECK(doc["violations"][0]["requirement"] == "REQ1");

  const Run missing = run({"validate", "/nonexistent/file.bt"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  const auto syntax = temp_file("syntax.bt", "tree { root { action a } }\n");
  const Run parse_error = run({"validate", syntax.string()});
  CHECK(parse_error.code == 2);
  CHECK(parse_error.err.find("1:24:") != std::string::npos);
}

TEST_CASE("check") {
  const Run holds = run({"check", model("robot_wall.bt")});
  CHECK(holds.code == 0);
  CHECK(holds.out.rfind("HOLDS — invariant safe; 725 states", 0) == 0);

  const Run violated = run({"check", model("robot_wall_buggy.bt")});
  CHECK(violated.code == 1);
  CHECK(violated.out.rfind("VIOLATED — invariant safe fails", 0) == 0);
  CHECK(violated.out.find("69. action_ticked(action_1) -> SUCCESS   [distance_to_object: 3 -> 2]") !=
        std::string::npos);
  CHECK(violated.out.find("final env: distance_to_object=2, time=7, prev_time=6") != std::string::npos);

  const Run json = run({"check", model("robot_wall_buggy.bt"), "--output", "json"});
  CHECK(json.code == 1);
  const auto doc = nlohmann::json::parse(json.out);
  check_verdict_schema(doc);
  CHECK(doc["status"] == "VIOLATED");
  CHECK(doc["counterexample"].size() == 69);

  const Run bounded = run({"check", model("big_model.bt"), "--max-states", "10"});
  CHECK(bounded.code == 3);
  CHECK(bounded.out.rfind("BOUND_EXCEEDED", 0) == 0);

  const Run shallow = run({"check", model("big_model.bt"), "--max-depth", "3", "--output", "json"});
  CHECK(shallow.code == 3);
  CHECK(nlohmann::json::parse(shallow.out)["status"] == "BOUND_EXCEEDED");
}

TEST_CASE("JSON verdicts of every bundled model follow the schema") {
  for (const char* name : {"robot_wall.bt", "robot_wall_buggy.bt", "fallback_running.bt", "big_model.bt", "wide_choice.bt"}) {
    CAPTURE(name);
    for (const char* workers : {"1", "4"}) {
      const Run r = run({"check", model(name), "--output", "json", "--workers", workers});
      const auto doc = nlohmann::json::parse(r.out);
      check_verdict_schema(doc);
      CHECK(r.code == cli::exit_code(parse_status(doc["status"].get<std::string>()).value()));
    }
  }
}

TEST_CASE("check writes a trace file that replays") {
  const auto trace = temp_file("violation.json");
  fs::remove(trace);
  const Run r = run({"check", model("robot_wall_buggy.bt"), "--trace-out", trace.string()});
  CHECK(r.code == 1);
  const Model m = load_model(model("robot_wall_buggy.bt"));
  const auto doc = nlohmann::json::parse(read_file(trace));
  const MachineState end = replay(m, trace_from_json(m, doc));
  CHECK(end.env.values[0] == 2);
}

TEST_CASE("simulate the wall model") {
  const Run r = run({"simulate", model("robot_wall.bt"), "--ticks", "8"});
  CHECK(r.code == 0);
  const auto out = lines(r.out);
  REQUIRE(out.size() == 8);
  for (int k = 0; k < 6; ++k) {
    CHECK(out[k].rfind("cycle " + std::to_string(k + 1) + ": SUCCESS  distance_to_object=" + std::to_string(9 - k), 0) ==
          0);
  }
  CHECK(out[6] == "cycle 7: FAILURE  distance_to_object=4, time=7, prev_time=6");
  CHECK(out[7] == "cycle 8: FAILURE  distance_to_object=4, time=8, prev_time=7");
}

TEST_CASE("simulate a single condition") {
  const auto p = temp_file("single.bt", "tree { root { condition c; } }\ncondition c { success_when: true; }\n");
  const Run r = run({"simulate", p.string(), "--ticks", "1"});
  CHECK(r.code == 0);
  CHECK(r.out == "cycle 1: SUCCESS\n");
}

TEST_CASE("random simulation is reproducible from the seed") {
  const std::vector<std::string> args{"simulate", model("big_model.bt"), "--policy", "random", "--seed", "7",
                                      "--ticks", "40"};
  const Run a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto other = args;
  other[5] = "8";
  CHECK(run(other).out != a.out);
}

TEST_CASE("simulate trace output replays") {
  const auto trace = temp_file("sim.json");
  const Run r = run({"simulate", model("big_model.bt"), "--ticks", "5", "--trace-out", trace.string(), "--output",
                     "json"});
  CHECK(r.code == 0);
  const auto printed = nlohmann::json::parse(r.out);
  CHECK(printed["cycles"].size() == 5);
  const Model m = load_model(model("big_model.bt"));
  const auto doc = nlohmann::json::parse(read_file(trace));
  CHECK(doc["status"] == "TRACE");
  const MachineState end = replay(m, trace_from_json(m, doc));
  CHECK(is_cycle_start(end));
}

TEST_CASE("simulate reports domain violations") {
  const auto p = temp_file("overflow.bt", "tree { root { action a; } }\nenv { var x: int in 0..2 = 0; }\n"
                                          "action a { outcome SUCCESS when true { x := x + 1; } }\n");
  const Run r = run({"simulate", p.string(), "--ticks", "5"});
  CHECK(r.code == 1);
  CHECK(lines(r.out).size() == 2);
  CHECK(r.err.find("cycle 3") != std::string::npos);
}

TEST_CASE("simulation stays on the checker's state graph") {
  for (const char* name : {"robot_wall.bt", "big_model.bt", "fallback_running.bt"}) {
    CAPTURE(name);
    const Model m = load_model(model(name));
    ExploreOptions o;
    o.keep_states = true;
    const Verdict v = explore(m, o);
    const std::set<MachineState> reached(v.reachable.begin(), v.reachable.end());
    Scheduler sched = Scheduler::deterministic();
    MachineState s = initial_state(m);
    for (int k = 0; k < 150; ++k) {
      const CycleResult c = tick_cycle(m, s, sched);
      MachineState t = s;
      for (const Event& e : c.trace) {
        t = apply_event(m, t, e);
        REQUIRE(reached.count(t));
      }
      s = c.state;
    }
  }
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"check"}).code == 2);
  CHECK(run({"simulate", model("robot_wall.bt"), "--ticks", "0"}).code == 2);
  CHECK(run({"simulate", model("robot_wall.bt"), "--policy", "greedy"}).code == 2);
  CHECK(run({"check", model("robot_wall.bt"), "--max-states", "0"}).code == 2);
  CHECK(run({"check", model("robot_wall.bt"), "--output", "xml"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}
