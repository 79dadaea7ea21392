#include "doctest.h"

#include "btv/frontend.hpp"
#include "btv/random_model.hpp"
#include "oracles.hpp"

using namespace btv;

namespace {

const char* kWall = R"(
tree {
  root {
    sequence sequence_1 {
      condition condition_1;
      action action_1;
    }
  }
}
env {
  var distance_to_object: int in 0..10 = 10;
  var time: int in 0..100 = 0;
  var prev_time: int in 0..100 = 0;
}
condition condition_1 { success_when: distance_to_object >= 5; }
action action_1 {
  outcome SUCCESS when true { distance_to_object := distance_to_object - 1; }
}
on_root_result { prev_time := time; time := time + 1; }
invariant safe { distance_to_object >= 3; }
)";

std::string parse_error(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "no error";
}

std::string model_error(std::string_view text) {
  try {
    elaborate(parse(text));
  } catch (const Error& e) {
    return e.what();
  }
  return "no error";
}

std::uint32_t id_of(const Model& m, std::string_view name) { return m.tree.id(m.tree.spec().find(name).value()); }

}  // namespace

TEST_CASE("wall model parses") {
  const ModelDocument doc = parse(kWall);
  REQUIRE(doc.tree.size() == 1);
  CHECK(doc.tree[0].type == NodeType::Root);
  CHECK(doc.tree[0].name == "root");
  CHECK(build_tree_spec(doc, IdNumbering::BreadthFirst).size() == 4);
  CHECK(doc.variables.size() == 3);
  CHECK(doc.invariants.size() == 1);
  CHECK(doc.invariants[0].invariant.name == "safe");
  CHECK(doc.root_result_hook.size() == 2);
  CHECK(doc.conditions.size() == 1);
  REQUIRE(doc.actions.size() == 1);
  CHECK(doc.actions[0].outcomes.size() == 1);
  CHECK(doc.variables[1].decl.domain == Domain::range(0, 100));
}

TEST_CASE("wall model elaborates with breadth-first ids") {
  const Model m = elaborate(parse(kWall));
  CHECK(id_of(m, "root") == 0);
  CHECK(id_of(m, "sequence_1") == 1);
  CHECK(id_of(m, "condition_1") == 2);
  CHECK(id_of(m, "action_1") == 3);
  CHECK(validate_tree(m.tree.spec()).ok());
  CHECK(m.env.initial_state().values == std::vector<Value>{10, 0, 0});
  CHECK(m.condition(2).success_when ==
        Expr::binary(Expr::Op::Ge, Expr::var("distance_to_object"), Expr::integer(5)));
  CHECK(m.action(3).outcomes[0].effects[0].target == "distance_to_object");
}

TEST_CASE("bundled model file matches the inline listing") {
  const Model file = load_model(oracle::model_path("robot_wall.bt"));
  const Model inline_model = elaborate(parse(kWall));
  CHECK(file.tree == inline_model.tree);
  CHECK(file.env == inline_model.env);
  CHECK(file.behaviors == inline_model.behaviors);
}

TEST_CASE("three-level tree gets ids in breadth-first order") {
  const Model m = elaborate(parse(R"(
tree {
  root {
    fallback top {
      sequence left { condition a; action b; }
      sequence right { condition c; action d; }
    }
  }
}
condition a { success_when: true; }
condition c { success_when: false; }
action b { outcome SUCCESS when true { } }
action d { outcome FAILURE when true { } }
)"));
  CHECK(id_of(m, "root") == 0);
  CHECK(id_of(m, "top") == 1);
  CHECK(id_of(m, "left") == 2);
  CHECK(id_of(m, "right") == 3);
  CHECK(id_of(m, "a") == 4);
  CHECK(id_of(m, "b") == 5);
  CHECK(id_of(m, "c") == 6);
  CHECK(id_of(m, "d") == 7);
  for (NodeIndex n = 0; n < m.tree.size(); ++n) CHECK(m.tree.id(n) == n);
}

TEST_CASE("syntax errors carry positions") {
  CHECK(parse_error("").rfind("1:1:", 0) == 0);
  CHECK(parse_error("   \n  // only a comment\n").rfind("3:1:", 0) == 0);
  CHECK(parse_error("tree { root { actoin a; } }") == "1:15: unknown node kind 'actoin' (expected root, sequence, fallback, condition or action)");
  CHECK(parse_error("tree { root { action a } }").rfind("1:24:", 0) == 0);
  CHECK(parse_error("tree { root { action a; } } tree { root { action b; } }").find("duplicate 'tree'") !=
        std::string::npos);
  CHECK(parse_error("tree { root { action a; } } env { var x: int in 0..3 = 1 }").find("expected ';'") !=
        std::string::npos);
  CHECK(parse_error("tree { root { action a; } } @").find("unexpected character") != std::string::npos);
  CHECK(parse_error("env { }").find("missing 'tree' block") != std::string::npos);
  CHECK(parse_error("tree { root { action when; } }").find("reserved word 'when'") != std::string::npos);
  // comparisons do not chain
  CHECK(parse_error("tree { root { condition c; } } condition c { success_when: 1 < 2 < 3; }") != "no error");
}

TEST_CASE("duplicate node names cite both positions") {
  const std::string msg = parse_error(R"(tree {
  root {
    sequence s {
      action a;
      action a;
    }
  }
})");
  CHECK(msg == "5:7: duplicate node name 'a' (first declared at 4:7)");
}

TEST_CASE("diagnostics are deterministic") {
  const std::string bad = "tree { root { sequence s { action a; action a; } } }";
  CHECK(parse_error(bad) == parse_error(bad));
  const std::string ill = std::string(kWall) + "condition condition_1 { success_when: true; }";
  CHECK(model_error(ill) == model_error(ill));
}

TEST_CASE("elaboration errors") {
  SUBCASE("undeclared variable") {
    const std::string msg = model_error(R"(tree { root { condition c; } }
condition c { success_when: speed > 3; })");
    CHECK(msg.find("unknown variable 'speed'") != std::string::npos);
    CHECK(msg.rfind("2:", 0) == 0);
  }
  SUBCASE("type error") {
    CHECK(model_error(R"(tree { root { condition c; } }
env { var b: bool = true; }
condition c { success_when: b + 1; })")
              .find("type error") != std::string::npos);
  }
  SUBCASE("missing behavior") {
    CHECK(model_error("tree { root { sequence s { condition c; action a; } } }\ncondition c { success_when: true; }")
              .find("missing behavior for action 'a'") != std::string::npos);
  }
  SUBCASE("behavior for a control node") {
    CHECK(model_error("tree { root { sequence s { action a; } } }\naction a { outcome SUCCESS when true { } }\n"
                      "action s { outcome SUCCESS when true { } }")
              .find("node 's' is a SEQUENCE") != std::string::npos);
  }
  SUBCASE("behavior for an unknown node") {
    CHECK(model_error("tree { root { action a; } }\naction a { outcome SUCCESS when true { } }\n"
                      "condition ghost { success_when: true; }")
              .find("unknown node 'ghost'") != std::string::npos);
  }
  SUBCASE("non-exhaustive guards") {
    const std::string msg = model_error(R"(tree { root { action a; } }
env { var x: int in 0..5 = 0; }
action a { outcome SUCCESS when x < 3 { } outcome FAILURE when x > 3 { } })");
    CHECK(msg.find("not exhaustive") != std::string::npos);
    CHECK(msg.find("x=3") != std::string::npos);
  }
  SUBCASE("only a false guard") {
    CHECK(model_error("tree { root { action a; } }\naction a { outcome SUCCESS when false { } }").find("not exhaustive") !=
          std::string::npos);
  }
  SUBCASE("initial value outside the domain") {
    CHECK(model_error("tree { root { action a; } }\nenv { var x: int in 0..5 = 9; }\n"
                      "action a { outcome SUCCESS when true { } }")
              .find("initial value 9") != std::string::npos);
  }
  SUBCASE("duplicate variable") {
    CHECK(model_error("tree { root { action a; } }\nenv { var x: bool; var x: bool; }\n"
                      "action a { outcome SUCCESS when true { } }")
              .find("duplicate variable 'x'") != std::string::npos);
  }
  SUBCASE("explicit id disagreeing with breadth-first numbering") {
    CHECK(model_error("tree { root { sequence s id = 1 { action a id = 3; action b id = 2; } } }\n"
                      "action a { outcome SUCCESS when true { } }\naction b { outcome SUCCESS when true { } }")
              .find("explicit id 3") != std::string::npos);
  }
  SUBCASE("two roots") {
    try {
      elaborate(parse("tree { root r1 { action a; } root r2 { action b; } }\n"
                      "action a { outcome SUCCESS when true { } }\naction b { outcome SUCCESS when true { } }"));
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.report().has(Requirement::Req1));
    }
  }
  SUBCASE("empty sequence") {
    try {
      elaborate(parse("tree { root { sequence s { } } }"));
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.report().has(Requirement::LeafArity));
    }
  }
}

TEST_CASE("explicit ids are kept by build_tree_spec") {
  const auto doc = parse("tree { root { sequence s id = 1 { action a id = 5; action b id = 2; } } }");
  const TreeSpec explicit_ids = build_tree_spec(doc, IdNumbering::Explicit);
  const TreeSpec bfs = build_tree_spec(doc, IdNumbering::BreadthFirst);
  CHECK(explicit_ids.nodes[explicit_ids.find("a").value()].id == 5);
  CHECK(bfs.nodes[bfs.find("a").value()].id == 2);
  const auto report = validate_tree(explicit_ids);
  CHECK(report.ok());
  CHECK(report.has(Requirement::IdBfsWarn));
}

TEST_CASE("negative literals and comments") {
  const Model m = elaborate(parse(R"(// header
tree { root { action a; } } // trailing
env { var x: int in -5..5 = -2; }
action a {
  outcome SUCCESS when x >= -1 { x := -1 - x; }
  outcome FAILURE when x < -1 { x := x + 1; }
})"));
  CHECK(m.env.variables[0].domain == Domain::range(-5, 5));
  CHECK(m.env.initial_state().values[0] == -2);
}

TEST_CASE("print and parse round-trip") {
  auto round_trip = [](const Model& m) {
    const std::string text = print_model(m);
    const Model again = elaborate(parse(text));
    CHECK(again.tree == m.tree);
    CHECK(again.env == m.env);
    CHECK(again.behaviors == m.behaviors);
    CHECK(print_model(again) == text);
    CHECK(model_digest(again) == model_digest(m));
  };
  for (const char* name : {"robot_wall.bt", "robot_wall_buggy.bt", "fallback_running.bt", "big_model.bt", "wide_choice.bt"}) {
    CAPTURE(name);
    round_trip(load_model(oracle::model_path(name)));
  }
  RandomModelOptions opts;
  opts.with_invariant = true;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    CAPTURE(seed);
    opts.deterministic = seed % 3 != 0;
    round_trip(random_model(seed, opts));
  }
}

TEST_CASE("digest distinguishes models") {
  const Model a = load_model(oracle::model_path("robot_wall.bt"));
  const Model b = load_model(oracle::model_path("robot_wall_buggy.bt"));
  CHECK(model_digest(a) != model_digest(b));
  CHECK(model_digest(a).size() == 16);
}

TEST_CASE("missing file is an I/O error") {
  CHECK_THROWS_AS(load_model("/nonexistent/model.bt"), IoError);
}
