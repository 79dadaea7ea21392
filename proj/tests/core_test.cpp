#include <random>

#include "doctest.h"

#include "btv/core.hpp"
#include "oracles.hpp"

using namespace btv;

namespace {

TreeSpec wall_spec() {
  TreeSpec s;
  const auto root = s.add("root", NodeType::Root, 0);
  const auto seq = s.add("sequence_1", NodeType::Sequence, 1, root);
  s.add("condition_1", NodeType::Condition, 2, seq);
  s.add("action_1", NodeType::Action, 3, seq);
  return s;
}

std::vector<Requirement> tags(const ValidationReport& r) {
  std::vector<Requirement> out;
  for (const auto& v : r.violations) out.push_back(v.requirement);
  return out;
}

Relation<int> random_relation(std::mt19937_64& rng, int n, bool dag) {
  Relation<int> rel;
  const int edges = static_cast<int>(rng() % static_cast<unsigned>(n * 2 + 1));
  for (int k = 0; k < edges; ++k) {
    int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
    if (dag) {
      if (a == b) continue;
      if (a > b) std::swap(a, b);
    }
    rel.emplace(a, b);
  }
  return rel;
}

/// A random valid spec with ids in breadth-first order.
TreeSpec random_valid_spec(std::mt19937_64& rng) {
  TreeSpec s;
  s.add("root", NodeType::Root, 0);
  std::vector<std::vector<int>> children(1);
  std::vector<NodeType> types{NodeType::Root};
  const int target = 2 + static_cast<int>(rng() % 9);
  types.push_back(NodeType::Sequence);
  children.emplace_back();
  children[0].push_back(1);
  while (static_cast<int>(types.size()) < target) {
    std::vector<int> open;
    for (int i = 1; i < static_cast<int>(types.size()); ++i) {
      if (is_control(types[i])) open.push_back(i);
    }
    const int p = open[rng() % open.size()];
    const NodeType t = static_cast<NodeType>(1 + rng() % 4);
    types.push_back(t);
    children.emplace_back();
    children[p].push_back(static_cast<int>(types.size()) - 1);
  }
  for (std::size_t i = 1; i < types.size(); ++i) {
    if (is_control(types[i]) && children[i].empty()) types[i] = NodeType::Action;
  }
  // breadth-first renumbering
  std::vector<int> order{0};
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (int c : children[order[k]]) order.push_back(c);
  }
  std::vector<int> index(types.size());
  TreeSpec out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int old = order[k];
    index[old] = static_cast<int>(k);
    std::optional<NodeIndex> parent;
    for (std::size_t p = 0; p < children.size(); ++p) {
      for (int c : children[p]) {
        if (c == old) parent = static_cast<NodeIndex>(index[p]);
      }
    }
    out.add("n" + std::to_string(k), types[old], static_cast<std::uint32_t>(k), parent);
  }
  return out;
}

}  // namespace

TEST_CASE("node and result names round-trip") {
  CHECK(to_string(NodeType::Fallback) == "FALLBACK");
  CHECK(to_string(TickResult::Unknown) == "UNKNOWN");
  for (auto r : {TickResult::Success, TickResult::Running, TickResult::Failure, TickResult::Unknown}) {
    CHECK(parse_tick_result(to_string(r)) == r);
  }
  CHECK_FALSE(parse_tick_result("DONE").has_value());
  CHECK(is_leaf(NodeType::Condition));
  CHECK(is_leaf(NodeType::Action));
  CHECK_FALSE(is_leaf(NodeType::Root));
  CHECK(is_control(NodeType::Sequence));
  CHECK_FALSE(is_control(NodeType::Root));
}

TEST_CASE("transitive closure examples") {
  CHECK(transitive_closure(Relation<int>{}).empty());
  CHECK(transitive_closure(Relation<int>{{1, 2}, {2, 3}}) == Relation<int>{{1, 2}, {2, 3}, {1, 3}});
  CHECK(transitive_closure(Relation<int>{{1, 2}, {2, 1}}) == Relation<int>{{1, 2}, {2, 1}, {1, 1}, {2, 2}});
  CHECK(transitive_closure(Relation<int>{{5, 5}}) == Relation<int>{{5, 5}});
}

TEST_CASE("transitive closure agrees with matrix powering") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto rel = random_relation(rng, n, trial % 2 == 0);
    const auto t = transitive_closure(rel);
    REQUIRE(t == oracle::closure_by_squaring(rel, n));

    // least fixpoint axioms: rel ⊆ t, rel;t ⊆ t, and idempotence
    for (const auto& p : rel) CHECK(t.count(p));
    for (const auto& [a, b] : rel) {
      for (const auto& [c, d] : t) {
        if (b == c) CHECK(t.count({a, d}));
      }
    }
    CHECK(transitive_closure(t) == t);
  }
}

TEST_CASE("case-study tree is well formed") {
  const auto report = validate_tree(wall_spec());
  CHECK(report.ok());
  CHECK(report.violations.empty());
  CHECK(ordered_children(wall_spec(), "sequence_1") == std::vector<NodeIndex>{2, 3});
  CHECK(ordered_children(wall_spec(), "action_1").empty());
  CHECK(ordered_children(wall_spec(), "root") == std::vector<NodeIndex>{1});
  CHECK_THROWS_AS(ordered_children(wall_spec(), "nope"), std::out_of_range);
  CHECK_THROWS_AS(ordered_children(wall_spec(), NodeIndex{9}), std::out_of_range);
  CHECK(breadth_first_order(wall_spec(), 0) == std::vector<NodeIndex>{0, 1, 2, 3});
}

TEST_CASE("children are ordered by id, not by declaration") {
  TreeSpec s;
  const auto root = s.add("root", NodeType::Root, 0);
  const auto fb = s.add("fb", NodeType::Fallback, 1, root);
  s.add("late", NodeType::Action, 3, fb);
  s.add("early", NodeType::Condition, 2, fb);
  CHECK(ordered_children(s, "fb") == std::vector<NodeIndex>{3, 2});
  CHECK(validate_tree(s).ok());
}

TEST_CASE("malformed trees carry the right tag") {
  SUBCASE("two roots") {
    auto s = wall_spec();
    s.add("root2", NodeType::Root, 4);
    CHECK(validate_tree(s).has(Requirement::Req1));
    CHECK_FALSE(validate_tree(s).ok());
  }
  SUBCASE("no root") {
    TreeSpec s;
    s.add("a", NodeType::Action, 0);
    const auto r = validate_tree(s);
    CHECK(r.has(Requirement::Req1));
    CHECK(r.has(Requirement::Req4));
  }
  SUBCASE("orphan") {
    auto s = wall_spec();
    s.add("orphan", NodeType::Action, 4);
    const auto r = validate_tree(s);
    CHECK(r.has(Requirement::Req2));
    CHECK_FALSE(r.has(Requirement::Req1));
  }
  SUBCASE("two-cycle") {
    auto s = wall_spec();
    const auto a = s.add("a", NodeType::Sequence, 4);
    const auto b = s.add("b", NodeType::Sequence, 5, a);
    s.parent[a] = b;
    const auto r = validate_tree(s);
    CHECK(r.has(Requirement::Req3));
    CHECK(r.has(Requirement::Req4));
  }
  SUBCASE("disconnected subtree") {
    auto s = wall_spec();
    const auto a = s.add("a", NodeType::Sequence, 4);
    s.add("b", NodeType::Action, 5, a);
    const auto r = validate_tree(s);
    CHECK(r.has(Requirement::Req4));
    CHECK(r.violations.size() == 3);  // a has no parent; a and b unreachable
  }
  SUBCASE("duplicate id") {
    auto s = wall_spec();
    s.nodes[3].id = 2;
    const auto r = validate_tree(s);
    CHECK(r.has(Requirement::IdUnique));
    CHECK(tags(r) == std::vector<Requirement>{Requirement::IdUnique});
  }
  SUBCASE("root id not zero") {
    auto s = wall_spec();
    s.nodes[0].id = 7;
    CHECK(validate_tree(s).has(Requirement::IdUnique));
  }
  SUBCASE("root with two children") {
    auto s = wall_spec();
    s.add("extra", NodeType::Action, 4, 0);
    const auto r = validate_tree(s);
    CHECK(r.has(Requirement::RootArity));
    CHECK_FALSE(r.ok());
  }
  SUBCASE("root without children") {
    TreeSpec s;
    s.add("root", NodeType::Root, 0);
    CHECK(validate_tree(s).has(Requirement::RootArity));
  }
  SUBCASE("sequence with no children") {
    TreeSpec s;
    const auto root = s.add("root", NodeType::Root, 0);
    s.add("seq", NodeType::Sequence, 1, root);
    CHECK(tags(validate_tree(s)) == std::vector<Requirement>{Requirement::LeafArity});
  }
  SUBCASE("leaf with a child") {
    TreeSpec s;
    const auto root = s.add("root", NodeType::Root, 0);
    const auto c = s.add("c", NodeType::Condition, 1, root);
    s.add("a", NodeType::Action, 2, c);
    CHECK(validate_tree(s).has(Requirement::LeafArity));
  }
  SUBCASE("root with a parent") {
    auto s = wall_spec();
    s.parent[0] = 1;
    CHECK(validate_tree(s).has(Requirement::Req2));
  }
}

TEST_CASE("non breadth-first ids only warn") {
  auto s = wall_spec();
  s.nodes[2].id = 7;
  s.nodes[3].id = 9;
  const auto r = validate_tree(s);
  CHECK(r.ok());
  CHECK(tags(r) == std::vector<Requirement>{Requirement::IdBfsWarn, Requirement::IdBfsWarn});
  CHECK(std::string(to_string(Requirement::IdBfsWarn)) == "ID_BFS_WARN");
}

TEST_CASE("Tree rejects invalid specs and exposes navigation tables") {
  auto bad = wall_spec();
  bad.add("root2", NodeType::Root, 4);
  CHECK_THROWS_AS(Tree{bad}, ValidationError);
  try {
    Tree t(bad);
  } catch (const ValidationError& e) {
    CHECK(e.report().has(Requirement::Req1));
  }

  const Tree t(wall_spec());
  CHECK(t.root() == 0);
  CHECK(t.depth(3) == 2);
  CHECK(t.parent(2) == NodeIndex{1});
  CHECK_FALSE(t.parent(0).has_value());
  CHECK(std::vector<NodeIndex>(t.children(1).begin(), t.children(1).end()) == std::vector<NodeIndex>{2, 3});
}

TEST_CASE("properties of random valid trees") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const TreeSpec s = random_valid_spec(rng);
    const auto report = validate_tree(s);
    REQUIRE_MESSAGE(report.ok(), "trial " << trial);
    CHECK(report.violations.empty());
    CHECK(validate_tree(s) == report);  // pure

    int roots = 0;
    for (const auto& n : s.nodes) roots += n.type == NodeType::Root;
    CHECK(roots == 1);

    // closure of the child relation covers everything but the root
    Relation<NodeIndex> child;
    for (NodeIndex i = 0; i < s.size(); ++i) {
      if (s.parent[i]) child.emplace(*s.parent[i], i);
    }
    std::set<NodeIndex> image;
    for (const auto& [a, b] : transitive_closure(child)) {
      if (a == 0) image.insert(b);
    }
    CHECK(image.size() == s.size() - 1);
    CHECK_FALSE(image.count(0));

    // ordered_children partitions nodes \ {root}
    std::vector<NodeIndex> all;
    for (NodeIndex i = 0; i < s.size(); ++i) {
      const auto kids = ordered_children(s, i);
      for (std::size_t k = 1; k < kids.size(); ++k) CHECK(s.nodes[kids[k - 1]].id < s.nodes[kids[k]].id);
      all.insert(all.end(), kids.begin(), kids.end());
    }
    std::sort(all.begin(), all.end());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    CHECK(all.size() == s.size() - 1);
    CHECK(ordered_children(s, NodeIndex{0}).size() == 1);
  }
}
