#include "btv/core.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace btv {

std::string_view to_string(NodeType type) {
  switch (type) {
    case NodeType::Root: return "ROOT";
    case NodeType::Sequence: return "SEQUENCE";
    case NodeType::Fallback: return "FALLBACK";
    case NodeType::Condition: return "CONDITION";
    case NodeType::Action: return "ACTION";
  }
  return "?";
}

std::string_view to_string(TickResult result) {
  switch (result) {
    case TickResult::Success: return "SUCCESS";
    case TickResult::Running: return "RUNNING";
    case TickResult::Failure: return "FAILURE";
    case TickResult::Unknown: return "UNKNOWN";
  }
  return "?";
}

std::optional<TickResult> parse_tick_result(std::string_view text) {
  if (text == "SUCCESS") return TickResult::Success;
  if (text == "RUNNING") return TickResult::Running;
  if (text == "FAILURE") return TickResult::Failure;
  if (text == "UNKNOWN") return TickResult::Unknown;
  return std::nullopt;
}

std::string_view to_string(Requirement requirement) {
  switch (requirement) {
    case Requirement::Req1: return "REQ1";
    case Requirement::Req2: return "REQ2";
    case Requirement::Req3: return "REQ3";
    case Requirement::Req4: return "REQ4";
    case Requirement::IdUnique: return "ID_UNIQUE";
    case Requirement::IdBfsWarn: return "ID_BFS_WARN";
    case Requirement::RootArity: return "ROOT_ARITY";
    case Requirement::LeafArity: return "LEAF_ARITY";
  }
  return "?";
}

std::optional<NodeIndex> TreeSpec::find(std::string_view name) const {
  for (NodeIndex i = 0; i < nodes.size(); ++i) {
    if (nodes[i].name == name) return i;
  }
  return std::nullopt;
}

NodeIndex TreeSpec::add(std::string name, NodeType type, std::uint32_t id,
                        std::optional<NodeIndex> parent_index) {
  nodes.push_back(NodeDecl{std::move(name), type, id});
  parent.push_back(parent_index);
  return static_cast<NodeIndex>(nodes.size() - 1);
}

bool ValidationReport::ok() const {
  return std::all_of(violations.begin(), violations.end(), [](const Violation& v) {
    return v.requirement == Requirement::IdBfsWarn;
  });
}

bool ValidationReport::has(Requirement requirement) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) {
    return v.requirement == requirement;
  });
}

namespace {

std::string quoted(const TreeSpec& spec, NodeIndex n) {
  return "'" + spec.nodes[n].name + "'";
}

bool valid_parent(const TreeSpec& spec, NodeIndex n) {
  return n < spec.parent.size() && spec.parent[n].has_value() &&
         *spec.parent[n] < spec.nodes.size();
}

std::vector<std::vector<NodeIndex>> children_table(const TreeSpec& spec) {
  std::vector<std::vector<NodeIndex>> children(spec.size());
  for (NodeIndex n = 0; n < spec.size(); ++n) {
    if (valid_parent(spec, n)) children[*spec.parent[n]].push_back(n);
  }
  for (auto& list : children) {
    std::stable_sort(list.begin(), list.end(), [&](NodeIndex a, NodeIndex b) {
      return spec.nodes[a].id < spec.nodes[b].id;
    });
  }
  return children;
}

}  // namespace

std::vector<NodeIndex> ordered_children(const TreeSpec& spec, NodeIndex node) {
  if (node >= spec.size()) {
    throw std::out_of_range("ordered_children: node index " + std::to_string(node) +
                            " is not part of the tree");
  }
  std::vector<NodeIndex> out;
  for (NodeIndex n = 0; n < spec.size(); ++n) {
    if (valid_parent(spec, n) && *spec.parent[n] == node) out.push_back(n);
  }
  std::stable_sort(out.begin(), out.end(), [&](NodeIndex a, NodeIndex b) {
    return spec.nodes[a].id < spec.nodes[b].id;
  });
  return out;
}

std::vector<NodeIndex> ordered_children(const TreeSpec& spec, std::string_view node) {
  auto index = spec.find(node);
  if (!index) {
    throw std::out_of_range("ordered_children: unknown node '" + std::string(node) + "'");
  }
  return ordered_children(spec, *index);
}

std::vector<NodeIndex> breadth_first_order(const TreeSpec& spec, NodeIndex root) {
  const auto children = children_table(spec);
  std::vector<NodeIndex> order;
  std::vector<bool> seen(spec.size(), false);
  std::deque<NodeIndex> queue{root};
  seen[root] = true;
  while (!queue.empty()) {
    NodeIndex n = queue.front();
    queue.pop_front();
    order.push_back(n);
    for (NodeIndex c : children[n]) {
      if (!seen[c]) {
        seen[c] = true;
        queue.push_back(c);
      }
    }
  }
  return order;
}

ValidationReport validate_tree(const TreeSpec& spec) {
  ValidationReport report;
  auto add = [&](Requirement r, std::string detail) {
    report.violations.push_back(Violation{r, std::move(detail)});
  };
  const std::size_t n_nodes = spec.size();

  // Req1
  std::vector<NodeIndex> roots;
  for (NodeIndex n = 0; n < n_nodes; ++n) {
    if (spec.nodes[n].type == NodeType::Root) roots.push_back(n);
  }
  if (roots.size() != 1) {
    std::string detail = "expected exactly one ROOT node, found " + std::to_string(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
      detail += (i == 0 ? ": " : ", ") + quoted(spec, roots[i]);
    }
    add(Requirement::Req1, detail);
  }

  // Req2
  for (NodeIndex n = 0; n < n_nodes; ++n) {
    const bool has_parent = n < spec.parent.size() && spec.parent[n].has_value();
    if (spec.nodes[n].type == NodeType::Root) {
      if (has_parent) add(Requirement::Req2, "root " + quoted(spec, n) + " must not have a parent");
    } else if (!has_parent) {
      add(Requirement::Req2, "node " + quoted(spec, n) + " has no parent");
    } else if (!valid_parent(spec, n)) {
      add(Requirement::Req2, "parent of " + quoted(spec, n) + " is not a node of the tree");
    }
  }

  // Req3: colour the parent graph; every back edge closes a loop.
  {
    enum : std::uint8_t { kWhite, kGrey, kBlack };
    std::vector<std::uint8_t> colour(n_nodes, kWhite);
    for (NodeIndex start = 0; start < n_nodes; ++start) {
      if (colour[start] != kWhite) continue;
      std::vector<NodeIndex> path;
      NodeIndex cur = start;
      while (true) {
        colour[cur] = kGrey;
        path.push_back(cur);
        if (!valid_parent(spec, cur)) break;
        NodeIndex next = *spec.parent[cur];
        if (colour[next] == kGrey) {
          auto loop_start = std::find(path.begin(), path.end(), next);
          std::string detail = "loop in parent structure: ";
          for (auto it = loop_start; it != path.end(); ++it) detail += quoted(spec, *it) + " -> ";
          detail += quoted(spec, next);
          add(Requirement::Req3, detail);
          break;
        }
        if (colour[next] == kBlack) break;
        cur = next;
      }
      for (NodeIndex p : path) colour[p] = kBlack;
    }
  }

  // Req4: reachability through the closure of the child relation.
  {
    Relation<NodeIndex> child_rel;
    for (NodeIndex n = 0; n < n_nodes; ++n) {
      if (valid_parent(spec, n)) child_rel.emplace(*spec.parent[n], n);
    }
    const auto closure = transitive_closure(child_rel);
    if (roots.empty()) {
      if (n_nodes > 0) add(Requirement::Req4, "no root: no node is reachable");
    } else {
      const NodeIndex root = roots.front();
      for (NodeIndex n = 0; n < n_nodes; ++n) {
        if (n == root) continue;
        if (!closure.contains({root, n})) {
          add(Requirement::Req4, "node " + quoted(spec, n) + " is not reachable from root " +
                                     quoted(spec, root));
        }
      }
    }
  }

  // Identifiers
  {
    std::map<std::uint32_t, NodeIndex> first_with_id;
    for (NodeIndex n = 0; n < n_nodes; ++n) {
      auto [it, inserted] = first_with_id.emplace(spec.nodes[n].id, n);
      if (!inserted) {
        add(Requirement::IdUnique, "n_id " + std::to_string(spec.nodes[n].id) + " shared by " +
                                       quoted(spec, it->second) + " and " + quoted(spec, n));
      }
    }
    for (NodeIndex r : roots) {
      if (spec.nodes[r].id != 0) {
        add(Requirement::IdUnique,
            "root " + quoted(spec, r) + " has n_id " + std::to_string(spec.nodes[r].id) +
                ", expected 0");
      }
    }
  }

  // Arity
  const auto children = children_table(spec);
  for (NodeIndex n = 0; n < n_nodes; ++n) {
    const auto count = children[n].size();
    switch (spec.nodes[n].type) {
      case NodeType::Root:
        if (count != 1) {
          add(Requirement::RootArity, "root " + quoted(spec, n) + " has " + std::to_string(count) +
                                          " children, expected exactly 1");
        }
        break;
      case NodeType::Sequence:
      case NodeType::Fallback:
        if (count == 0) {
          add(Requirement::LeafArity, std::string(to_string(spec.nodes[n].type)) + " " +
                                          quoted(spec, n) + " has no children");
        }
        break;
      case NodeType::Condition:
      case NodeType::Action:
        if (count != 0) {
          add(Requirement::LeafArity, std::string(to_string(spec.nodes[n].type)) + " " +
                                          quoted(spec, n) + " has " + std::to_string(count) +
                                          " children, leaves have none");
        }
        break;
    }
  }

  // Breadth-first numbering is only meaningful on an otherwise sound tree.
  if (roots.size() == 1 && !report.has(Requirement::Req3) && !report.has(Requirement::Req4) &&
      !report.has(Requirement::IdUnique)) {
    const auto order = breadth_first_order(spec, roots.front());
    for (std::uint32_t k = 0; k < order.size(); ++k) {
      if (spec.nodes[order[k]].id != k) {
        add(Requirement::IdBfsWarn, "n_id of " + quoted(spec, order[k]) + " is " +
                                        std::to_string(spec.nodes[order[k]].id) +
                                        ", breadth-first numbering gives " + std::to_string(k));
      }
    }
  }

  return report;
}

namespace {

std::string summarize(const ValidationReport& report) {
  std::ostringstream out;
  out << "tree is not well formed";
  for (const auto& v : report.violations) {
    if (v.requirement == Requirement::IdBfsWarn) continue;
    out << "\n  " << to_string(v.requirement) << ": " << v.detail;
  }
  return out.str();
}

}  // namespace

ValidationError::ValidationError(ValidationReport report)
    : ModelError(summarize(report)), report_(std::move(report)) {}

Tree::Tree(TreeSpec spec) : spec_(std::move(spec)) {
  spec_.parent.resize(spec_.nodes.size());
  auto report = validate_tree(spec_);
  if (!report.ok()) throw ValidationError(std::move(report));

  for (NodeIndex n = 0; n < spec_.size(); ++n) {
    if (spec_.nodes[n].type == NodeType::Root) root_ = n;
  }
  children_ = children_table(spec_);
  depth_.assign(spec_.size(), 0);
  for (NodeIndex n : breadth_first_order(spec_, root_)) {
    for (NodeIndex c : children_[n]) depth_[c] = depth_[n] + 1;
  }
  by_id_.resize(spec_.size());
  for (NodeIndex n = 0; n < spec_.size(); ++n) by_id_[n] = n;
  std::sort(by_id_.begin(), by_id_.end(),
            [&](NodeIndex a, NodeIndex b) { return spec_.nodes[a].id < spec_.nodes[b].id; });
}

}  // namespace btv
