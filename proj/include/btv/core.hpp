#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "btv/error.hpp"

namespace btv {

enum class NodeType : std::uint8_t { Root, Sequence, Fallback, Condition, Action };

enum class TickResult : std::uint8_t { Success, Running, Failure, Unknown };

std::string_view to_string(NodeType type);
std::string_view to_string(TickResult result);
std::optional<TickResult> parse_tick_result(std::string_view text);

inline bool is_leaf(NodeType type) {
  return type == NodeType::Condition || type == NodeType::Action;
}
inline bool is_control(NodeType type) {
  return type == NodeType::Sequence || type == NodeType::Fallback;
}

/// Position of a node inside TreeSpec::nodes. Distinct from the node's n_id.
using NodeIndex = std::uint32_t;

struct NodeDecl {
  std::string name;
  NodeType type = NodeType::Action;
  std::uint32_t id = 0;

  bool operator==(const NodeDecl&) const = default;
};

/// Static topology of a tree as declared. May be malformed; validate_tree
/// tells whether it is a well-formed behavior tree.
struct TreeSpec {
  std::vector<NodeDecl> nodes;
  /// parent[i] is the parent of nodes[i]; empty for the root.
  std::vector<std::optional<NodeIndex>> parent;

  std::size_t size() const { return nodes.size(); }
  std::optional<NodeIndex> find(std::string_view name) const;

  /// Appends a node and returns its index.
  NodeIndex add(std::string name, NodeType type, std::uint32_t id,
                std::optional<NodeIndex> parent_index = std::nullopt);

  bool operator==(const TreeSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Transitive closure

template <class T>
using Relation = std::set<std::pair<T, T>>;

/// Least relation t with rel ⊆ t and rel;t ⊆ t, computed as a worklist
/// fixpoint. Each pair (y,z) newly added to t is composed on the left with
/// every (x,y) in rel.
template <class T>
Relation<T> transitive_closure(const Relation<T>& rel) {
  std::map<T, std::vector<T>> predecessors;
  for (const auto& [from, to] : rel) predecessors[to].push_back(from);

  Relation<T> closure = rel;
  std::vector<std::pair<T, T>> worklist(rel.begin(), rel.end());
  while (!worklist.empty()) {
    auto [mid, to] = worklist.back();
    worklist.pop_back();
    auto it = predecessors.find(mid);
    if (it == predecessors.end()) continue;
    for (const T& from : it->second) {
      if (closure.emplace(from, to).second) worklist.emplace_back(from, to);
    }
  }
  return closure;
}

// ---------------------------------------------------------------------------
// Validation

enum class Requirement : std::uint8_t {
  Req1,        // single root
  Req2,        // every non-root node has a parent
  Req3,        // no loops in the parent structure
  Req4,        // every node reachable from the root
  IdUnique,    // n_id injective, root has id 0
  IdBfsWarn,   // ids differ from breadth-first numbering (warning only)
  RootArity,   // root has exactly one child
  LeafArity,   // leaves have no children, control nodes at least one
};

std::string_view to_string(Requirement requirement);

struct Violation {
  Requirement requirement;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  /// True iff nothing other than IdBfsWarn was reported.
  bool ok() const;
  bool has(Requirement requirement) const;
  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate_tree(const TreeSpec& spec);

/// The children of `node` ordered by ascending n_id.
/// Throws std::out_of_range for a node not in the spec.
std::vector<NodeIndex> ordered_children(const TreeSpec& spec, NodeIndex node);
std::vector<NodeIndex> ordered_children(const TreeSpec& spec, std::string_view node);

/// Indices of the nodes in breadth-first, left-to-right order from the
/// given root, with siblings ordered by n_id. Nodes unreachable from the
/// root are not listed.
std::vector<NodeIndex> breadth_first_order(const TreeSpec& spec, NodeIndex root);

/// Raised when a TreeSpec that fails validation is used as a Tree.
class ValidationError : public ModelError {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// A validated tree with precomputed navigation tables.
class Tree {
 public:
  /// Throws ValidationError if `spec` is not well formed.
  explicit Tree(TreeSpec spec);

  const TreeSpec& spec() const { return spec_; }
  std::size_t size() const { return spec_.size(); }
  NodeIndex root() const { return root_; }

  NodeType type(NodeIndex n) const { return spec_.nodes[n].type; }
  std::uint32_t id(NodeIndex n) const { return spec_.nodes[n].id; }
  const std::string& name(NodeIndex n) const { return spec_.nodes[n].name; }
  std::optional<NodeIndex> parent(NodeIndex n) const { return spec_.parent[n]; }
  std::span<const NodeIndex> children(NodeIndex n) const { return children_[n]; }
  std::uint32_t depth(NodeIndex n) const { return depth_[n]; }

  /// Nodes sorted by ascending n_id.
  std::span<const NodeIndex> by_id() const { return by_id_; }

  bool operator==(const Tree& other) const { return spec_ == other.spec_; }

 private:
  TreeSpec spec_;
  NodeIndex root_ = 0;
  std::vector<std::vector<NodeIndex>> children_;
  std::vector<std::uint32_t> depth_;
  std::vector<NodeIndex> by_id_;
};

}  // namespace btv
