#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btv/core.hpp"
#include "btv/envmodel.hpp"
#include "btv/semantics.hpp"

namespace btv {

struct SourceSpan {
  std::uint32_t line = 1;
  std::uint32_t column = 1;

  bool operator==(const SourceSpan&) const = default;
};

std::string to_string(const SourceSpan& span);

struct NodeSyntax {
  NodeType type = NodeType::Action;
  std::string name;
  std::optional<std::uint32_t> explicit_id;
  SourceSpan span;
  std::vector<NodeSyntax> children;
};

struct VarSyntax {
  VarDecl decl;
  SourceSpan span;
};

struct ConditionSyntax {
  std::string node;
  Expr success_when;
  SourceSpan span;
};

struct OutcomeSyntax {
  TickResult result = TickResult::Success;
  Expr guard;
  std::vector<Assignment> effects;
  SourceSpan span;
};

struct ActionSyntax {
  std::string node;
  std::vector<OutcomeSyntax> outcomes;
  SourceSpan span;
};

struct InvariantSyntax {
  Invariant invariant;
  SourceSpan span;
};

/// A parsed model file before any semantic checks beyond node-name
/// uniqueness.
struct ModelDocument {
  std::vector<NodeSyntax> tree;  // top-level declarations inside `tree { }`
  SourceSpan tree_span;
  std::vector<VarSyntax> variables;
  std::vector<ConditionSyntax> conditions;
  std::vector<ActionSyntax> actions;
  std::vector<Assignment> root_result_hook;
  std::optional<SourceSpan> hook_span;
  std::vector<InvariantSyntax> invariants;
};

/// Throws ParseError on syntax errors, duplicate node names and unknown
/// node kinds.
ModelDocument parse(std::string_view text);

enum class IdNumbering : std::uint8_t {
  BreadthFirst,  // recompute every n_id
  Explicit,      // keep `id = N` annotations, number the rest breadth-first
};

/// Flattens the nested tree declaration. Nodes are listed in breadth-first
/// order, so for BreadthFirst numbering a node's index equals its n_id.
TreeSpec build_tree_spec(const ModelDocument& doc, IdNumbering numbering);

/// Produces an executable model: breadth-first ids (explicit ids must agree),
/// validated topology, type-checked expressions, one behavior per leaf and
/// exhaustive action guards. Throws ValidationError or ModelError.
Model elaborate(const ModelDocument& doc);

/// Reads, parses and elaborates a model file.
Model load_model(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);

/// Serializes a model in the file syntax accepted by parse().
std::string print_model(const Model& model);

/// 64-bit FNV-1a digest of print_model(model), as 16 hex digits.
std::string model_digest(const Model& model);

}  // namespace btv
