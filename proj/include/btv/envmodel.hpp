#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "btv/core.hpp"
#include "btv/error.hpp"

namespace btv {

using Value = std::int64_t;

enum class ValueType : std::uint8_t { Int, Bool };

std::string_view to_string(ValueType type);

/// A finite variable domain: a closed integer interval or the booleans
/// (stored as 0 and 1).
struct Domain {
  ValueType type = ValueType::Int;
  Value lo = 0;
  Value hi = 0;

  static Domain boolean() { return Domain{ValueType::Bool, 0, 1}; }
  static Domain range(Value lo, Value hi) { return Domain{ValueType::Int, lo, hi}; }

  bool contains(Value v) const { return v >= lo && v <= hi; }
  std::uint64_t cardinality() const { return static_cast<std::uint64_t>(hi - lo) + 1; }
  Value clamp(Value v) const { return v < lo ? lo : (v > hi ? hi : v); }

  bool operator==(const Domain&) const = default;
};

struct VarDecl {
  std::string name;
  Domain domain;
  Value initial = 0;

  bool operator==(const VarDecl&) const = default;
};

/// Expression tree over integer and boolean terms. Variable references are
/// by name; `slot` caches the variable's position once resolved against an
/// EnvSpec.
struct Expr {
  enum class Op : std::uint8_t {
    IntLit, BoolLit, Var,
    Neg, Not,
    Add, Sub,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or,
  };
  static constexpr std::size_t kUnresolved = std::numeric_limits<std::size_t>::max();

  Op op = Op::BoolLit;
  Value literal = 0;
  std::string name;
  std::size_t slot = kUnresolved;
  std::vector<Expr> args;

  static Expr integer(Value v);
  static Expr boolean(bool b);
  static Expr var(std::string name);
  static Expr unary(Op op, Expr operand);
  static Expr binary(Op op, Expr lhs, Expr rhs);

  /// Structural equality; ignores resolution state.
  bool operator==(const Expr& other) const;
};

/// Renders an expression in model-file syntax, parenthesizing only where
/// precedence requires it.
std::string to_string(const Expr& e);

struct Assignment {
  std::string target;
  Expr value;
  std::size_t slot = Expr::kUnresolved;

  bool operator==(const Assignment& other) const {
    return target == other.target && value == other.value;
  }
};

struct Invariant {
  std::string name;
  Expr predicate;

  bool operator==(const Invariant&) const = default;
};

/// A concrete valuation, indexed like EnvSpec::variables.
struct EnvState {
  std::vector<Value> values;

  auto operator<=>(const EnvState&) const = default;
};

struct EnvSpec {
  std::vector<VarDecl> variables;
  std::vector<Invariant> invariants;
  /// Executed when a result reaches the root. Writes clamp to the target's
  /// domain, so counters like a time step saturate at their upper bound.
  std::vector<Assignment> root_result_hook;

  std::optional<std::size_t> find(std::string_view name) const;
  EnvState initial_state() const;

  bool operator==(const EnvSpec&) const = default;
};

/// What an assignment does when its value leaves the target's domain.
enum class Overflow : std::uint8_t { Error, Clamp };

/// Type-checks `e` against `spec`, resolving variable slots in place.
/// Throws ModelError on unknown variables or ill-typed operands.
ValueType resolve(Expr& e, const EnvSpec& spec);
void resolve_predicate(Expr& e, const EnvSpec& spec, std::string_view context);
void resolve(Assignment& a, const EnvSpec& spec);

Value eval(const Expr& e, const EnvSpec& spec, const EnvState& env);
bool eval_predicate(const Expr& p, const EnvSpec& spec, const EnvState& env);

/// All right-hand sides are read from `env`, then written in listed order.
/// With Overflow::Error an out-of-domain write throws DomainViolation.
EnvState apply_effects(std::span<const Assignment> effects, const EnvSpec& spec,
                       const EnvState& env, Overflow overflow = Overflow::Error);

/// Names of the invariants that are false in `env`, in declaration order.
std::vector<std::string> check_invariants(const EnvSpec& spec, const EnvState& env);

/// True iff every value lies in its variable's domain.
bool in_domain(const EnvSpec& spec, const EnvState& env);

// ---------------------------------------------------------------------------
// Leaf behaviors

struct ConditionBehavior {
  Expr success_when;

  bool operator==(const ConditionBehavior&) const = default;
};

struct ActionOutcome {
  Expr guard;
  TickResult result = TickResult::Success;
  std::vector<Assignment> effects;

  bool operator==(const ActionOutcome&) const = default;
};

struct ActionBehavior {
  std::vector<ActionOutcome> outcomes;

  bool operator==(const ActionBehavior&) const = default;
};

/// Indexed by node; control nodes hold std::monostate.
using LeafBehavior = std::variant<std::monostate, ConditionBehavior, ActionBehavior>;

struct ExhaustivenessResult {
  enum class Status : std::uint8_t { Exhaustive, Gap, TooLarge };
  Status status = Status::Exhaustive;
  /// For Gap: a valuation in which no outcome guard holds.
  std::optional<EnvState> witness;
};

inline constexpr std::uint64_t kExhaustivenessLimit = 1'000'000;

/// Enumerates the valuations of the variables the guards read (every other
/// variable at its initial value) and checks that some guard holds in each.
ExhaustivenessResult check_exhaustive(const ActionBehavior& action, const EnvSpec& spec,
                                      std::uint64_t limit = kExhaustivenessLimit);

std::string format_valuation(const EnvSpec& spec, const EnvState& env);

}  // namespace btv
