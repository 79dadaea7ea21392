#include "btv/envmodel.hpp"

#include <algorithm>
#include <set>

namespace btv {

std::string_view to_string(ValueType type) {
  return type == ValueType::Int ? "int" : "bool";
}

Expr Expr::integer(Value v) {
  Expr e;
  e.op = Op::IntLit;
  e.literal = v;
  return e;
}

Expr Expr::boolean(bool b) {
  Expr e;
  e.op = Op::BoolLit;
  e.literal = b ? 1 : 0;
  return e;
}

Expr Expr::var(std::string name) {
  Expr e;
  e.op = Op::Var;
  e.name = std::move(name);
  return e;
}

Expr Expr::unary(Op op, Expr operand) {
  Expr e;
  e.op = op;
  e.args.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  Expr e;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

bool Expr::operator==(const Expr& other) const {
  return op == other.op && literal == other.literal && name == other.name && args == other.args;
}

namespace {

using Op = Expr::Op;

int precedence(Op op) {
  switch (op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Not: return 3;
    case Op::Eq: case Op::Ne: case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: return 4;
    case Op::Add: case Op::Sub: return 5;
    case Op::Neg: return 6;
    case Op::IntLit: case Op::BoolLit: case Op::Var: return 7;
  }
  return 7;
}

std::string_view symbol(Op op) {
  switch (op) {
    case Op::Or: return "||";
    case Op::And: return "&&";
    case Op::Not: return "!";
    case Op::Neg: return "-";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    default: return "";
  }
}

std::string wrap(const Expr& e, bool parens) {
  return parens ? "(" + to_string(e) + ")" : to_string(e);
}

bool is_comparison(Op op) { return precedence(op) == 4; }

}  // namespace

std::string to_string(const Expr& e) {
  switch (e.op) {
    case Op::IntLit: return std::to_string(e.literal);
    case Op::BoolLit: return e.literal ? "true" : "false";
    case Op::Var: return e.name;
    case Op::Not: return "!" + wrap(e.args[0], precedence(e.args[0].op) < precedence(Op::Not));
    case Op::Neg:
      return "-" + wrap(e.args[0], precedence(e.args[0].op) < precedence(Op::Neg) ||
                                       e.args[0].op == Op::IntLit);
    default: break;
  }
  const int p = precedence(e.op);
  const bool non_assoc = is_comparison(e.op);
  const bool lhs_parens = precedence(e.args[0].op) < p || (non_assoc && precedence(e.args[0].op) == p);
  const bool rhs_parens = precedence(e.args[1].op) <= p;
  return wrap(e.args[0], lhs_parens) + " " + std::string(symbol(e.op)) + " " +
         wrap(e.args[1], rhs_parens);
}

std::optional<std::size_t> EnvSpec::find(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return i;
  }
  return std::nullopt;
}

EnvState EnvSpec::initial_state() const {
  EnvState env;
  env.values.reserve(variables.size());
  for (const auto& v : variables) env.values.push_back(v.initial);
  return env;
}

ValueType resolve(Expr& e, const EnvSpec& spec) {
  auto expect = [&](Expr& operand, ValueType want) {
    ValueType got = resolve(operand, spec);
    if (got != want) {
      throw ModelError("type error: operand '" + to_string(operand) + "' of '" +
                       std::string(symbol(e.op)) + "' is " + std::string(to_string(got)) +
                       ", expected " + std::string(to_string(want)));
    }
  };
  switch (e.op) {
    case Op::IntLit: return ValueType::Int;
    case Op::BoolLit: return ValueType::Bool;
    case Op::Var: {
      auto slot = spec.find(e.name);
      if (!slot) throw ModelError("unknown variable '" + e.name + "'");
      e.slot = *slot;
      return spec.variables[*slot].domain.type;
    }
    case Op::Neg:
      expect(e.args[0], ValueType::Int);
      return ValueType::Int;
    case Op::Not:
      expect(e.args[0], ValueType::Bool);
      return ValueType::Bool;
    case Op::Add:
    case Op::Sub:
      expect(e.args[0], ValueType::Int);
      expect(e.args[1], ValueType::Int);
      return ValueType::Int;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      expect(e.args[0], ValueType::Int);
      expect(e.args[1], ValueType::Int);
      return ValueType::Bool;
    case Op::Eq:
    case Op::Ne: {
      ValueType lhs = resolve(e.args[0], spec);
      expect(e.args[1], lhs);
      return ValueType::Bool;
    }
    case Op::And:
    case Op::Or:
      expect(e.args[0], ValueType::Bool);
      expect(e.args[1], ValueType::Bool);
      return ValueType::Bool;
  }
  return ValueType::Bool;
}

void resolve_predicate(Expr& e, const EnvSpec& spec, std::string_view context) {
  if (resolve(e, spec) != ValueType::Bool) {
    throw ModelError("type error: " + std::string(context) + " '" + to_string(e) +
                     "' is int, expected bool");
  }
}

void resolve(Assignment& a, const EnvSpec& spec) {
  auto slot = spec.find(a.target);
  if (!slot) throw ModelError("unknown variable '" + a.target + "' in assignment");
  a.slot = *slot;
  const ValueType want = spec.variables[*slot].domain.type;
  const ValueType got = resolve(a.value, spec);
  if (got != want) {
    throw ModelError("type error: assigning " + std::string(to_string(got)) + " '" +
                     to_string(a.value) + "' to " + std::string(to_string(want)) +
                     " variable '" + a.target + "'");
  }
}

namespace {

std::size_t slot_of(const std::string& name, std::size_t cached, const EnvSpec& spec) {
  if (cached != Expr::kUnresolved) return cached;
  auto slot = spec.find(name);
  if (!slot) throw ModelError("unknown variable '" + name + "'");
  return *slot;
}

Value checked(bool overflowed, const Value& v) {
  if (overflowed) throw ModelError("integer overflow while evaluating an expression");
  return v;
}

}  // namespace

Value eval(const Expr& e, const EnvSpec& spec, const EnvState& env) {
  auto arg = [&](std::size_t i) { return eval(e.args[i], spec, env); };
  Value out = 0;
  switch (e.op) {
    case Op::IntLit:
    case Op::BoolLit: return e.literal;
    case Op::Var: {
      std::size_t slot = slot_of(e.name, e.slot, spec);
      if (slot >= env.values.size()) throw ModelError("valuation has no value for '" + e.name + "'");
      return env.values[slot];
    }
    case Op::Neg: return checked(__builtin_sub_overflow(Value{0}, arg(0), &out), out);
    case Op::Not: return arg(0) ? 0 : 1;
    case Op::Add: return checked(__builtin_add_overflow(arg(0), arg(1), &out), out);
    case Op::Sub: return checked(__builtin_sub_overflow(arg(0), arg(1), &out), out);
    case Op::Eq: return arg(0) == arg(1);
    case Op::Ne: return arg(0) != arg(1);
    case Op::Lt: return arg(0) < arg(1);
    case Op::Le: return arg(0) <= arg(1);
    case Op::Gt: return arg(0) > arg(1);
    case Op::Ge: return arg(0) >= arg(1);
    case Op::And: return arg(0) && arg(1);
    case Op::Or: return arg(0) || arg(1);
  }
  return 0;
}

bool eval_predicate(const Expr& p, const EnvSpec& spec, const EnvState& env) {
  return eval(p, spec, env) != 0;
}

EnvState apply_effects(std::span<const Assignment> effects, const EnvSpec& spec,
                       const EnvState& env, Overflow overflow) {
  std::vector<Value> rhs;
  rhs.reserve(effects.size());
  for (const auto& a : effects) rhs.push_back(eval(a.value, spec, env));

  EnvState out = env;
  for (std::size_t i = 0; i < effects.size(); ++i) {
    const std::size_t slot = slot_of(effects[i].target, effects[i].slot, spec);
    const Domain& domain = spec.variables[slot].domain;
    Value v = rhs[i];
    if (!domain.contains(v)) {
      if (overflow == Overflow::Error) throw DomainViolation(effects[i].target, v);
      v = domain.clamp(v);
    }
    out.values[slot] = v;
  }
  return out;
}

std::vector<std::string> check_invariants(const EnvSpec& spec, const EnvState& env) {
  std::vector<std::string> violated;
  for (const auto& inv : spec.invariants) {
    if (!eval_predicate(inv.predicate, spec, env)) violated.push_back(inv.name);
  }
  return violated;
}

bool in_domain(const EnvSpec& spec, const EnvState& env) {
  if (env.values.size() != spec.variables.size()) return false;
  for (std::size_t i = 0; i < env.values.size(); ++i) {
    if (!spec.variables[i].domain.contains(env.values[i])) return false;
  }
  return true;
}

namespace {

void collect_slots(const Expr& e, const EnvSpec& spec, std::set<std::size_t>& out) {
  if (e.op == Op::Var) out.insert(slot_of(e.name, e.slot, spec));
  for (const auto& a : e.args) collect_slots(a, spec, out);
}

}  // namespace

ExhaustivenessResult check_exhaustive(const ActionBehavior& action, const EnvSpec& spec,
                                      std::uint64_t limit) {
  std::set<std::size_t> read;
  for (const auto& outcome : action.outcomes) collect_slots(outcome.guard, spec, read);
  const std::vector<std::size_t> slots(read.begin(), read.end());

  std::uint64_t product = 1;
  for (std::size_t s : slots) {
    const std::uint64_t card = spec.variables[s].domain.cardinality();
    if (card != 0 && product > limit / card) return {ExhaustivenessResult::Status::TooLarge, {}};
    product *= card;
  }
  if (product > limit) return {ExhaustivenessResult::Status::TooLarge, {}};

  EnvState env = spec.initial_state();
  for (std::size_t s : slots) env.values[s] = spec.variables[s].domain.lo;
  for (std::uint64_t k = 0; k < product; ++k) {
    const bool covered = std::any_of(action.outcomes.begin(), action.outcomes.end(),
                                     [&](const ActionOutcome& o) {
                                       return eval_predicate(o.guard, spec, env);
                                     });
    if (!covered) return {ExhaustivenessResult::Status::Gap, env};
    // mixed-radix increment
    for (std::size_t s : slots) {
      const Domain& d = spec.variables[s].domain;
      if (env.values[s] < d.hi) {
        ++env.values[s];
        break;
      }
      env.values[s] = d.lo;
    }
  }
  return {ExhaustivenessResult::Status::Exhaustive, {}};
}

std::string format_valuation(const EnvSpec& spec, const EnvState& env) {
  std::string out;
  for (std::size_t i = 0; i < spec.variables.size() && i < env.values.size(); ++i) {
    if (i) out += ", ";
    out += spec.variables[i].name + "=";
    if (spec.variables[i].domain.type == ValueType::Bool) {
      out += env.values[i] ? "true" : "false";
    } else {
      out += std::to_string(env.values[i]);
    }
  }
  return out;
}

}  // namespace btv
