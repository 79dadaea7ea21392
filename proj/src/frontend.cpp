#include "btv/frontend.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

namespace btv {

std::string to_string(const SourceSpan& span) {
  return std::to_string(span.line) + ":" + std::to_string(span.column);
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok : std::uint8_t { Ident, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Value value = 0;
  SourceSpan span;
};

constexpr std::array<std::string_view, 8> kTwoCharPunct{":=", ">=", "<=", "==", "!=", "&&", "||", ".."};
constexpr std::string_view kOneCharPunct = "{}();:,<>+-!=";

constexpr std::array<std::string_view, 21> kReserved{
    "tree",      "root",       "sequence",       "fallback",  "condition",    "action",  "env",
    "var",       "int",        "bool",           "in",        "outcome",      "when",    "on_root_result",
    "invariant", "success_when", "SUCCESS",      "RUNNING",   "FAILURE",      "true",    "false"};

bool is_reserved(std::string_view word) {
  return std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::uint32_t line = 1;
  std::uint32_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (text.substr(i, 2) == "//") {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.span = {line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      tok.kind = Tok::Ident;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      tok.kind = Tok::Int;
      tok.text = std::string(text.substr(i, j - i));
      auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + j, tok.value);
      if (ec != std::errc{}) throw ParseError("integer literal out of range", line, col);
      advance(j - i);
    } else if (std::find(kTwoCharPunct.begin(), kTwoCharPunct.end(), text.substr(i, 2)) !=
               kTwoCharPunct.end()) {
      tok.kind = Tok::Punct;
      tok.text = std::string(text.substr(i, 2));
      advance(2);
    } else if (kOneCharPunct.find(c) != std::string_view::npos) {
      tok.kind = Tok::Punct;
      tok.text = std::string(1, c);
      advance(1);
    } else {
      std::string shown = std::isprint(static_cast<unsigned char>(c))
                              ? std::string("'") + c + "'"
                              : "byte 0x" + [&] {
                                  char buf[3];
                                  std::snprintf(buf, sizeof buf, "%02x", static_cast<unsigned char>(c));
                                  return std::string(buf);
                                }();
      throw ParseError("unexpected character " + shown, line, col);
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = Tok::End;
  end.span = {line, col};
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Int: return "integer " + t.text;
    default: return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  ModelDocument document() {
    ModelDocument doc;
    bool have_tree = false;
    if (peek().kind == Tok::End) {
      fail("expected a top-level declaration (tree, env, condition, action, on_root_result, "
           "invariant), found end of input");
    }
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (is_word("tree")) {
        if (have_tree) fail("duplicate 'tree' block");
        have_tree = true;
        doc.tree_span = t.span;
        tree_block(doc);
      } else if (is_word("env")) {
        env_block(doc);
      } else if (is_word("condition")) {
        condition_block(doc);
      } else if (is_word("action")) {
        action_block(doc);
      } else if (is_word("on_root_result")) {
        if (doc.hook_span) fail("duplicate 'on_root_result' block");
        doc.hook_span = t.span;
        next();
        doc.root_result_hook = assignment_block();
      } else if (is_word("invariant")) {
        invariant_block(doc);
      } else {
        fail("expected a top-level declaration (tree, env, condition, action, on_root_result, "
             "invariant), found " + describe(t));
      }
    }
    if (!have_tree) fail("missing 'tree' block");
    return doc;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, SourceSpan> node_names_;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& message) const { fail_at(peek().span, message); }
  [[noreturn]] static void fail_at(const SourceSpan& span, const std::string& message) {
    throw ParseError(message, span.line, span.column);
  }

  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == w;
  }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "', found " + describe(peek()));
    next();
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) fail("expected '" + std::string(w) + "', found " + describe(peek()));
    next();
  }
  std::string name(std::string_view what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("expected " + std::string(what) + ", found " + describe(t));
    if (is_reserved(t.text)) {
      fail("expected " + std::string(what) + ", found reserved word '" + t.text + "'");
    }
    return next().text;
  }
  Value signed_int() {
    bool negative = false;
    if (is_punct("-")) {
      next();
      negative = true;
    }
    if (peek().kind != Tok::Int) fail("expected an integer, found " + describe(peek()));
    const Value v = next().value;
    return negative ? -v : v;
  }

  // tree ------------------------------------------------------------------

  void tree_block(ModelDocument& doc) {
    expect_word("tree");
    expect_punct("{");
    while (!is_punct("}")) {
      if (peek().kind == Tok::End) fail("expected '}' to close 'tree', found end of input");
      doc.tree.push_back(node_decl());
    }
    next();
  }

  NodeSyntax node_decl() {
    NodeSyntax node;
    const Token& kind = peek();
    node.span = kind.span;
    if (kind.kind != Tok::Ident) fail("expected a node declaration, found " + describe(kind));
    if (kind.text == "root") {
      node.type = NodeType::Root;
    } else if (kind.text == "sequence") {
      node.type = NodeType::Sequence;
    } else if (kind.text == "fallback") {
      node.type = NodeType::Fallback;
    } else if (kind.text == "condition") {
      node.type = NodeType::Condition;
    } else if (kind.text == "action") {
      node.type = NodeType::Action;
    } else {
      fail("unknown node kind '" + kind.text +
           "' (expected root, sequence, fallback, condition or action)");
    }
    next();

    const bool id_follows = is_word("id") && is_punct("=", 1);
    if (node.type == NodeType::Root && (id_follows || is_punct("{") || is_punct(";"))) {
      node.name = "root";
    } else {
      node.name = name("a node name");
    }
    if (auto [it, inserted] = node_names_.emplace(node.name, node.span); !inserted) {
      fail_at(node.span, "duplicate node name '" + node.name + "' (first declared at " +
                             to_string(it->second) + ")");
    }

    if (is_word("id") && is_punct("=", 1)) {
      next();
      next();
      const Value id = signed_int();
      if (id < 0 || id > static_cast<Value>(UINT32_MAX)) fail("node id out of range");
      node.explicit_id = static_cast<std::uint32_t>(id);
    }

    if (is_punct(";")) {
      next();
      return node;
    }
    expect_punct("{");
    while (!is_punct("}")) {
      if (peek().kind == Tok::End) {
        fail("expected '}' to close node '" + node.name + "', found end of input");
      }
      node.children.push_back(node_decl());
    }
    next();
    return node;
  }

  // env -------------------------------------------------------------------

  void env_block(ModelDocument& doc) {
    expect_word("env");
    expect_punct("{");
    while (!is_punct("}")) {
      VarSyntax v;
      v.span = peek().span;
      expect_word("var");
      v.decl.name = name("a variable name");
      expect_punct(":");
      if (is_word("int")) {
        next();
        expect_word("in");
        const SourceSpan range_span = peek().span;
        const Value lo = signed_int();
        expect_punct("..");
        const Value hi = signed_int();
        if (lo > hi) fail_at(range_span, "empty range " + std::to_string(lo) + ".." + std::to_string(hi));
        v.decl.domain = Domain::range(lo, hi);
        v.decl.initial = lo;
        if (is_punct("=")) {
          next();
          v.decl.initial = signed_int();
        }
      } else if (is_word("bool")) {
        next();
        v.decl.domain = Domain::boolean();
        v.decl.initial = 0;
        if (is_punct("=")) {
          next();
          if (is_word("true") || is_word("false")) {
            v.decl.initial = next().text == "true" ? 1 : 0;
          } else {
            fail("expected 'true' or 'false', found " + describe(peek()));
          }
        }
      } else {
        fail("expected 'int' or 'bool', found " + describe(peek()));
      }
      expect_punct(";");
      doc.variables.push_back(std::move(v));
    }
    next();
  }

  // behaviors ---------------------------------------------------------------

  void condition_block(ModelDocument& doc) {
    ConditionSyntax c;
    c.span = peek().span;
    expect_word("condition");
    c.node = name("a condition name");
    expect_punct("{");
    expect_word("success_when");
    expect_punct(":");
    c.success_when = expr();
    expect_punct(";");
    expect_punct("}");
    doc.conditions.push_back(std::move(c));
  }

  void action_block(ModelDocument& doc) {
    ActionSyntax a;
    a.span = peek().span;
    expect_word("action");
    a.node = name("an action name");
    expect_punct("{");
    while (!is_punct("}")) {
      OutcomeSyntax o;
      o.span = peek().span;
      expect_word("outcome");
      const Token& r = peek();
      auto result = r.kind == Tok::Ident ? parse_tick_result(r.text) : std::nullopt;
      if (!result || *result == TickResult::Unknown) {
        fail("expected SUCCESS, RUNNING or FAILURE, found " + describe(r));
      }
      next();
      o.result = *result;
      expect_word("when");
      o.guard = expr();
      if (is_punct(";")) {
        next();
      } else {
        o.effects = assignment_block();
      }
      a.outcomes.push_back(std::move(o));
    }
    next();
    doc.actions.push_back(std::move(a));
  }

  std::vector<Assignment> assignment_block() {
    std::vector<Assignment> out;
    expect_punct("{");
    while (!is_punct("}")) {
      Assignment a;
      a.target = name("a variable name");
      expect_punct(":=");
      a.value = expr();
      expect_punct(";");
      out.push_back(std::move(a));
    }
    next();
    return out;
  }

  void invariant_block(ModelDocument& doc) {
    InvariantSyntax inv;
    inv.span = peek().span;
    expect_word("invariant");
    inv.invariant.name = name("an invariant name");
    expect_punct("{");
    inv.invariant.predicate = expr();
    expect_punct(";");
    expect_punct("}");
    doc.invariants.push_back(std::move(inv));
  }

  // expressions ---------------------------------------------------------------

  Expr expr() { return or_expr(); }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (is_punct("||")) {
      next();
      lhs = Expr::binary(Expr::Op::Or, std::move(lhs), and_expr());
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (is_punct("&&")) {
      next();
      lhs = Expr::binary(Expr::Op::And, std::move(lhs), not_expr());
    }
    return lhs;
  }

  Expr not_expr() {
    if (is_punct("!")) {
      next();
      return Expr::unary(Expr::Op::Not, not_expr());
    }
    return comparison();
  }

  Expr comparison() {
    Expr lhs = additive();
    static constexpr std::array<std::pair<std::string_view, Expr::Op>, 6> kOps{{
        {"==", Expr::Op::Eq}, {"!=", Expr::Op::Ne}, {"<", Expr::Op::Lt},
        {"<=", Expr::Op::Le}, {">", Expr::Op::Gt}, {">=", Expr::Op::Ge},
    }};
    for (const auto& [text, op] : kOps) {
      if (is_punct(text)) {
        next();
        return Expr::binary(op, std::move(lhs), additive());
      }
    }
    return lhs;
  }

  Expr additive() {
    Expr lhs = unary();
    while (is_punct("+") || is_punct("-")) {
      const auto op = next().text == "+" ? Expr::Op::Add : Expr::Op::Sub;
      lhs = Expr::binary(op, std::move(lhs), unary());
    }
    return lhs;
  }

  Expr unary() {
    if (is_punct("-")) {
      next();
      // a minus directly before a literal is part of the literal
      if (peek().kind == Tok::Int) return Expr::integer(-next().value);
      return Expr::unary(Expr::Op::Neg, unary());
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return Expr::integer(next().value);
    if (is_punct("(")) {
      next();
      Expr e = expr();
      expect_punct(")");
      return e;
    }
    if (is_word("true") || is_word("false")) return Expr::boolean(next().text == "true");
    if (t.kind == Tok::Ident && !is_reserved(t.text)) return Expr::var(next().text);
    fail("expected an expression, found " + describe(t));
  }
};

// ---------------------------------------------------------------------------
// Elaboration

std::vector<const NodeSyntax*> breadth_first(const ModelDocument& doc,
                                             std::vector<std::optional<std::size_t>>* parents) {
  std::vector<const NodeSyntax*> order;
  std::deque<std::pair<const NodeSyntax*, std::optional<std::size_t>>> queue;
  for (const auto& n : doc.tree) {
    if (n.type == NodeType::Root) queue.emplace_back(&n, std::nullopt);
  }
  for (const auto& n : doc.tree) {
    if (n.type != NodeType::Root) queue.emplace_back(&n, std::nullopt);
  }
  while (!queue.empty()) {
    auto [node, parent] = queue.front();
    queue.pop_front();
    const std::size_t index = order.size();
    order.push_back(node);
    if (parents) parents->push_back(parent);
    for (const auto& c : node->children) queue.emplace_back(&c, index);
  }
  return order;
}

[[noreturn]] void model_error(const SourceSpan& span, const std::string& message) {
  throw ModelError(to_string(span) + ": " + message);
}

template <class F>
auto at_span(const SourceSpan& span, F&& f) {
  try {
    return f();
  } catch (const DomainViolation&) {
    throw;
  } catch (const ModelError& e) {
    model_error(span, e.what());
  }
}

}  // namespace

ModelDocument parse(std::string_view text) {
  Parser parser(text);
  return parser.document();
}

TreeSpec build_tree_spec(const ModelDocument& doc, IdNumbering numbering) {
  std::vector<std::optional<std::size_t>> parents;
  const auto order = breadth_first(doc, &parents);
  TreeSpec spec;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::uint32_t id = static_cast<std::uint32_t>(i);
    if (numbering == IdNumbering::Explicit && order[i]->explicit_id) id = *order[i]->explicit_id;
    std::optional<NodeIndex> parent;
    if (parents[i]) parent = static_cast<NodeIndex>(*parents[i]);
    spec.add(order[i]->name, order[i]->type, id, parent);
  }
  return spec;
}

Model elaborate(const ModelDocument& doc) {
  TreeSpec spec = build_tree_spec(doc, IdNumbering::BreadthFirst);
  const auto order = breadth_first(doc, nullptr);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i]->explicit_id && *order[i]->explicit_id != i) {
      model_error(order[i]->span, "explicit id " + std::to_string(*order[i]->explicit_id) +
                                      " of '" + order[i]->name +
                                      "' does not match breadth-first numbering (expected " +
                                      std::to_string(i) + ")");
    }
  }
  Tree tree(std::move(spec));

  EnvSpec env;
  for (const auto& v : doc.variables) {
    if (env.find(v.decl.name)) model_error(v.span, "duplicate variable '" + v.decl.name + "'");
    if (!v.decl.domain.contains(v.decl.initial)) {
      model_error(v.span, "initial value " + std::to_string(v.decl.initial) + " of '" +
                              v.decl.name + "' is outside its domain");
    }
    env.variables.push_back(v.decl);
  }
  for (const auto& inv : doc.invariants) {
    const bool dup = std::any_of(env.invariants.begin(), env.invariants.end(),
                                 [&](const Invariant& i) { return i.name == inv.invariant.name; });
    if (dup) model_error(inv.span, "duplicate invariant '" + inv.invariant.name + "'");
    Invariant resolved = inv.invariant;
    at_span(inv.span, [&] { resolve_predicate(resolved.predicate, env, "invariant"); });
    env.invariants.push_back(std::move(resolved));
  }
  env.root_result_hook = doc.root_result_hook;
  for (auto& a : env.root_result_hook) {
    at_span(doc.hook_span.value_or(SourceSpan{}), [&] { resolve(a, env); });
  }

  std::vector<LeafBehavior> behaviors(tree.size());
  auto leaf = [&](const std::string& node, NodeType want, const SourceSpan& span) {
    auto index = tree.spec().find(node);
    const std::string_view what = want == NodeType::Condition ? "condition" : "action";
    if (!index) model_error(span, std::string(what) + " block for unknown node '" + node + "'");
    if (tree.type(*index) != want) {
      model_error(span, "node '" + node + "' is a " + std::string(to_string(tree.type(*index))) +
                            ", not a " + std::string(to_string(want)));
    }
    if (!std::holds_alternative<std::monostate>(behaviors[*index])) {
      model_error(span, "duplicate " + std::string(what) + " block for '" + node + "'");
    }
    return *index;
  };
  for (const auto& c : doc.conditions) {
    const NodeIndex n = leaf(c.node, NodeType::Condition, c.span);
    ConditionBehavior b{c.success_when};
    at_span(c.span, [&] { resolve_predicate(b.success_when, env, "success_when"); });
    behaviors[n] = std::move(b);
  }
  for (const auto& a : doc.actions) {
    const NodeIndex n = leaf(a.node, NodeType::Action, a.span);
    ActionBehavior b;
    for (const auto& o : a.outcomes) {
      ActionOutcome out{o.guard, o.result, o.effects};
      at_span(o.span, [&] {
        resolve_predicate(out.guard, env, "outcome guard");
        for (auto& e : out.effects) resolve(e, env);
      });
      b.outcomes.push_back(std::move(out));
    }
    const auto ex = check_exhaustive(b, env);
    if (ex.status == ExhaustivenessResult::Status::Gap) {
      model_error(a.span, "outcome guards of action '" + a.node +
                              "' are not exhaustive: no outcome is enabled when " +
                              format_valuation(env, *ex.witness));
    }
    behaviors[n] = std::move(b);
  }
  for (NodeIndex n : tree.by_id()) {
    if (is_leaf(tree.type(n)) && std::holds_alternative<std::monostate>(behaviors[n])) {
      const auto* syntax = order[n];
      model_error(syntax->span, "missing behavior for " +
                                    std::string(tree.type(n) == NodeType::Condition ? "condition"
                                                                                    : "action") +
                                    " '" + tree.name(n) + "'");
    }
  }

  return Model{std::move(tree), std::move(env), std::move(behaviors)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return buf.str();
}

Model load_model(const std::filesystem::path& path) { return elaborate(parse(read_file(path))); }

namespace {

void print_node(const Tree& tree, NodeIndex n, int indent, std::ostream& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  out << pad;
  switch (tree.type(n)) {
    case NodeType::Root:
      out << "root";
      if (tree.name(n) != "root") out << ' ' << tree.name(n);
      break;
    case NodeType::Sequence: out << "sequence " << tree.name(n); break;
    case NodeType::Fallback: out << "fallback " << tree.name(n); break;
    case NodeType::Condition: out << "condition " << tree.name(n); break;
    case NodeType::Action: out << "action " << tree.name(n); break;
  }
  if (tree.children(n).empty()) {
    out << ";\n";
    return;
  }
  out << " {\n";
  for (NodeIndex c : tree.children(n)) print_node(tree, c, indent + 1, out);
  out << pad << "}\n";
}

std::string print_assignments(const std::vector<Assignment>& list) {
  std::string out = "{";
  for (const auto& a : list) out += " " + a.target + " := " + to_string(a.value) + ";";
  return out + " }";
}

}  // namespace

std::string print_model(const Model& model) {
  std::ostringstream out;
  const Tree& tree = model.tree;
  out << "tree {\n";
  print_node(tree, tree.root(), 1, out);
  out << "}\n";

  if (!model.env.variables.empty()) {
    out << "env {\n";
    for (const auto& v : model.env.variables) {
      out << "  var " << v.name << ": ";
      if (v.domain.type == ValueType::Bool) {
        out << "bool = " << (v.initial ? "true" : "false");
      } else {
        out << "int in " << v.domain.lo << ".." << v.domain.hi << " = " << v.initial;
      }
      out << ";\n";
    }
    out << "}\n";
  }

  for (NodeIndex n : tree.by_id()) {
    if (tree.type(n) == NodeType::Condition) {
      out << "condition " << tree.name(n) << " { success_when: "
          << to_string(model.condition(n).success_when) << "; }\n";
    } else if (tree.type(n) == NodeType::Action) {
      out << "action " << tree.name(n) << " {\n";
      for (const auto& o : model.action(n).outcomes) {
        out << "  outcome " << to_string(o.result) << " when " << to_string(o.guard) << " "
            << print_assignments(o.effects) << "\n";
      }
      out << "}\n";
    }
  }

  if (!model.env.root_result_hook.empty()) {
    out << "on_root_result " << print_assignments(model.env.root_result_hook) << "\n";
  }
  for (const auto& inv : model.env.invariants) {
    out << "invariant " << inv.name << " { " << to_string(inv.predicate) << "; }\n";
  }
  return out.str();
}

std::string model_digest(const Model& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : print_model(model)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace btv
