#include "btv/random_model.hpp"

#include <random>
#include <sstream>
#include <vector>

#include "btv/frontend.hpp"

namespace btv {

namespace {

struct GenNode {
  NodeType type;
  std::uint32_t depth;
  std::vector<std::size_t> children;
  std::string name;
};

struct GenVar {
  std::string name;
  bool boolean;
  Value lo;
  Value hi;
};

class Generator {
 public:
  Generator(std::uint64_t seed, const RandomModelOptions& options) : rng_(seed), opt_(options) {}

  std::string run() {
    make_tree();
    make_vars();
    std::ostringstream out;
    out << "// generated by random_model_text\n";
    out << "tree {\n";
    emit_node(0, 1, out);
    out << "}\n";
    if (!vars_.empty()) {
      out << "env {\n";
      for (const auto& v : vars_) {
        if (v.boolean) {
          out << "  var " << v.name << ": bool = " << (chance(0.5) ? "true" : "false") << ";\n";
        } else {
          out << "  var " << v.name << ": int in " << v.lo << ".." << v.hi << " = "
              << between(v.lo, v.hi) << ";\n";
        }
      }
      out << "}\n";
    }
    for (const auto& n : nodes_) {
      if (n.type == NodeType::Condition) {
        out << "condition " << n.name << " { success_when: " << predicate(1) << "; }\n";
      } else if (n.type == NodeType::Action) {
        out << "action " << n.name << " {\n" << action_body() << "}\n";
      }
    }
    if (opt_.allow_hook && chance(0.3)) {
      if (const GenVar* v = pick_var(false)) {
        out << "on_root_result { " << v->name << " := " << v->name << " + 1; }\n";
      }
    }
    if (opt_.with_invariant) out << "invariant inv0 { " << predicate(1) << "; }\n";
    return out.str();
  }

 private:
  std::mt19937_64 rng_;
  RandomModelOptions opt_;
  std::vector<GenNode> nodes_;
  std::vector<GenVar> vars_;
  int counter_ = 0;

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  Value between(Value lo, Value hi) { return lo + static_cast<Value>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }

  std::size_t add_node(NodeType type, std::uint32_t depth, std::optional<std::size_t> parent) {
    std::string prefix;
    switch (type) {
      case NodeType::Root: prefix = "root"; break;
      case NodeType::Sequence: prefix = "seq_"; break;
      case NodeType::Fallback: prefix = "fb_"; break;
      case NodeType::Condition: prefix = "cond_"; break;
      case NodeType::Action: prefix = "act_"; break;
    }
    nodes_.push_back({type, depth, {}, type == NodeType::Root ? prefix : prefix + std::to_string(counter_++)});
    if (parent) nodes_[*parent].children.push_back(nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  NodeType leaf_type() { return chance(0.5) ? NodeType::Condition : NodeType::Action; }
  NodeType control_type() { return chance(0.5) ? NodeType::Sequence : NodeType::Fallback; }

  void make_tree() {
    const std::size_t target =
        2 + static_cast<std::size_t>(below(std::max<std::size_t>(opt_.max_nodes, 2) - 1));
    add_node(NodeType::Root, 0, std::nullopt);
    const bool control_child = target > 2 && opt_.max_depth >= 2;
    add_node(control_child ? control_type() : leaf_type(), 1, 0);

    while (nodes_.size() < target) {
      std::vector<std::size_t> open;
      for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (is_control(nodes_[i].type) && nodes_[i].depth < opt_.max_depth) open.push_back(i);
      }
      if (open.empty()) break;
      const std::size_t parent = open[below(open.size())];
      const std::uint32_t depth = nodes_[parent].depth + 1;
      const bool control = depth < opt_.max_depth && chance(0.35);
      add_node(control ? control_type() : leaf_type(), depth, parent);
    }
    for (auto& n : nodes_) {
      if (is_control(n.type) && n.children.empty()) {
        n.type = leaf_type();
        n.name = (n.type == NodeType::Condition ? "cond_" : "act_") + std::to_string(counter_++);
      }
    }
  }

  void make_vars() {
    const std::size_t count = below(opt_.max_vars + 1);
    for (std::size_t i = 0; i < count; ++i) {
      GenVar v{"v" + std::to_string(i), chance(0.3), 0, 1};
      if (!v.boolean) {
        const auto size = 2 + below(std::max<std::uint64_t>(opt_.max_domain, 2) - 1);
        v.lo = chance(0.2) ? -static_cast<Value>(below(3)) : 0;
        v.hi = v.lo + static_cast<Value>(size) - 1;
      }
      vars_.push_back(v);
    }
  }

  void emit_node(std::size_t i, int indent, std::ostream& out) const {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const GenNode& n = nodes_[i];
    switch (n.type) {
      case NodeType::Root: out << pad << "root"; break;
      case NodeType::Sequence: out << pad << "sequence " << n.name; break;
      case NodeType::Fallback: out << pad << "fallback " << n.name; break;
      case NodeType::Condition: out << pad << "condition " << n.name; break;
      case NodeType::Action: out << pad << "action " << n.name; break;
    }
    if (n.children.empty()) {
      out << ";\n";
      return;
    }
    out << " {\n";
    for (std::size_t c : n.children) emit_node(c, indent + 1, out);
    out << pad << "}\n";
  }

  const GenVar* pick_var(bool boolean) {
    std::vector<const GenVar*> matching;
    for (const auto& v : vars_) {
      if (v.boolean == boolean) matching.push_back(&v);
    }
    return matching.empty() ? nullptr : matching[below(matching.size())];
  }

  std::string atom() {
    if (vars_.empty() || chance(0.05)) return chance(0.5) ? "true" : "false";
    const GenVar& v = vars_[below(vars_.size())];
    if (v.boolean) return chance(0.5) ? v.name : "!" + v.name;
    static constexpr const char* kOps[] = {">=", "<", "==", "!=", "<=", ">"};
    return v.name + " " + kOps[below(6)] + " " + std::to_string(between(v.lo, v.hi + 1));
  }

  std::string predicate(int depth) {
    if (depth <= 0 || chance(0.6)) return atom();
    switch (below(3)) {
      case 0: return "(" + predicate(depth - 1) + ") && (" + predicate(depth - 1) + ")";
      case 1: return "(" + predicate(depth - 1) + ") || (" + predicate(depth - 1) + ")";
      default: return "!(" + predicate(depth - 1) + ")";
    }
  }

  std::string result() {
    const auto k = below(opt_.allow_running ? 3 : 2);
    return k == 0 ? "SUCCESS" : (k == 1 ? "FAILURE" : "RUNNING");
  }

  /// Assignments that stay inside their domains whatever the valuation.
  std::string safe_effects() {
    if (!opt_.allow_effects || vars_.empty()) return "{ }";
    std::string out = "{";
    std::vector<bool> used(vars_.size(), false);
    const auto count = below(3);
    for (std::uint64_t k = 0; k < count; ++k) {
      const auto i = below(vars_.size());
      if (used[i]) continue;
      used[i] = true;
      const GenVar& v = vars_[i];
      if (v.boolean) {
        switch (below(3)) {
          case 0: out += " " + v.name + " := !" + v.name + ";"; break;
          case 1: out += " " + v.name + " := " + (chance(0.5) ? "true" : "false") + ";"; break;
          default: out += " " + v.name + " := " + atom() + ";"; break;
        }
      } else {
        out += " " + v.name + " := " + std::to_string(between(v.lo, v.hi)) + ";";
      }
    }
    return out + " }";
  }

  std::string action_body() {
    std::string body;
    auto outcome = [&](const std::string& guard, const std::string& effects) {
      body += "  outcome " + result() + " when " + guard + " " + effects + "\n";
    };
    const GenVar* counter = opt_.allow_effects ? pick_var(false) : nullptr;
    const auto form = below(3);
    if (form == 0) {
      outcome("true", safe_effects());
    } else if (form == 1 && counter) {
      // wrap-around counter: exclusive and exhaustive guards
      const std::string hi = std::to_string(counter->hi);
      outcome(counter->name + " < " + hi, "{ " + counter->name + " := " + counter->name + " + 1; }");
      outcome(counter->name + " >= " + hi,
              "{ " + counter->name + " := " + std::to_string(counter->lo) + "; }");
    } else {
      const std::string p = predicate(1);
      outcome(p, safe_effects());
      outcome("!(" + p + ")", safe_effects());
    }
    if (!opt_.deterministic && chance(0.5)) outcome("true", safe_effects());
    return body;
  }
};

}  // namespace

std::string random_model_text(std::uint64_t seed, const RandomModelOptions& options) {
  return Generator(seed, options).run();
}

Model random_model(std::uint64_t seed, const RandomModelOptions& options) {
  return elaborate(parse(random_model_text(seed, options)));
}

}  // namespace btv
