#include "btv/checker.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstring>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace btv {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Holds: return "HOLDS";
    case Status::Violated: return "VIOLATED";
    case Status::Deadlock: return "DEADLOCK";
    case Status::DomainViolation: return "DOMAIN_VIOLATION";
    case Status::BoundExceeded: return "BOUND_EXCEEDED";
  }
  return "?";
}

std::optional<Status> parse_status(std::string_view text) {
  for (Status s : {Status::Holds, Status::Violated, Status::Deadlock, Status::DomainViolation,
                   Status::BoundExceeded}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

namespace {

// One byte per node (tick, analyzing_subtree, result) followed by the env
// values as raw 64-bit integers. Equal states pack to equal strings.
std::string pack(const MachineState& s) {
  const std::size_t n = s.ticked.size();
  std::string out(n + s.env.values.size() * sizeof(Value), '\0');
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<char>((s.ticked[i] ? 1 : 0) | (s.analyzing_subtree[i] ? 2 : 0) |
                               (static_cast<unsigned>(s.result[i]) << 2));
  }
  if (!s.env.values.empty()) {
    std::memcpy(out.data() + n, s.env.values.data(), s.env.values.size() * sizeof(Value));
  }
  return out;
}

MachineState unpack(const std::string& bytes, std::size_t n_nodes) {
  MachineState s;
  s.ticked.resize(n_nodes);
  s.analyzing_subtree.resize(n_nodes);
  s.result.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const auto b = static_cast<unsigned char>(bytes[i]);
    s.ticked[i] = b & 1;
    s.analyzing_subtree[i] = b & 2;
    s.result[i] = static_cast<TickResult>(b >> 2);
  }
  s.env.values.resize((bytes.size() - n_nodes) / sizeof(Value));
  if (!s.env.values.empty()) {
    std::memcpy(s.env.values.data(), bytes.data() + n_nodes, s.env.values.size() * sizeof(Value));
  }
  return s;
}

/// Runs task(i) for i in [0, tasks) on up to `workers` threads. The first
/// exception thrown by any task is rethrown on the calling thread.
void run_parallel(unsigned workers, std::size_t tasks, const std::function<void(std::size_t)>& task) {
  if (workers <= 1 || tasks <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> threads;
    const auto count = std::min<std::size_t>(workers, tasks);
    threads.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < tasks; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

constexpr std::size_t kShards = 64;
constexpr std::uint32_t kNoParent = UINT32_MAX;
// Below this many frontier states a layer is expanded on the calling thread.
constexpr std::size_t kParallelThreshold = 64;

using VisitedShard = std::unordered_map<std::string, std::uint32_t>;

struct Candidate {
  std::string key;
  std::uint32_t parent = 0;
  Event event;
  bool violates = false;
  bool is_new = false;
  VisitedShard::value_type* slot = nullptr;
};

struct Issue {
  std::size_t frontier_pos = 0;
  Status status = Status::Deadlock;
  std::optional<Event> event;
  std::string detail;
};

struct ChunkOutput {
  std::vector<Candidate> candidates;
  std::array<std::vector<std::uint32_t>, kShards> by_shard;
  std::optional<Issue> issue;
};

std::size_t shard_of(const std::string& key) {
  const std::size_t h = std::hash<std::string>{}(key);
  return (h ^ (h >> 29)) % kShards;
}

class Explorer {
 public:
  Explorer(const Model& model, const ExploreOptions& options)
      : model_(model), options_(options), workers_(std::max(1u, options.workers)) {}

  Verdict run() {
    const auto started = std::chrono::steady_clock::now();
    Verdict v = search();
    v.stats.workers = workers_;
    v.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (options_.keep_states) {
      v.reachable.reserve(states_.size());
      for (const auto* key : states_) v.reachable.push_back(unpack(*key, n_nodes()));
    }
    return v;
  }

 private:
  struct Pred {
    std::uint32_t parent;
    Event event;
  };

  const Model& model_;
  ExploreOptions options_;
  unsigned workers_;
  std::vector<VisitedShard> visited_ = std::vector<VisitedShard>(kShards);
  std::vector<const std::string*> states_;
  std::vector<Pred> preds_;

  std::size_t n_nodes() const { return model_.tree.size(); }

  std::uint32_t admit(VisitedShard::value_type& slot, std::uint32_t parent, const Event& e) {
    const auto id = static_cast<std::uint32_t>(states_.size());
    slot.second = id;
    states_.push_back(&slot.first);
    preds_.push_back({parent, e});
    return id;
  }

  std::vector<TraceStep> path_to(std::uint32_t id) const {
    std::vector<std::uint32_t> ids;
    for (std::uint32_t cur = id; preds_[cur].parent != kNoParent; cur = preds_[cur].parent) {
      ids.push_back(cur);
    }
    std::reverse(ids.begin(), ids.end());
    std::vector<TraceStep> out;
    out.reserve(ids.size());
    for (std::uint32_t i : ids) out.push_back({preds_[i].event, unpack(*states_[i], n_nodes())});
    return out;
  }

  Verdict finish(Verdict v, Status status, std::string detail) const {
    v.status = status;
    v.detail = std::move(detail);
    v.states_explored = states_.size();
    return v;
  }

  Verdict violated(Verdict v, std::uint32_t id) const {
    const MachineState s = unpack(*states_[id], n_nodes());
    const auto names = check_invariants(model_.env, s.env);
    std::string detail = "invariant";
    detail += names.size() > 1 ? "s" : "";
    for (std::size_t i = 0; i < names.size(); ++i) detail += (i ? ", '" : " '") + names[i] + "'";
    detail += " violated when " + format_valuation(model_.env, s.env);
    v.violated_invariant = names.front();
    v.counterexample = path_to(id);
    return finish(std::move(v), Status::Violated, std::move(detail));
  }

  void expand_chunk(const std::vector<std::uint32_t>& frontier, std::size_t begin, std::size_t end,
                    ChunkOutput& out) const {
    for (std::size_t pos = begin; pos < end; ++pos) {
      const MachineState state = unpack(*states_[frontier[pos]], n_nodes());
      const auto events = enabled_events(model_, state);
      if (events.empty()) {
        out.issue = Issue{pos, Status::Deadlock, std::nullopt,
                          "no event enabled when " + format_valuation(model_.env, state.env)};
        return;
      }
      for (const Event& e : events) {
        MachineState next;
        try {
          next = apply_event(model_, state, e);
        } catch (const DomainViolation& dv) {
          out.issue = Issue{pos, Status::DomainViolation, e, describe(model_, e) + ": " + dv.what()};
          return;
        }
        Candidate c;
        c.key = pack(next);
        c.parent = frontier[pos];
        c.event = e;
        c.violates = !check_invariants(model_.env, next.env).empty();
        out.by_shard[shard_of(c.key)].push_back(static_cast<std::uint32_t>(out.candidates.size()));
        out.candidates.push_back(std::move(c));
      }
    }
  }

  Verdict search() {
    Verdict v;
    const MachineState init = initial_state(model_);
    {
      std::string key = pack(init);
      const std::size_t shard = shard_of(key);
      auto [it, inserted] = visited_[shard].try_emplace(std::move(key), 0);
      states_.push_back(&it->first);
      preds_.push_back({kNoParent, Event{}});
    }
    if (!check_invariants(model_.env, init.env).empty()) return violated(std::move(v), 0);

    std::vector<std::uint32_t> frontier{0};
    std::uint64_t depth = 0;
    while (!frontier.empty()) {
      v.stats.peak_frontier = std::max<std::uint64_t>(v.stats.peak_frontier, frontier.size());
      const bool depth_capped = options_.max_depth && depth >= *options_.max_depth;

      // Expand the layer.
      const std::size_t n_chunks =
          (workers_ == 1 || frontier.size() < kParallelThreshold)
              ? 1
              : std::min<std::size_t>(frontier.size(), std::size_t{workers_} * 4);
      std::vector<ChunkOutput> chunks(n_chunks);
      run_parallel(workers_, n_chunks, [&](std::size_t c) {
        const std::size_t begin = frontier.size() * c / n_chunks;
        const std::size_t end = frontier.size() * (c + 1) / n_chunks;
        expand_chunk(frontier, begin, end, chunks[c]);
      });

      for (const auto& chunk : chunks) {
        v.transitions += chunk.candidates.size();
        if (chunk.issue) {
          v.counterexample = path_to(frontier[chunk.issue->frontier_pos]);
          v.failing_event = chunk.issue->event;
          v.stats.depth = depth;
          return finish(std::move(v), chunk.issue->status, chunk.issue->detail);
        }
      }

      // Deduplicate: each shard sees its candidates in global order, so the
      // first occurrence of a state is the one marked new.
      run_parallel(workers_, kShards, [&](std::size_t s) {
        for (auto& chunk : chunks) {
          for (std::uint32_t i : chunk.by_shard[s]) {
            Candidate& c = chunk.candidates[i];
            auto [it, inserted] = visited_[s].try_emplace(std::move(c.key), 0);
            if (inserted) {
              c.is_new = true;
              c.slot = &*it;
            }
          }
        }
      });

      // Number the new states in discovery order.
      std::vector<std::uint32_t> next_frontier;
      for (auto& chunk : chunks) {
        for (auto& c : chunk.candidates) {
          if (!c.is_new) continue;
          if (depth_capped) {
            v.stats.depth = depth;
            return finish(std::move(v), Status::BoundExceeded,
                          "depth bound " + std::to_string(*options_.max_depth) + " reached");
          }
          if (states_.size() >= options_.max_states) {
            v.stats.depth = depth;
            return finish(std::move(v), Status::BoundExceeded,
                          "state bound " + std::to_string(options_.max_states) + " reached");
          }
          const std::uint32_t id = admit(*c.slot, c.parent, c.event);
          if (c.violates) {
            v.stats.depth = depth + 1;
            return violated(std::move(v), id);
          }
          next_frontier.push_back(id);
        }
      }
      frontier = std::move(next_frontier);
      ++depth;
    }
    v.stats.depth = depth;
    return finish(std::move(v), Status::Holds, "");
  }
};

}  // namespace

Verdict explore(const Model& model, const ExploreOptions& options) {
  return Explorer(model, options).run();
}

MachineState replay(const Model& model, std::span<const Event> trace) {
  MachineState state = initial_state(model);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (!is_enabled(model, state, trace[k])) {
      const std::string what = trace[k].node < model.tree.size()
                                   ? describe(model, trace[k])
                                   : std::string(to_string(trace[k].kind));
      throw TraceError("step " + std::to_string(k + 1) + ": event " + what + " is not enabled", k);
    }
    state = apply_event(model, state, trace[k]);
  }
  return state;
}

MachineState replay(const Model& model, std::span<const TraceStep> trace) {
  std::vector<Event> events;
  events.reserve(trace.size());
  for (const auto& step : trace) events.push_back(step.event);
  return replay(model, std::span<const Event>(events));
}

CycleOutcomes explore_cycle(const Model& model, const MachineState& start) {
  CycleOutcomes out;
  std::unordered_set<std::string> seen{pack(start)};
  std::vector<MachineState> stack{start};
  const NodeIndex root = model.tree.root();
  while (!stack.empty()) {
    MachineState s = std::move(stack.back());
    stack.pop_back();
    ++out.states;
    const auto events = enabled_events(model, s);
    if (events.empty()) out.deadlock = true;
    for (const Event& e : events) {
      MachineState next = apply_event(model, s, e);
      if (e.kind == EventKind::RootReinitialize) {
        out.terminals.emplace(s.result[root], next.env);
        continue;
      }
      if (seen.insert(pack(next)).second) stack.push_back(std::move(next));
    }
  }
  return out;
}

}  // namespace btv
