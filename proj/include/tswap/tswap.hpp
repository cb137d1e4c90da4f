#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tswap/assignment.hpp"
#include "tswap/errors.hpp"
#include "tswap/graph.hpp"
#include "tswap/instance.hpp"

namespace tswap {

struct AgentState {
  Node v = kNoNode;  // current location
  Node g = kNoNode;  // current target
};

enum class EventKind { stay, move, swap, rotate };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::stay: return "stay";
    case EventKind::move: return "move";
    case EventKind::swap: return "swap";
    case EventKind::rotate: return "rotate";
  }
  return "?";
}

/// Outcome of one agent step. A rotation may be followed by a move of the
/// rotating agent, in which case `to` differs from `from`.
struct StepEffect {
  EventKind kind = EventKind::stay;
  Node from = kNoNode;
  Node to = kNoNode;
  std::vector<int> partners;  // swap partner, or the rest of the rotated cycle

  bool moved() const noexcept { return from != to; }
};

/// Mutable configuration shared by the offline and online engines.
class Configuration {
 public:
  Configuration(const Instance& inst, const Assignment& assignment)
      : inst_(&inst), oracle_(inst.graph()), occupant_(inst.graph().size(), -1) {
    if (assignment.goals.size() != inst.num_agents()) throw ContractError("assignment size does not match agents");
    std::vector<bool> used(inst.graph().size(), false);
    for (std::size_t i = 0; i < inst.num_agents(); ++i) {
      const Node g = assignment.goals[i];
      inst.graph().check(g);
      if (used[g]) throw ContractError("assignment reuses a goal node");
      used[g] = true;
      agents_.push_back({inst.starts()[i], g});
      occupant_[inst.starts()[i]] = static_cast<int>(i);
    }
    for (Node t : inst.targets()) {
      if (!used[t]) throw ContractError("assignment leaves a target without an agent");
    }
  }

  const std::vector<AgentState>& agents() const noexcept { return agents_; }
  const AgentState& agent(int a) const { return agents_[a]; }
  std::size_t size() const noexcept { return agents_.size(); }
  int occupant(Node v) const { return occupant_[v]; }
  DistanceOracle& oracle() noexcept { return oracle_; }
  const Instance& instance() const noexcept { return *inst_; }

  bool at_goal(int a) const { return agents_[a].v == agents_[a].g; }

  bool all_at_goal() const {
    return std::all_of(agents_.begin(), agents_.end(), [](const AgentState& s) { return s.v == s.g; });
  }

  bool targets_covered() const {
    return std::all_of(inst_->targets().begin(), inst_->targets().end(),
                       [this](Node t) { return occupant_[t] >= 0; });
  }

  Node next_node(int a) { return oracle_.next_node(agents_[a].v, agents_[a].g); }

  void move(int a, Node u) {
    if (occupant_[u] >= 0) throw ContractError("move into an occupied node");
    if (!inst_->graph().adjacent(agents_[a].v, u)) throw ContractError("move along a non-edge");
    occupant_[agents_[a].v] = -1;
    occupant_[u] = a;
    agents_[a].v = u;
  }

  void swap_targets(int a, int b) { std::swap(agents_[a].g, agents_[b].g); }

  /// Each agent in the cycle takes the target of its predecessor; the first
  /// agent takes the target of the last one.
  void rotate_targets(const std::vector<int>& cycle) {
    const Node last = agents_[cycle.back()].g;
    for (std::size_t i = cycle.size() - 1; i > 0; --i) agents_[cycle[i]].g = agents_[cycle[i - 1]].g;
    agents_[cycle.front()].g = last;
  }

  std::vector<Node> locations() const {
    std::vector<Node> out;
    out.reserve(agents_.size());
    for (const auto& s : agents_) out.push_back(s.v);
    return out;
  }

 private:
  const Instance* inst_;
  DistanceOracle oracle_;
  std::vector<AgentState> agents_;
  std::vector<int> occupant_;
};

/// Follow the chain of blockers starting at `a`. Returns the agents of the
/// cycle (starting with `a`) if the chain comes back to `a`.
inline std::optional<std::vector<int>> detect_deadlock(Configuration& conf, int a) {
  std::vector<int> chain{a};
  std::vector<bool> seen(conf.size(), false);
  seen[a] = true;
  int cur = a;
  for (std::size_t step = 0; step < conf.size(); ++step) {
    if (conf.at_goal(cur)) return std::nullopt;
    const int b = conf.occupant(conf.next_node(cur));
    if (b < 0) return std::nullopt;
    if (b == a) return chain;
    if (seen[b]) return std::nullopt;
    seen[b] = true;
    chain.push_back(b);
    cur = b;
  }
  return std::nullopt;
}

/// One step of agent `a`: stay at its target, move toward it, swap targets
/// with a blocker standing on its own target, or rotate targets along a
/// deadlock cycle (then move if the new next node is free).
inline StepEffect step_agent(Configuration& conf, int a) {
  StepEffect e;
  e.from = e.to = conf.agent(a).v;
  if (conf.at_goal(a)) return e;
  const Node u = conf.next_node(a);
  const int b = conf.occupant(u);
  if (b < 0) {
    conf.move(a, u);
    e.kind = EventKind::move;
    e.to = u;
    return e;
  }
  if (b == a) throw ContractError("occupancy does not match agent states");
  if (u == conf.agent(b).g) {
    conf.swap_targets(a, b);
    e.kind = EventKind::swap;
    e.partners = {b};
    return e;
  }
  if (auto cycle = detect_deadlock(conf, a)) {
    conf.rotate_targets(*cycle);
    e.kind = EventKind::rotate;
    e.partners.assign(cycle->begin() + 1, cycle->end());
    if (!conf.at_goal(a)) {
      const Node w = conf.next_node(a);
      if (conf.occupant(w) < 0) {
        conf.move(a, w);
        e.to = w;
      }
    }
  }
  return e;
}

struct PlanEvent {
  int timestep = 0;
  int agent = 0;
  StepEffect effect;
};

struct OfflineResult {
  Plan plan;                     // truncated at the first timestep covering all targets
  std::vector<PlanEvent> events;  // swaps and rotations
};

/// Called after every timestep with the timestep index and the configuration.
using TimestepObserver = std::function<void(int, const Configuration&)>;

/// Offline planner: repeat one-timestep planning until every agent rests on
/// its goal. Within a timestep, an agent blocked by an agent that has not
/// acted yet lets that agent act first.
inline OfflineResult solve_offline(const Instance& inst, const Assignment& assignment,
                                   const TimestepObserver& observer = nullptr) {
  Configuration conf(inst, assignment);
  const int n = static_cast<int>(conf.size());
  OfflineResult out;
  out.plan.paths.resize(n);
  auto record = [&] {
    for (int i = 0; i < n; ++i) out.plan.paths[i].push_back(conf.agent(i).v);
  };
  record();
  if (observer) observer(0, conf);

  // Termination bound on timesteps; exceeding it means a bug.
  const long long cap = 2LL * n * static_cast<long long>(inst.graph().size()) + 1;
  std::vector<char> processed(n), on_stack(n);
  std::vector<int> stack;
  for (int t = 0; !conf.all_at_goal(); ++t) {
    if (t > cap) throw ContractError("offline planner exceeded its termination bound");
    std::fill(processed.begin(), processed.end(), 0);
    std::fill(on_stack.begin(), on_stack.end(), 0);
    for (int root = 0; root < n; ++root) {
      if (processed[root]) continue;
      stack.assign(1, root);
      on_stack[root] = 1;
      while (!stack.empty()) {
        const int a = stack.back();
        if (!conf.at_goal(a)) {
          const int b = conf.occupant(conf.next_node(a));
          if (b >= 0 && !conf.at_goal(b) && !processed[b] && !on_stack[b]) {
            stack.push_back(b);
            on_stack[b] = 1;
            continue;
          }
        }
        StepEffect e = step_agent(conf, a);
        if (e.kind == EventKind::swap || e.kind == EventKind::rotate) out.events.push_back({t, a, std::move(e)});
        processed[a] = 1;
        on_stack[a] = 0;
        stack.pop_back();
      }
    }
    record();
    if (observer) observer(t + 1, conf);
  }
  truncate_to_first_cover(inst, out.plan);
  return out;
}

/// Activation order generator for the online engine.
class ExecutionSchedule {
 public:
  enum class Kind { round_robin, random_fair, delayed };

  static ExecutionSchedule round_robin(int n_agents) { return ExecutionSchedule(Kind::round_robin, n_agents, 0, 1, 0); }

  static ExecutionSchedule random_fair(int n_agents, std::uint64_t seed) {
    return ExecutionSchedule(Kind::random_fair, n_agents, 0, 1, seed);
  }

  /// `agent` acts once per `factor` blocks; everyone else once per block.
  static ExecutionSchedule delayed(int n_agents, int agent, int factor) {
    if (factor < 1) throw InputError("slowdown factor must be at least 1");
    if (agent < 0 || agent >= n_agents) throw InputError("delayed agent out of range");
    return ExecutionSchedule(Kind::delayed, n_agents, agent, factor, 0);
  }

  Kind kind() const noexcept { return kind_; }
  int num_agents() const noexcept { return n_; }

  /// Every agent appears within any window of this many consecutive activations.
  std::size_t fairness_window() const noexcept { return static_cast<std::size_t>(n_) * factor_; }

  int next() {
    while (pos_ == block_.size()) refill();
    return block_[pos_++];
  }

  std::vector<int> prefix(std::size_t k) {
    std::vector<int> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(next());
    return out;
  }

 private:
  ExecutionSchedule(Kind kind, int n, int slow, int factor, std::uint64_t seed)
      : kind_(kind), n_(n), slow_(slow), factor_(factor), rng_(seed) {
    if (n < 1) throw InputError("schedule needs at least one agent");
  }

  void refill() {
    block_.clear();
    pos_ = 0;
    for (int i = 0; i < n_; ++i) {
      if (kind_ == Kind::delayed && i == slow_ && block_index_ % factor_ != 0) continue;
      block_.push_back(i);
    }
    if (kind_ == Kind::random_fair) std::shuffle(block_.begin(), block_.end(), rng_);
    ++block_index_;
  }

  Kind kind_;
  int n_;
  int slow_;
  int factor_;
  std::mt19937_64 rng_;
  std::vector<int> block_;
  std::size_t pos_ = 0;
  long long block_index_ = 0;
};

/// Parse "round_robin", "random_fair" or "delayed:AGENT:FACTOR".
inline ExecutionSchedule make_schedule(const std::string& spec, int n_agents, std::uint64_t seed) {
  if (spec == "round_robin") return ExecutionSchedule::round_robin(n_agents);
  if (spec == "random_fair") return ExecutionSchedule::random_fair(n_agents, seed);
  if (spec.rfind("delayed:", 0) == 0) {
    const auto rest = spec.substr(8);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw InputError("expected delayed:AGENT:FACTOR");
    try {
      std::size_t used = 0;
      const int agent = std::stoi(rest.substr(0, colon), &used);
      if (used != colon) throw InputError("bad delayed agent");
      const auto f = rest.substr(colon + 1);
      const int factor = std::stoi(f, &used);
      if (used != f.size()) throw InputError("bad delayed factor");
      return ExecutionSchedule::delayed(n_agents, agent, factor);
    } catch (const std::logic_error&) {
      throw InputError("expected delayed:AGENT:FACTOR, got " + spec);
    }
  }
  throw InputError("unknown schedule " + spec);
}

struct TraceEntry {
  std::size_t activation = 0;
  int agent = 0;
  StepEffect effect;
};

struct ExecutionTrace {
  std::vector<TraceEntry> entries;
  bool terminal = false;  // all targets occupied at the end
  std::vector<Node> final_locations;

  std::size_t activations() const noexcept { return entries.size(); }

  int sum_of_moves() const {
    int s = 0;
    for (const auto& e : entries) s += e.effect.moved() ? 1 : 0;
    return s;
  }

  int maximum_moves(std::size_t n_agents) const {
    std::vector<int> per(n_agents, 0);
    for (const auto& e : entries) per[e.agent] += e.effect.moved() ? 1 : 0;
    return per.empty() ? 0 : *std::max_element(per.begin(), per.end());
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "activation,agent,from,to,event,partners\n";
    for (const auto& e : entries) {
      os << e.activation << ',' << e.agent << ',' << e.effect.from << ',' << e.effect.to << ','
         << to_string(e.effect.kind) << ',';
      for (std::size_t k = 0; k < e.effect.partners.size(); ++k) os << (k ? " " : "") << e.effect.partners[k];
      os << '\n';
    }
    return os.str();
  }
};

class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(ExecutionTrace trace)
      : std::runtime_error("activation budget exhausted before all targets were occupied"),
        trace_(std::move(trace)) {}

  const ExecutionTrace& trace() const noexcept { return trace_; }

 private:
  ExecutionTrace trace_;
};

/// Online planner: activate one agent at a time in schedule order until
/// every target is occupied.
inline ExecutionTrace solve_online(const Instance& inst, const Assignment& assignment, ExecutionSchedule schedule,
                                   std::size_t activation_budget) {
  if (static_cast<std::size_t>(schedule.num_agents()) != inst.num_agents()) {
    throw ContractError("schedule agent count does not match instance");
  }
  Configuration conf(inst, assignment);
  ExecutionTrace trace;
  while (!conf.targets_covered()) {
    if (trace.entries.size() >= activation_budget) {
      trace.final_locations = conf.locations();
      throw BudgetExhausted(std::move(trace));
    }
    const int a = schedule.next();
    trace.entries.push_back({trace.entries.size(), a, step_agent(conf, a)});
  }
  trace.terminal = true;
  trace.final_locations = conf.locations();
  return trace;
}

}  // namespace tswap
