#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tswap/assignment.hpp"
#include "tswap/errors.hpp"
#include "tswap/graph.hpp"
#include "tswap/instance.hpp"
#include "tswap/matching_flow.hpp"

namespace tswap {

/// lambda[v]: hop distance from v to the nearest target.
struct PruneTable {
  std::vector<int> lambda;

  int operator()(Node v) const { return lambda[v]; }
};

inline PruneTable compute_prune_table(const Instance& inst) {
  const auto& g = inst.graph();
  PruneTable p;
  p.lambda.assign(g.size(), -1);
  std::queue<Node> q;
  for (Node t : inst.targets()) {
    p.lambda[t] = 0;
    q.push(t);
  }
  while (!q.empty()) {
    const Node v = q.front();
    q.pop();
    for (Node u : g.neighbors(v)) {
      if (p.lambda[u] < 0) {
        p.lambda[u] = p.lambda[v] + 1;
        q.push(u);
      }
    }
  }
  return p;
}

/// Layered flow network whose integral |A|-unit flows are plans of makespan
/// `horizon` without vertex conflicts (swap conflicts are allowed and removed
/// afterwards). Each layer t has an in/out vertex per node; a unit entering
/// in(t, u) and leaving out(t, v) is an agent at u at time t and at v at t+1.
///
/// Vertex 0 is the source and 1 the sink. With more agents than targets a
/// parking vertex collects agents that end on non-target nodes.
class TimeExpandedNetwork {
 public:
  static constexpr int kSource = 0;
  static constexpr int kSink = 1;

  TimeExpandedNetwork(const Instance& inst, int horizon)
      : inst_(&inst), horizon_(horizon), n_nodes_(static_cast<int>(inst.graph().size())) {
    if (horizon < 1) throw ContractError("network horizon must be at least 1");
    const auto& g = inst.graph();
    const bool surplus = inst.num_agents() > inst.num_targets();
    base_ = surplus ? 3 : 2;
    park_ = surplus ? 2 : -1;
    net_ = FlowNetwork(base_ + 2 * horizon * n_nodes_);
    for (int t = 0; t < horizon; ++t) {
      for (Node v = 0; v < n_nodes_; ++v) {
        net_.add_arc(in(t, v), out(t, v));
        for (Node u : g.neighbors(v)) net_.add_arc(in(t, v), out(t, u));
      }
      if (t + 1 < horizon) {
        for (Node v = 0; v < n_nodes_; ++v) net_.add_arc(out(t, v), in(t + 1, v));
      }
    }
    for (Node s : inst.starts()) source_arcs_.push_back(net_.add_arc(kSource, in(0, s)));
    const auto is_target = inst.target_mask();
    for (Node t : inst.targets()) net_.add_arc(out(horizon - 1, t), kSink);
    if (surplus) {
      for (Node v = 0; v < n_nodes_; ++v) {
        if (!is_target[v]) net_.add_arc(out(horizon - 1, v), park_);
      }
      net_.add_arc(park_, kSink, static_cast<int>(inst.num_agents() - inst.num_targets()));
    }
  }

  const Instance& instance() const noexcept { return *inst_; }
  int horizon() const noexcept { return horizon_; }
  bool has_park() const noexcept { return park_ >= 0; }
  int park() const noexcept { return park_; }
  FlowNetwork& net() noexcept { return net_; }
  const FlowNetwork& net() const noexcept { return net_; }

  int in(int t, Node v) const { return base_ + 2 * (t * n_nodes_ + v); }
  int out(int t, Node v) const { return in(t, v) + 1; }

  bool is_layer_vertex(int id) const { return id >= base_; }
  bool is_out(int id) const { return ((id - base_) & 1) == 1; }
  int layer(int id) const { return (id - base_) / 2 / n_nodes_; }
  Node node(int id) const { return static_cast<Node>((id - base_) / 2 % n_nodes_); }

  int flow_value() const { return net_.outflow(kSource); }

  /// Unit flow decomposed into one node sequence per agent (in start order),
  /// each of length horizon + 1; agents carrying no flow get nothing.
  std::vector<std::optional<std::vector<Node>>> decompose() const {
    std::vector<std::optional<std::vector<Node>>> paths;
    for (std::size_t i = 0; i < source_arcs_.size(); ++i) {
      if (net_.flow(source_arcs_[i]) != 1) {
        paths.emplace_back();
        continue;
      }
      std::vector<Node> path{inst_->starts()[i]};
      int v = net_.arc(source_arcs_[i]).to;  // in(0, s_i)
      for (int t = 0; t < horizon_; ++t) {
        const int o = follow(v);
        path.push_back(node(o));
        if (t + 1 < horizon_) v = follow(o);
      }
      paths.emplace_back(std::move(path));
    }
    return paths;
  }

  /// decompose() for a flow of value |A|.
  std::vector<std::vector<Node>> agent_paths() const {
    std::vector<std::vector<Node>> out;
    for (auto& p : decompose()) {
      if (!p) throw ContractError("agent carries no flow");
      out.push_back(std::move(*p));
    }
    return out;
  }

  /// Push one unit along the given node sequence (length <= horizon + 1,
  /// padded by waiting at its last node).
  void push_path(std::size_t agent, const std::vector<Node>& path) {
    if (path.empty() || path.front() != inst_->starts()[agent]) throw ContractError("path does not start at start");
    net_.push(source_arcs_[agent]);
    auto at = [&](int t) { return path[std::min<std::size_t>(t, path.size() - 1)]; };
    for (int t = 0; t < horizon_; ++t) {
      push_between(in(t, at(t)), out(t, at(t + 1)));
      push_between(out(t, at(t + 1)), t + 1 < horizon_ ? in(t + 1, at(t + 1)) : end_vertex(at(t + 1)));
    }
    if (end_vertex(at(horizon_)) == park_) push_between(park_, kSink);
  }

 private:
  int end_vertex(Node v) const { return inst_->target_mask()[v] ? kSink : park_; }

  void push_between(int u, int v) {
    const int a = net_.find_arc(u, v);
    if (a < 0 || v < 0) throw ContractError("path uses a missing arc");
    net_.push(a);
  }

  int follow(int v) const {
    for (int a : net_.out_arcs(v)) {
      if ((a & 1) == 0 && net_.flow(a) > 0) return net_.arc(a).to;
    }
    throw ContractError("flow path breaks off");
  }

  const Instance* inst_;
  int horizon_;
  int n_nodes_;
  int base_ = 2;
  int park_ = -1;
  FlowNetwork net_;
  std::vector<int> source_arcs_;
};

inline TimeExpandedNetwork build_network(const Instance& inst, int horizon) {
  return TimeExpandedNetwork(inst, horizon);
}

/// Network and max-flow outcome for one horizon.
struct HorizonState {
  std::unique_ptr<TimeExpandedNetwork> network;
  int flow = 0;
  bool feasible = false;
  FlowStats stats;

  int horizon() const { return network ? network->horizon() : 0; }
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

/// Max flow on N(horizon). With `reuse_from` (the state for horizon - 1) the
/// previous flow is first replayed, each path extended by one wait step.
/// Pruning never enters out(t, v) when t + lambda(v) >= horizon; it is
/// skipped when agents outnumber targets since parked agents need not reach
/// a target.
inline HorizonState feasible(const Instance& inst, int horizon, bool use_prune,
                             const HorizonState* reuse_from = nullptr, const PruneTable* prune_table = nullptr,
                             Deadline deadline = std::nullopt) {
  HorizonState st;
  st.network = std::make_unique<TimeExpandedNetwork>(inst, horizon);
  auto& ten = *st.network;
  if (reuse_from) {
    if (!reuse_from->network || &reuse_from->network->instance() != &inst ||
        reuse_from->network->horizon() + 1 != horizon) {
      throw ContractError("reuse state does not belong to the previous horizon of this instance");
    }
    const auto paths = reuse_from->network->decompose();
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (paths[i]) ten.push_path(i, *paths[i]);
    }
  }
  std::optional<PruneTable> own;
  const bool prune = use_prune && inst.num_agents() == inst.num_targets();
  if (prune && !prune_table) own = compute_prune_table(inst);
  const PruneTable* table = prune ? (prune_table ? prune_table : &*own) : nullptr;
  auto skip = [&](int v) {
    return table && ten.is_layer_vertex(v) && ten.is_out(v) && ten.layer(v) + (*table)(ten.node(v)) >= horizon;
  };
  bool timed_out = false;
  auto stop = [&] {
    if (deadline && std::chrono::steady_clock::now() >= *deadline) timed_out = true;
    return timed_out || ten.flow_value() == static_cast<int>(inst.num_agents());
  };
  st.flow = max_flow(ten.net(), TimeExpandedNetwork::kSource, TimeExpandedNetwork::kSink, skip, stop, &st.stats);
  if (timed_out && st.flow < static_cast<int>(inst.num_agents())) {
    throw TimeoutError(horizon, "timed out while checking makespan " + std::to_string(horizon));
  }
  st.feasible = st.flow == static_cast<int>(inst.num_agents());
  return st;
}

/// Exchange path suffixes of agents that would traverse one edge in opposite
/// directions, so that both wait instead. The set of occupied nodes at every
/// timestep is unchanged.
inline Plan resolve_swap_conflicts(Plan plan) {
  const std::size_t n = plan.num_agents();
  const int T = plan.makespan();
  std::vector<std::pair<Node, std::size_t>> at;
  for (int t = 0; t <= T; ++t) {
    at.clear();
    for (std::size_t i = 0; i < n; ++i) at.emplace_back(plan.paths[i][t], i);
    std::sort(at.begin(), at.end());
    for (std::size_t k = 1; k < at.size(); ++k) {
      if (at[k].first == at[k - 1].first) throw ContractError("vertex conflict in raw plan");
    }
  }
  for (int t = 0; t < T; ++t) {
    at.clear();
    for (std::size_t i = 0; i < n; ++i) at.emplace_back(plan.paths[i][t], i);
    std::sort(at.begin(), at.end());
    auto who = [&](Node v) -> std::optional<std::size_t> {
      auto it = std::lower_bound(at.begin(), at.end(), std::pair<Node, std::size_t>{v, 0});
      if (it == at.end() || it->first != v) return std::nullopt;
      return it->second;
    };
    for (std::size_t i = 0; i < n; ++i) {
      const Node u = plan.paths[i][t], v = plan.paths[i][t + 1];
      if (u == v) continue;
      const auto j = who(v);
      if (!j || plan.paths[*j][t + 1] != u) continue;
      std::swap_ranges(plan.paths[i].begin() + t + 1, plan.paths[i].end(), plan.paths[*j].begin() + t + 1);
    }
  }
  return plan;
}

/// Move steps one timestep earlier wherever an agent waits and then moves
/// into a node that is already free at the earlier timestep. Final positions
/// and the makespan are unchanged; no agent finishes later.
inline Plan compact_waits(Plan plan, std::size_t num_nodes) {
  const std::size_t n = plan.num_agents();
  const int T = plan.makespan();
  if (T < 2) return plan;
  std::vector<int> occ(num_nodes * static_cast<std::size_t>(T + 1), -1);
  auto cell = [&](int t, Node v) -> int& { return occ[static_cast<std::size_t>(t) * num_nodes + v]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 0; t <= T; ++t) cell(t, plan.paths[i][t]) = static_cast<int>(i);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      auto& p = plan.paths[i];
      for (int t = 0; t + 2 <= T; ++t) {
        if (p[t] != p[t + 1] || p[t + 1] == p[t + 2] || cell(t + 1, p[t + 2]) >= 0) continue;
        // the agent now leaves p[t] one step earlier; nobody else can be there
        // at t + 1, and nobody can enter p[t + 2] from the opposite side
        cell(t + 1, p[t + 1]) = -1;
        p[t + 1] = p[t + 2];
        cell(t + 1, p[t + 1]) = static_cast<int>(i);
        changed = true;
      }
    }
  }
  return plan;
}

enum class LowerBoundMode { automatic, conservative, bottleneck };

/// Admissible makespan bound from Manhattan distances alone.
inline int conservative_lower_bound(const Instance& inst) {
  const auto& g = inst.graph();
  int lb = 0;
  if (inst.num_agents() == inst.num_targets()) {
    for (Node s : inst.starts()) {
      int best = std::numeric_limits<int>::max();
      for (Node t : inst.targets()) best = std::min(best, heuristic(g, s, t));
      lb = std::max(lb, best);
    }
  } else {
    for (Node t : inst.targets()) {
      int best = std::numeric_limits<int>::max();
      for (Node s : inst.starts()) best = std::min(best, heuristic(g, s, t));
      lb = std::max(lb, best);
    }
  }
  return lb;
}

inline int bottleneck_lower_bound(const Instance& inst) {
  return inst.num_targets() == 0 ? 0 : assign_bottleneck(inst, false, true).bottleneck_cost;
}

struct OptimalOptions {
  LowerBoundMode lower_bound = LowerBoundMode::automatic;
  bool prune = true;
  bool reuse = true;
  std::size_t conservative_above = 1000;  // automatic mode: agent count beyond which the cheap bound is used
  std::optional<std::chrono::milliseconds> timeout;
};

struct HorizonRecord {
  int horizon = 0;
  int flow = 0;
  long long augmentations = 0;
  long long pruned_expansions = 0;
};

struct OptimalResult {
  Plan plan;
  int makespan = 0;
  int lower_bound = 0;
  std::vector<HorizonRecord> horizons;

  std::string diagnostics_csv() const {
    std::ostringstream os;
    os << "T,flow,augmentations,pruned_expansions\n";
    for (const auto& h : horizons) {
      os << h.horizon << ',' << h.flow << ',' << h.augmentations << ',' << h.pruned_expansions << '\n';
    }
    return os.str();
  }
};

/// Smallest makespan with a feasible flow, searched upward from a lower bound.
inline OptimalResult solve_optimal(const Instance& inst, const OptimalOptions& opt = {}) {
  Deadline deadline;
  if (opt.timeout) deadline = std::chrono::steady_clock::now() + *opt.timeout;
  OptimalResult res;
  LowerBoundMode mode = opt.lower_bound;
  if (mode == LowerBoundMode::automatic) {
    mode = inst.num_agents() > opt.conservative_above ? LowerBoundMode::conservative : LowerBoundMode::bottleneck;
  }
  res.lower_bound = mode == LowerBoundMode::conservative ? conservative_lower_bound(inst) : bottleneck_lower_bound(inst);

  const auto is_start = [&] {
    std::vector<bool> m(inst.graph().size(), false);
    for (Node s : inst.starts()) m[s] = true;
    return m;
  }();
  if (std::all_of(inst.targets().begin(), inst.targets().end(), [&](Node t) { return is_start[t]; })) {
    for (Node s : inst.starts()) res.plan.paths.push_back({s});
    return res;
  }

  const PruneTable table = compute_prune_table(inst);
  HorizonState prev;
  for (int T = std::max(1, res.lower_bound);; ++T) {
    if (deadline && std::chrono::steady_clock::now() >= *deadline) {
      throw TimeoutError(T, "timed out before checking makespan " + std::to_string(T));
    }
    const bool chain = opt.reuse && prev.network && prev.horizon() + 1 == T;
    HorizonState st = feasible(inst, T, opt.prune, chain ? &prev : nullptr, &table, deadline);
    res.horizons.push_back({T, st.flow, st.stats.augmentations, st.stats.pruned_expansions});
    if (st.feasible) {
      res.makespan = T;
      Plan raw;
      raw.paths = st.network->agent_paths();
      res.plan = compact_waits(resolve_swap_conflicts(std::move(raw)), inst.graph().size());
      truncate_to_first_cover(inst, res.plan);
      return res;
    }
    prev = std::move(st);
  }
}

}  // namespace tswap
