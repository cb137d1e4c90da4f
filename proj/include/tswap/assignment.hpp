#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tswap/errors.hpp"
#include "tswap/graph.hpp"
#include "tswap/instance.hpp"
#include "tswap/matching_flow.hpp"

namespace tswap {

/// Agent i heads for goals[i]: a target, or a parking node for surplus agents.
struct Assignment {
  std::vector<Node> goals;
  int bottleneck_cost = 0;     // max start->target distance over target pairs
  long long total_cost = 0;    // sum of start->target distances over target pairs
  std::size_t expansions = 0;  // BFS node expansions spent computing distances

  std::vector<std::pair<Node, Node>> pairs(const Instance& inst) const {
    std::vector<std::pair<Node, Node>> out;
    for (std::size_t i = 0; i < goals.size(); ++i) out.emplace_back(inst.starts()[i], goals[i]);
    return out;
  }
};

enum class Objective { makespan, sum_of_costs };

enum class AssignAlgorithm { bottleneck, bottleneck_min_cost, greedy_makespan, greedy_sum_of_costs, naive_greedy, linear };

inline std::optional<AssignAlgorithm> parse_assign_algorithm(const std::string& name) {
  if (name == "alg2") return AssignAlgorithm::bottleneck;
  if (name == "alg2dagger") return AssignAlgorithm::bottleneck_min_cost;
  if (name == "alg3") return AssignAlgorithm::greedy_makespan;
  if (name == "alg5") return AssignAlgorithm::greedy_sum_of_costs;
  if (name == "naive") return AssignAlgorithm::naive_greedy;
  if (name == "linear") return AssignAlgorithm::linear;
  return std::nullopt;
}

inline std::string to_string(AssignAlgorithm a) {
  switch (a) {
    case AssignAlgorithm::bottleneck: return "alg2";
    case AssignAlgorithm::bottleneck_min_cost: return "alg2dagger";
    case AssignAlgorithm::greedy_makespan: return "alg3";
    case AssignAlgorithm::greedy_sum_of_costs: return "alg5";
    case AssignAlgorithm::naive_greedy: return "naive";
    case AssignAlgorithm::linear: return "linear";
  }
  return "?";
}

namespace detail {

inline std::vector<int> target_index(const Instance& inst) {
  std::vector<int> idx(inst.graph().size(), -1);
  for (std::size_t k = 0; k < inst.targets().size(); ++k) idx[inst.targets()[k]] = static_cast<int>(k);
  return idx;
}

/// Fill bottleneck/total cost from per-agent distances of target pairs.
template <class Dist>
void summarize(const Instance& inst, Assignment& a, Dist&& dist) {
  const auto idx = target_index(inst);
  a.bottleneck_cost = 0;
  a.total_cost = 0;
  for (std::size_t i = 0; i < a.goals.size(); ++i) {
    if (a.goals[i] == kNoNode || idx[a.goals[i]] < 0) continue;
    const int d = dist(i, a.goals[i]);
    a.bottleneck_cost = std::max(a.bottleneck_cost, d);
    a.total_cost += d;
  }
}

}  // namespace detail

/// Give every agent without a target a distinct non-target node: its own
/// start when that is not a target, otherwise the nearest free non-target
/// node (smallest id among equally near ones).
inline Assignment park_surplus_agents(const Instance& inst, Assignment partial) {
  const auto& g = inst.graph();
  if (partial.goals.size() != inst.num_agents()) throw ContractError("assignment size does not match agents");
  const auto is_target = inst.target_mask();
  std::vector<bool> covered(g.size(), false);
  std::vector<bool> claimed(g.size(), false);
  for (Node v : partial.goals) {
    if (v == kNoNode) continue;
    if (claimed[v]) throw ContractError("assignment reuses a goal node");
    claimed[v] = true;
    if (is_target[v]) covered[v] = true;
  }
  for (Node t : inst.targets()) {
    if (!covered[t]) throw ContractError("partial assignment does not cover every target");
  }
  std::vector<std::size_t> waiting;
  for (std::size_t i = 0; i < partial.goals.size(); ++i) {
    if (partial.goals[i] != kNoNode) continue;
    const Node s = inst.starts()[i];
    if (!is_target[s] && !claimed[s]) {
      partial.goals[i] = s;
      claimed[s] = true;
    } else {
      waiting.push_back(i);
    }
  }
  for (std::size_t i : waiting) {
    LazyBfs bfs(g, inst.starts()[i]);
    for (int level = 0; partial.goals[i] == kNoNode; ++level) {
      if (!bfs.ensure_level(level)) throw CapacityError("not enough non-target nodes to park surplus agents");
      auto nodes = bfs.level_nodes(level);
      std::vector<Node> sorted(nodes.begin(), nodes.end());
      std::sort(sorted.begin(), sorted.end());
      for (Node v : sorted) {
        if (!is_target[v] && !claimed[v]) {
          partial.goals[i] = v;
          claimed[v] = true;
          break;
        }
      }
    }
  }
  return partial;
}

/// Bottleneck assignment: insert start-target pairs in increasing distance
/// order and grow a bipartite matching until every target is matched.
///
/// With `with_min_cost`, every pair tied with the bottleneck distance is also
/// inserted and the final matching minimizes total distance among matchings
/// that use only pairs no longer than the bottleneck. With `lazy`, pairs enter
/// the queue keyed by the heuristic and real distances are computed (by
/// resumable BFS from the target) only when such an entry reaches the front.
inline Assignment assign_bottleneck(const Instance& inst, bool with_min_cost, bool lazy = true) {
  const auto& g = inst.graph();
  const auto& S = inst.starts();
  const auto& T = inst.targets();
  const int n = static_cast<int>(S.size()), m = static_cast<int>(T.size());
  DistanceOracle oracle(g);

  struct Entry {
    int key, s, t, d;  // d < 0: real distance not evaluated yet
    bool operator>(const Entry& o) const {
      return std::tie(key, s, t, d) > std::tie(o.key, o.s, o.t, o.d);
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < m; ++t) {
      if (lazy) {
        queue.push({heuristic(g, S[s], T[t]), s, t, -1});
      } else {
        const int d = oracle.dist(S[s], T[t]);
        queue.push({d, s, t, d});
      }
    }
  }

  BipartiteGraph bg(n, m);
  Matching matching(n, m);
  int bottleneck = 0;
  while (matching.size() < m && !queue.empty()) {
    Entry e = queue.top();
    queue.pop();
    if (e.d < 0) {
      e.d = e.key = oracle.dist_lazy(S[e.s], T[e.t]);
      queue.push(e);
      continue;
    }
    bg.add_edge(e.s, e.t, e.d);
    augment_with_edge(bg, matching, e.s, e.t);
    bottleneck = e.d;
  }
  if (matching.size() < m) throw InfeasibleError("targets cannot all be matched");

  if (with_min_cost) {
    while (!queue.empty() && queue.top().key <= bottleneck) {
      Entry e = queue.top();
      queue.pop();
      if (e.d < 0) {
        e.d = e.key = oracle.dist_lazy(S[e.s], T[e.t]);
        queue.push(e);
        continue;
      }
      bg.add_edge(e.s, e.t, e.d);
    }
    matching = min_cost_max_matching(bg);
  }

  Assignment a;
  a.goals.assign(n, kNoNode);
  for (auto [s, t] : matching.pairs()) a.goals[s] = T[t];
  detail::summarize(inst, a, [&](std::size_t i, Node goal) { return oracle.dist_lazy(S[i], goal); });
  a.expansions = oracle.expansions();
  return park_surplus_agents(inst, std::move(a));
}

/// Greedy assignment followed by pairwise target-swap refinement.
///
/// Each agent walks its own BFS layers to the nearest target it has not tried
/// yet and takes it when free or when strictly closer than the current
/// holder, who is then re-queued. Refinement swaps goals between two agents
/// while that strictly improves the chosen objective; a Manhattan pre-check
/// skips swaps that cannot help. With `lazy`, BFS trees rooted at starts are
/// grown only as far as the queries need; otherwise they are completed up front.
inline Assignment assign_greedy_refined(const Instance& inst, Objective objective, bool lazy = true) {
  const auto& g = inst.graph();
  const auto& S = inst.starts();
  const int n = static_cast<int>(S.size());
  const auto tidx = detail::target_index(inst);
  DistanceOracle oracle(g);  // trees rooted at starts
  if (!lazy) {
    for (Node s : S) oracle.run_to_completion(s);
  }
  auto dist = [&](int agent, Node goal) { return oracle.dist_lazy(goal, S[agent]); };

  struct Cursor {
    int level = -1;
    std::vector<Node> buffer;
    std::size_t pos = 0;
  };
  std::vector<Cursor> cursor(n);
  // Next untried target of `agent` in (distance, node id) order.
  auto next_target = [&](int agent) -> std::optional<std::pair<Node, int>> {
    auto& c = cursor[agent];
    while (c.pos == c.buffer.size()) {
      ++c.level;
      if (!oracle.ensure_level(S[agent], c.level)) return std::nullopt;
      c.buffer.clear();
      c.pos = 0;
      for (Node v : oracle.tree(S[agent]).level_nodes(c.level)) {
        if (tidx[v] >= 0) c.buffer.push_back(v);
      }
      std::sort(c.buffer.begin(), c.buffer.end());
    }
    return std::pair{c.buffer[c.pos++], c.level};
  };

  std::vector<Node> goal(n, kNoNode);
  std::vector<int> cost(n, 0);
  std::vector<int> holder(g.size(), -1);
  std::deque<int> unassigned;
  for (int i = 0; i < n; ++i) unassigned.push_back(i);
  while (!unassigned.empty()) {
    const int i = unassigned.front();
    unassigned.pop_front();
    while (auto next = next_target(i)) {
      const auto [t, d] = *next;
      const int j = holder[t];
      if (j < 0) {
        holder[t] = i;
        goal[i] = t;
        cost[i] = d;
        break;
      }
      if (d < cost[j]) {
        holder[t] = i;
        goal[i] = t;
        cost[i] = d;
        goal[j] = kNoNode;
        unassigned.push_back(j);
        break;
      }
    }
  }

  auto h = [&](int agent, Node target) { return heuristic(g, S[agent], target); };
  auto try_pair = [&](int i, int j) -> bool {
    const Node gi = goal[i], gj = goal[j];
    if (gj == kNoNode) {
      // hand i's target to a spare agent j
      if (h(j, gi) >= cost[i]) return false;
      const int c = dist(j, gi);
      if (c >= cost[i]) return false;
      goal[j] = gi;
      cost[j] = c;
      goal[i] = kNoNode;
      cost[i] = 0;
      return true;
    }
    int c_now, c_swap;
    if (objective == Objective::makespan) {
      c_now = cost[i];
      if (h(j, gi) >= c_now) return false;
      c_swap = std::max(dist(j, gi), dist(i, gj));
    } else {
      c_now = cost[i] + cost[j];
      if (h(j, gi) + h(i, gj) >= c_now) return false;
      c_swap = dist(j, gi) + dist(i, gj);
    }
    if (c_swap >= c_now) return false;
    std::swap(goal[i], goal[j]);
    cost[i] = dist(i, goal[i]);
    cost[j] = dist(j, goal[j]);
    return true;
  };

  if (objective == Objective::makespan) {
    for (bool updated = true; updated;) {
      updated = false;
      int i = -1;
      for (int k = 0; k < n; ++k) {
        if (goal[k] != kNoNode && (i < 0 || cost[k] > cost[i])) i = k;
      }
      if (i < 0) break;
      for (int j = 0; j < n && !updated; ++j) {
        if (j != i) updated = try_pair(i, j);
      }
    }
  } else {
    for (bool updated = true; updated;) {
      updated = false;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n && goal[i] != kNoNode; ++j) {
          if (j != i && try_pair(i, j)) updated = true;
        }
      }
    }
  }

  Assignment a;
  a.goals = goal;
  detail::summarize(inst, a, [&](std::size_t i, Node t) { return dist(static_cast<int>(i), t); });
  a.expansions = oracle.expansions();
  return park_surplus_agents(inst, std::move(a));
}

/// Baseline: sort all start-target pairs by distance and accept each pair
/// whose start and target are both still free.
inline Assignment assign_naive_greedy(const Instance& inst) {
  const auto& S = inst.starts();
  const auto& T = inst.targets();
  DistanceOracle oracle(inst.graph());
  std::vector<std::tuple<int, int, int>> pairs;
  pairs.reserve(S.size() * T.size());
  for (int s = 0; s < static_cast<int>(S.size()); ++s) {
    for (int t = 0; t < static_cast<int>(T.size()); ++t) pairs.emplace_back(oracle.dist(S[s], T[t]), s, t);
  }
  std::sort(pairs.begin(), pairs.end());
  Assignment a;
  a.goals.assign(S.size(), kNoNode);
  std::vector<bool> taken(T.size(), false);
  std::size_t accepted = 0;
  for (auto [d, s, t] : pairs) {
    if (accepted == T.size()) break;
    if (a.goals[s] != kNoNode || taken[t]) continue;
    a.goals[s] = T[t];
    taken[t] = true;
    ++accepted;
  }
  detail::summarize(inst, a, [&](std::size_t i, Node goal) { return oracle.dist(S[i], goal); });
  a.expansions = oracle.expansions();
  return park_surplus_agents(inst, std::move(a));
}

/// Minimum total distance assignment over all start-target pairs.
inline Assignment assign_optimal_linear(const Instance& inst) {
  const auto& S = inst.starts();
  const auto& T = inst.targets();
  DistanceOracle oracle(inst.graph());
  BipartiteGraph bg(static_cast<int>(S.size()), static_cast<int>(T.size()));
  for (int s = 0; s < static_cast<int>(S.size()); ++s) {
    for (int t = 0; t < static_cast<int>(T.size()); ++t) bg.add_edge(s, t, oracle.dist(S[s], T[t]));
  }
  const Matching m = min_cost_max_matching(bg);
  Assignment a;
  a.goals.assign(S.size(), kNoNode);
  for (auto [s, t] : m.pairs()) a.goals[s] = T[t];
  detail::summarize(inst, a, [&](std::size_t i, Node goal) { return oracle.dist(S[i], goal); });
  a.expansions = oracle.expansions();
  return park_surplus_agents(inst, std::move(a));
}

inline Assignment assign(const Instance& inst, AssignAlgorithm algorithm, bool lazy = true) {
  switch (algorithm) {
    case AssignAlgorithm::bottleneck: return assign_bottleneck(inst, false, lazy);
    case AssignAlgorithm::bottleneck_min_cost: return assign_bottleneck(inst, true, lazy);
    case AssignAlgorithm::greedy_makespan: return assign_greedy_refined(inst, Objective::makespan, lazy);
    case AssignAlgorithm::greedy_sum_of_costs: return assign_greedy_refined(inst, Objective::sum_of_costs, lazy);
    case AssignAlgorithm::naive_greedy: return assign_naive_greedy(inst);
    case AssignAlgorithm::linear: return assign_optimal_linear(inst);
  }
  throw InputError("unknown assignment algorithm");
}

}  // namespace tswap
