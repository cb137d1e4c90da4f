#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tswap/errors.hpp"

namespace tswap {

// ---------------------------------------------------------------------------
// Bipartite matching
// ---------------------------------------------------------------------------

struct BipartiteEdge {
  int left = 0;
  int right = 0;
  long long cost = 0;
};

/// Left side: starts (agents). Right side: targets. Edges carry nonnegative costs.
class BipartiteGraph {
 public:
  BipartiteGraph(int n_left, int n_right) : n_left_(n_left), n_right_(n_right), left_adj_(n_left), right_adj_(n_right) {}

  int n_left() const noexcept { return n_left_; }
  int n_right() const noexcept { return n_right_; }

  void add_edge(int left, int right, long long cost) {
    if (left < 0 || left >= n_left_ || right < 0 || right >= n_right_) throw ContractError("edge endpoint out of range");
    if (cost < 0) throw ContractError("negative edge cost");
    if (!index_.emplace(key(left, right), static_cast<int>(edges_.size())).second) {
      throw ContractError("duplicate bipartite edge");
    }
    left_adj_[left].push_back(static_cast<int>(edges_.size()));
    right_adj_[right].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({left, right, cost});
  }

  bool has_edge(int left, int right) const { return index_.count(key(left, right)) > 0; }

  long long cost(int left, int right) const { return edges_.at(index_.at(key(left, right))).cost; }

  const std::vector<BipartiteEdge>& edges() const noexcept { return edges_; }
  const std::vector<int>& left_edges(int left) const { return left_adj_[left]; }
  const std::vector<int>& right_edges(int right) const { return right_adj_[right]; }

 private:
  static std::uint64_t key(int l, int r) { return (static_cast<std::uint64_t>(l) << 32) | static_cast<std::uint32_t>(r); }

  int n_left_, n_right_;
  std::vector<BipartiteEdge> edges_;
  std::vector<std::vector<int>> left_adj_, right_adj_;
  std::unordered_map<std::uint64_t, int> index_;
};

class Matching {
 public:
  Matching(int n_left, int n_right) : mate_left_(n_left, -1), mate_right_(n_right, -1) {}

  int size() const noexcept { return size_; }
  int mate_of_left(int l) const { return mate_left_[l]; }
  int mate_of_right(int r) const { return mate_right_[r]; }

  void match(int l, int r) {
    if (mate_left_[l] >= 0 || mate_right_[r] >= 0) throw ContractError("vertex already matched");
    mate_left_[l] = r;
    mate_right_[r] = l;
    ++size_;
  }

  void unmatch(int l) {
    const int r = mate_left_[l];
    if (r < 0) return;
    mate_left_[l] = -1;
    mate_right_[r] = -1;
    --size_;
  }

  std::vector<std::pair<int, int>> pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int l = 0; l < static_cast<int>(mate_left_.size()); ++l) {
      if (mate_left_[l] >= 0) out.emplace_back(l, mate_left_[l]);
    }
    return out;
  }

  long long cost(const BipartiteGraph& bg) const {
    long long c = 0;
    for (auto [l, r] : pairs()) c += bg.cost(l, r);
    return c;
  }

  /// Apply an augmenting path given as the pairs that become matched; every
  /// vertex on the path appears in exactly one of them.
  void flip(const std::vector<std::pair<int, int>>& new_pairs) {
    for (auto [l, r] : new_pairs) {
      unmatch(l);
      if (mate_right_[r] >= 0) unmatch(mate_right_[r]);
    }
    for (auto [l, r] : new_pairs) match(l, r);
  }

 private:
  std::vector<int> mate_left_, mate_right_;
  int size_ = 0;
};

namespace detail {

inline void check_matching(const BipartiteGraph& bg, const Matching& m) {
  for (auto [l, r] : m.pairs()) {
    if (!bg.has_edge(l, r)) throw ContractError("matched pair is not an edge of the bipartite graph");
  }
}

// Alternating DFS from left vertex `l` to any free right vertex, skipping
// right vertices already marked. Returns the pairs to flip, empty on failure.
inline bool alternate_to_free_right(const BipartiteGraph& bg, const Matching& m, int start,
                                    std::vector<char>& seen_right, std::vector<std::pair<int, int>>& out) {
  struct Frame {
    int left;
    std::size_t next;
  };
  std::vector<Frame> stack{{start, 0}};
  std::vector<int> via_right;  // right vertex chosen at each depth
  while (!stack.empty()) {
    auto& f = stack.back();
    const auto& adj = bg.left_edges(f.left);
    if (f.next == adj.size()) {
      stack.pop_back();
      if (!via_right.empty()) via_right.pop_back();
      continue;
    }
    const int r = bg.edges()[adj[f.next++]].right;
    if (seen_right[r] || m.mate_of_left(f.left) == r) continue;
    seen_right[r] = 1;
    via_right.push_back(r);
    const int owner = m.mate_of_right(r);
    if (owner < 0) {
      for (std::size_t i = 0; i < stack.size(); ++i) out.emplace_back(stack[i].left, via_right[i]);
      return true;
    }
    stack.push_back({owner, 0});
  }
  return false;
}

}  // namespace detail

/// Grow m by one augmenting path if any exists.
inline bool augment_once(const BipartiteGraph& bg, Matching& m) {
  detail::check_matching(bg, m);
  std::vector<char> seen_right(bg.n_right(), 0);
  std::vector<std::pair<int, int>> path;
  for (int l = 0; l < bg.n_left(); ++l) {
    if (m.mate_of_left(l) >= 0) continue;
    if (detail::alternate_to_free_right(bg, m, l, seen_right, path)) {
      m.flip(path);
      return true;
    }
  }
  return false;
}

/// Grow m by one after edge (left, right) has been inserted into bg, given
/// that m was maximum before the insertion: any augmenting path must then
/// use the new edge. Costs O(reachable alternating part) instead of O(E).
inline bool augment_with_edge(const BipartiteGraph& bg, Matching& m, int left, int right) {
  if (m.mate_of_left(left) == right) return false;
  // Backward half: alternating path from a free left vertex to `left`.
  std::vector<std::pair<int, int>> back;  // pairs (l, r) to flip on the left side
  if (m.mate_of_left(left) >= 0) {
    std::vector<char> seen_left(bg.n_left(), 0);
    std::vector<int> parent_left(bg.n_left(), -1);  // l -> previous left on the path towards `left`
    std::vector<int> parent_right(bg.n_left(), -1);
    std::queue<int> q;
    q.push(left);
    seen_left[left] = 1;
    int found = -1;
    while (!q.empty() && found < 0) {
      const int x = q.front();
      q.pop();
      const int rx = m.mate_of_left(x);  // x is matched: arrive through rx
      for (int e : bg.right_edges(rx)) {
        const int y = bg.edges()[e].left;
        if (seen_left[y] || y == x) continue;
        seen_left[y] = 1;
        parent_left[y] = x;
        parent_right[y] = rx;
        if (m.mate_of_left(y) < 0) {
          found = y;
          break;
        }
        q.push(y);
      }
    }
    if (found < 0) return false;
    for (int y = found; y != left; y = parent_left[y]) back.emplace_back(y, parent_right[y]);
  }
  // Forward half: from `right` to a free right vertex.
  std::vector<std::pair<int, int>> fwd{{left, right}};
  const int owner = m.mate_of_right(right);
  if (owner >= 0) {
    std::vector<char> seen_right(bg.n_right(), 0);
    seen_right[right] = 1;
    if (m.mate_of_left(left) >= 0) seen_right[m.mate_of_left(left)] = 1;
    for (auto [l, r] : back) seen_right[r] = 1;
    std::vector<std::pair<int, int>> tail;
    if (!detail::alternate_to_free_right(bg, m, owner, seen_right, tail)) return false;
    fwd.insert(fwd.end(), tail.begin(), tail.end());
  }
  fwd.insert(fwd.end(), back.begin(), back.end());
  const int before = m.size();
  m.flip(fwd);
  if (m.size() != before + 1) throw ContractError("augment_with_edge: matching was not maximum before insertion");
  return true;
}

namespace detail {

/// Successive-shortest-path min-cost flow with Dijkstra on reduced costs.
class MinCostFlow {
 public:
  explicit MinCostFlow(int n) : adj_(n) {}

  int add_arc(int u, int v, long long cap, long long cost) {
    adj_[u].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({v, cap, cost});
    adj_[v].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({u, 0, -cost});
    return static_cast<int>(arcs_.size()) - 2;
  }

  long long flow_on(int arc) const { return arcs_[arc ^ 1].cap; }

  /// Push up to `limit` units from s to t at minimum cost; returns units pushed.
  long long run(int s, int t, long long limit) {
    const int n = static_cast<int>(adj_.size());
    constexpr long long inf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> pot(n, 0), dist(n);
    std::vector<int> via(n);
    long long pushed = 0;
    while (pushed < limit) {
      std::fill(dist.begin(), dist.end(), inf);
      std::fill(via.begin(), via.end(), -1);
      using Item = std::pair<long long, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      dist[s] = 0;
      pq.push({0, s});
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d != dist[u]) continue;
        for (int a : adj_[u]) {
          const auto& arc = arcs_[a];
          if (arc.cap <= 0) continue;
          const long long nd = d + arc.cost + pot[u] - pot[arc.to];
          if (nd < dist[arc.to]) {
            dist[arc.to] = nd;
            via[arc.to] = a;
            pq.push({nd, arc.to});
          }
        }
      }
      if (dist[t] >= inf) break;
      for (int v = 0; v < n; ++v) {
        if (dist[v] < inf) pot[v] += dist[v];
      }
      for (int v = t; v != s; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].cap -= 1;
        arcs_[via[v] ^ 1].cap += 1;
      }
      ++pushed;
    }
    return pushed;
  }

 private:
  struct Arc {
    int to;
    long long cap;
    long long cost;
  };
  std::vector<std::vector<int>> adj_;
  std::vector<Arc> arcs_;
};

}  // namespace detail

/// Maximum-cardinality matching of minimum total cost.
///
/// When require_saturate_right is set (the assignment use case) and the right
/// side cannot be fully matched, throws InfeasibleError.
inline Matching min_cost_max_matching(const BipartiteGraph& bg, bool require_saturate_right = true) {
  const int nl = bg.n_left(), nr = bg.n_right();
  const int source = nl + nr, sink = nl + nr + 1;
  detail::MinCostFlow mcf(nl + nr + 2);
  for (int l = 0; l < nl; ++l) mcf.add_arc(source, l, 1, 0);
  std::vector<int> edge_arc(bg.edges().size());
  for (std::size_t i = 0; i < bg.edges().size(); ++i) {
    const auto& e = bg.edges()[i];
    edge_arc[i] = mcf.add_arc(e.left, nl + e.right, 1, e.cost);
  }
  for (int r = 0; r < nr; ++r) mcf.add_arc(nl + r, sink, 1, 0);
  const long long flow = mcf.run(source, sink, std::min(nl, nr));
  if (require_saturate_right && flow < nr) throw InfeasibleError("targets cannot all be matched");
  Matching m(nl, nr);
  for (std::size_t i = 0; i < bg.edges().size(); ++i) {
    if (mcf.flow_on(edge_arc[i]) > 0) m.match(bg.edges()[i].left, bg.edges()[i].right);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Flow networks
// ---------------------------------------------------------------------------

/// Directed network with integer capacities (unit for nearly every arc) and a
/// residual representation that keeps its flow between max_flow calls.
class FlowNetwork {
 public:
  struct Arc {
    int from;
    int to;
    int cap;       // original capacity, 0 for residual twins
    int residual;  // remaining capacity
  };

  explicit FlowNetwork(int n_vertices = 0) : adj_(n_vertices) {}

  int add_vertex() {
    adj_.emplace_back();
    return static_cast<int>(adj_.size()) - 1;
  }

  int add_arc(int u, int v, int cap = 1) {
    adj_[u].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({u, v, cap, cap});
    adj_[v].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({v, u, 0, 0});
    return static_cast<int>(arcs_.size()) - 2;
  }

  int num_vertices() const noexcept { return static_cast<int>(adj_.size()); }
  /// Number of forward arcs (residual twins excluded).
  int num_arcs() const noexcept { return static_cast<int>(arcs_.size() / 2); }

  const Arc& arc(int id) const { return arcs_[id]; }
  const std::vector<int>& out_arcs(int v) const { return adj_[v]; }
  int flow(int forward_arc) const { return arcs_[forward_arc].cap - arcs_[forward_arc].residual; }

  /// Forward arc id from u to v, or -1.
  int find_arc(int u, int v) const {
    for (int a : adj_[u]) {
      if ((a & 1) == 0 && arcs_[a].to == v) return a;
    }
    return -1;
  }

  /// Send one unit along residual arc `id`.
  void push(int id) {
    if (arcs_[id].residual <= 0) throw ContractError("push on saturated arc");
    arcs_[id].residual -= 1;
    arcs_[id ^ 1].residual += 1;
  }

  int outflow(int v) const {
    int f = 0;
    for (int a : adj_[v]) f += (a & 1) == 0 ? flow(a) : -flow(a ^ 1);
    return f;
  }

  /// Conservation at every vertex except s and t, and 0 <= flow <= cap.
  bool conserves(int s, int t) const {
    for (int a = 0; a < static_cast<int>(arcs_.size()); a += 2) {
      if (flow(a) < 0 || flow(a) > arcs_[a].cap) return false;
    }
    for (int v = 0; v < num_vertices(); ++v) {
      if (v != s && v != t && outflow(v) != 0) return false;
    }
    return true;
  }

 private:
  std::vector<std::vector<int>> adj_;
  std::vector<Arc> arcs_;
};

struct FlowStats {
  long long augmentations = 0;
  long long pruned_expansions = 0;  // vertices skipped by the prune predicate
};

/// Ford-Fulkerson with depth-first augmenting paths, continuing from the
/// network's current flow. Vertices for which `prune(v)` is true are never
/// entered. `should_stop` is polled between augmentations. Returns the total
/// flow leaving the source.
template <class Prune, class Stop>
int max_flow(FlowNetwork& net, int source, int sink, Prune&& prune, Stop&& should_stop, FlowStats* stats = nullptr) {
  if (source == sink) throw InputError("max_flow: source equals sink");
  const int n = net.num_vertices();
  std::vector<unsigned> stamp(n, 0);
  std::vector<int> via(n, -1);
  unsigned round = 0;
  struct Frame {
    int v;
    std::size_t next;
  };
  std::vector<Frame> stack;
  while (!should_stop()) {
    ++round;
    stack.clear();
    stack.push_back({source, 0});
    stamp[source] = round;
    bool found = false;
    while (!stack.empty() && !found) {
      auto& f = stack.back();
      const auto& out = net.out_arcs(f.v);
      if (f.next == out.size()) {
        stack.pop_back();
        continue;
      }
      const int a = out[f.next++];
      const auto& arc = net.arc(a);
      if (arc.residual <= 0 || stamp[arc.to] == round) continue;
      stamp[arc.to] = round;
      if (arc.to != sink && prune(arc.to)) {
        if (stats) ++stats->pruned_expansions;
        continue;
      }
      via[arc.to] = a;
      if (arc.to == sink) {
        found = true;
      } else {
        stack.push_back({arc.to, 0});
      }
    }
    if (!found) break;
    for (int v = sink; v != source; v = net.arc(via[v]).from) net.push(via[v]);
    if (stats) ++stats->augmentations;
  }
  return net.outflow(source);
}

inline int max_flow(FlowNetwork& net, int source, int sink, FlowStats* stats = nullptr) {
  return max_flow(net, source, sink, [](int) { return false; }, [] { return false; }, stats);
}

}  // namespace tswap
