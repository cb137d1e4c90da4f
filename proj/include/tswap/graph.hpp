#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "tswap/errors.hpp"

namespace tswap {

using Node = std::int32_t;
inline constexpr Node kNoNode = -1;

struct Cell {
  int x = 0;  // column
  int y = 0;  // row
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Undirected, connected, simple graph with dense node ids 0..size()-1.
///
/// Grid graphs additionally carry cell coordinates; their node ids follow the
/// row-major order of passable cells, so "smallest id" means "first in
/// row-major order".
class Graph {
 public:
  Graph() = default;

  static Graph from_adjacency(std::vector<std::vector<Node>> adjacency) {
    Graph g;
    g.adj_ = std::move(adjacency);
    g.validate();
    return g;
  }

  /// 4-connected grid over the passable cells of a width x height mask
  /// (row-major). The passable cells must form one connected component.
  static Graph from_grid(int width, int height, const std::vector<bool>& passable) {
    if (width <= 0 || height <= 0 ||
        passable.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw InputError("grid mask does not match its dimensions");
    }
    Graph g;
    g.width_ = width;
    g.height_ = height;
    g.cell_to_node_.assign(passable.size(), kNoNode);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const auto idx = static_cast<std::size_t>(y) * width + x;
        if (!passable[idx]) continue;
        g.cell_to_node_[idx] = static_cast<Node>(g.cells_.size());
        g.cells_.push_back({x, y});
      }
    }
    g.adj_.resize(g.cells_.size());
    for (Node v = 0; v < static_cast<Node>(g.cells_.size()); ++v) {
      const auto [x, y] = g.cells_[v];
      // neighbor order: up, left, right, down (ascending node id)
      const int dx[] = {0, -1, 1, 0};
      const int dy[] = {-1, 0, 0, 1};
      for (int k = 0; k < 4; ++k) {
        if (auto u = g.node_at(x + dx[k], y + dy[k])) g.adj_[v].push_back(*u);
      }
    }
    g.validate();
    return g;
  }

  std::size_t size() const noexcept { return adj_.size(); }

  std::size_t num_edges() const noexcept {
    std::size_t deg = 0;
    for (const auto& a : adj_) deg += a.size();
    return deg / 2;
  }

  bool contains(Node v) const noexcept { return v >= 0 && static_cast<std::size_t>(v) < adj_.size(); }

  void check(Node v) const {
    if (!contains(v)) throw InputError("unknown node id " + std::to_string(v));
  }

  std::span<const Node> neighbors(Node v) const { return adj_[v]; }

  bool adjacent(Node u, Node v) const {
    const auto& a = adj_[u];
    return std::find(a.begin(), a.end(), v) != a.end();
  }

  bool is_grid() const noexcept { return width_ > 0; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  Cell cell(Node v) const { return cells_.at(v); }

  std::optional<Node> node_at(int x, int y) const {
    if (!is_grid() || x < 0 || y < 0 || x >= width_ || y >= height_) return std::nullopt;
    const Node v = cell_to_node_[static_cast<std::size_t>(y) * width_ + x];
    if (v == kNoNode) return std::nullopt;
    return v;
  }

 private:
  void validate() const {
    if (adj_.empty()) throw InputError("graph has no nodes");
    const auto n = static_cast<Node>(adj_.size());
    for (Node v = 0; v < n; ++v) {
      auto sorted = adj_[v];
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InputError("duplicate edge at node " + std::to_string(v));
      }
      for (Node u : adj_[v]) {
        if (u < 0 || u >= n) throw InputError("edge to unknown node " + std::to_string(u));
        if (u == v) throw InputError("self-loop at node " + std::to_string(v));
        if (!adjacent(u, v)) {
          throw InputError("edge " + std::to_string(v) + "-" + std::to_string(u) + " is not symmetric");
        }
      }
    }
    std::vector<bool> seen(adj_.size(), false);
    std::vector<Node> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const Node v = stack.back();
      stack.pop_back();
      for (Node u : adj_[v]) {
        if (!seen[u]) {
          seen[u] = true;
          ++count;
          stack.push_back(u);
        }
      }
    }
    if (count != adj_.size()) throw InputError("graph is not connected");
  }

  std::vector<std::vector<Node>> adj_;
  int width_ = 0;
  int height_ = 0;
  std::vector<Cell> cells_;
  std::vector<Node> cell_to_node_;
};

/// Admissible estimate of dist(u, v): Manhattan distance on grids, 0 otherwise.
inline int heuristic(const Graph& g, Node u, Node v) {
  g.check(u);
  g.check(v);
  if (!g.is_grid()) return 0;
  const Cell a = g.cell(u);
  const Cell b = g.cell(v);
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

/// Breadth-first search from one root that can be paused and resumed.
///
/// A node's distance is known once it has been discovered; all nodes at
/// distance d are discovered when every node at distance d-1 has been
/// expanded. Resuming never changes an already reported distance.
class LazyBfs {
 public:
  LazyBfs(const Graph& g, Node root) : graph_(&g), root_(root), dist_(g.size(), -1) {
    dist_[root] = 0;
    order_.push_back(root);
  }

  Node root() const noexcept { return root_; }

  /// Number of nodes expanded (popped and scanned) so far.
  std::size_t expanded() const noexcept { return head_; }

  bool complete() const noexcept { return head_ == order_.size(); }

  /// Distance to u, resuming the search only until u is discovered.
  int distance_to(Node u) {
    while (dist_[u] < 0) {
      if (complete()) throw ContractError("node unreachable from BFS root");
      expand_one();
    }
    return dist_[u];
  }

  /// Known distance or -1 when not discovered yet.
  int known(Node u) const { return dist_[u]; }

  void run_to_completion() {
    while (!complete()) expand_one();
  }

  /// Expand until every node with distance <= level has been discovered.
  /// Returns false when no node lies at that level (the search is exhausted).
  bool ensure_level(int level) {
    while (!complete() && dist_[order_[head_]] < level) expand_one();
    return !order_.empty() && dist_[order_.back()] >= level;
  }

  /// Nodes at exactly `level`, in discovery order. Requires ensure_level(level).
  std::span<const Node> level_nodes(int level) const {
    auto by_dist = [this](Node v, int d) { return dist_[v] < d; };
    auto lo = std::lower_bound(order_.begin(), order_.end(), level, by_dist);
    auto hi = std::lower_bound(lo, order_.end(), level + 1, by_dist);
    return {lo, hi};
  }

 private:
  void expand_one() {
    const Node v = order_[head_++];
    for (Node u : graph_->neighbors(v)) {
      if (dist_[u] < 0) {
        dist_[u] = dist_[v] + 1;
        order_.push_back(u);
      }
    }
  }

  const Graph* graph_;
  Node root_;
  std::vector<int> dist_;
  std::vector<Node> order_;  // discovery order, nondecreasing in distance
  std::size_t head_ = 0;
};

/// Memoizing shortest-path oracle. One BFS tree is kept per root node (the
/// second argument of every query), so many sources against few roots share
/// one search. Single-writer: confine an instance to one solver run.
class DistanceOracle {
 public:
  explicit DistanceOracle(const Graph& g) : graph_(&g), trees_(g.size()) {}

  const Graph& graph() const noexcept { return *graph_; }

  /// Exact hop count from u to root; completes the BFS from root on first use.
  int dist(Node u, Node root) {
    graph_->check(u);
    auto& t = tree(root);
    const auto before = t.expanded();
    t.run_to_completion();
    expansions_ += t.expanded() - before;
    return t.known(u);
  }

  /// Same value as dist(), but the BFS from root is only resumed until u is reached.
  int dist_lazy(Node u, Node root) {
    graph_->check(u);
    auto& t = tree(root);
    const auto before = t.expanded();
    const int d = t.distance_to(u);
    expansions_ += t.expanded() - before;
    return d;
  }

  /// Member of N(u) ∪ {u} closest to w; ties go to the smallest node id.
  Node next_node(Node u, Node w) {
    Node best = u;
    int best_d = dist_lazy(u, w);
    if (best_d == 0) return u;
    for (Node v : graph_->neighbors(u)) {
      const int d = dist_lazy(v, w);
      if (d < best_d || (d == best_d && v < best)) {
        best = v;
        best_d = d;
      }
    }
    return best;
  }

  LazyBfs& tree(Node root) {
    graph_->check(root);
    auto& slot = trees_[root];
    if (!slot) slot = std::make_unique<LazyBfs>(*graph_, root);
    return *slot;
  }

  /// Ensure level `level` of root's tree is discovered, counting expansions.
  bool ensure_level(Node root, int level) {
    auto& t = tree(root);
    const auto before = t.expanded();
    const bool ok = t.ensure_level(level);
    expansions_ += t.expanded() - before;
    return ok;
  }

  void run_to_completion(Node root) {
    auto& t = tree(root);
    const auto before = t.expanded();
    t.run_to_completion();
    expansions_ += t.expanded() - before;
  }

  /// Total BFS node expansions performed by this oracle.
  std::size_t expansions() const noexcept { return expansions_; }

 private:
  const Graph* graph_;
  std::vector<std::unique_ptr<LazyBfs>> trees_;
  std::size_t expansions_ = 0;
};

}  // namespace tswap
