#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tswap/graph.hpp"
#include "tswap/instance.hpp"

namespace fixtures {

using tswap::Graph;
using tswap::Instance;
using tswap::Node;

inline std::shared_ptr<const Graph> grid(int w, int h, const std::vector<bool>& passable = {}) {
  std::vector<bool> p = passable.empty() ? std::vector<bool>(static_cast<std::size_t>(w) * h, true) : passable;
  return std::make_shared<const Graph>(Graph::from_grid(w, h, p));
}

inline std::shared_ptr<const Graph> line(int n) { return grid(n, 1); }

// Six-node line; a1..a3 start on nodes 2,3,4 and the targets are nodes 0,4,5.
inline Instance swap_line() { return Instance(line(6), {2, 3, 4}, {0, 4, 5}); }

// The assignment used to illustrate a target swap on swap_line(): a1->0, a2->5, a3->4.
inline std::vector<Node> swap_line_goals() { return {0, 5, 4}; }

// Five-node line u,v,w,x,y = 0..4; starts v,w and targets w,y.
inline Instance flow_line() { return Instance(line(5), {1, 2}, {2, 4}); }

/// Random grid with obstacles, reduced to its largest component.
inline std::shared_ptr<const Graph> random_grid(int w, int h, double ratio, std::uint64_t seed) {
  return std::make_shared<const Graph>(tswap::grid_map_to_graph(tswap::generate_random_grid(w, h, ratio, seed)));
}

}  // namespace fixtures
