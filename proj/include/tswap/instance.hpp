#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tswap/errors.hpp"
#include "tswap/graph.hpp"

namespace tswap {

// ---------------------------------------------------------------------------
// MovingAI maps
// ---------------------------------------------------------------------------

/// Raw MovingAI grid, kept verbatim so it can be written back bit-exactly.
struct GridMap {
  std::string type = "octile";
  int width = 0;
  int height = 0;
  std::vector<std::string> rows;

  static bool passable_char(char c) { return c == '.' || c == 'G'; }
  static bool known_char(char c) {
    return passable_char(c) || c == '@' || c == 'T' || c == 'O' || c == 'W';
  }
};

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = end + 1;
  }
  return lines;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

inline int parse_int(const std::string& s, int line, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("expected integer for ") + what + ", got '" + s + "'");
  }
}

}  // namespace detail

inline GridMap read_grid_map(std::string_view text) {
  const auto lines = detail::split_lines(text);
  GridMap m;
  std::size_t i = 0;
  bool have_type = false, have_h = false, have_w = false;
  for (; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    const auto tok = detail::split_ws(lines[i]);
    if (tok.empty()) continue;
    if (tok[0] == "map" && tok.size() == 1) {
      ++i;
      break;
    }
    if (tok.size() != 2) throw ParseError(lineno, "malformed header line '" + lines[i] + "'");
    if (tok[0] == "type") {
      m.type = tok[1];
      have_type = true;
    } else if (tok[0] == "height") {
      m.height = detail::parse_int(tok[1], lineno, "height");
      have_h = true;
    } else if (tok[0] == "width") {
      m.width = detail::parse_int(tok[1], lineno, "width");
      have_w = true;
    } else {
      throw ParseError(lineno, "unknown header key '" + tok[0] + "'");
    }
  }
  if (!have_type || !have_h || !have_w) {
    throw ParseError(static_cast<int>(std::min(i, lines.size())), "header needs type, height, width and map");
  }
  if (m.width <= 0 || m.height <= 0) throw ParseError(static_cast<int>(i), "non-positive map dimensions");
  for (int r = 0; r < m.height; ++r, ++i) {
    const int lineno = static_cast<int>(i) + 1;
    if (i >= lines.size()) throw ParseError(lineno, "missing map row " + std::to_string(r));
    if (static_cast<int>(lines[i].size()) != m.width) {
      throw ParseError(lineno, "row length " + std::to_string(lines[i].size()) + " != width " +
                                   std::to_string(m.width));
    }
    m.rows.push_back(lines[i]);
  }
  for (; i < lines.size(); ++i) {
    if (!detail::split_ws(lines[i]).empty()) {
      throw ParseError(static_cast<int>(i) + 1, "unexpected content after the last map row");
    }
  }
  return m;
}

inline std::string write_grid_map(const GridMap& m) {
  std::ostringstream os;
  os << "type " << m.type << "\nheight " << m.height << "\nwidth " << m.width << "\nmap\n";
  for (const auto& r : m.rows) os << r << '\n';
  return os.str();
}

/// Passability mask reduced to the largest 4-connected component
/// (ties: the component containing the first passable cell in row-major order).
inline std::vector<bool> largest_component(int width, int height, const std::vector<bool>& passable) {
  std::vector<int> comp(passable.size(), -1);
  std::vector<std::size_t> sizes;
  for (std::size_t start = 0; start < passable.size(); ++start) {
    if (!passable[start] || comp[start] >= 0) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t count = 0;
    std::vector<std::size_t> stack{start};
    comp[start] = id;
    while (!stack.empty()) {
      const auto c = stack.back();
      stack.pop_back();
      ++count;
      const int x = static_cast<int>(c % width), y = static_cast<int>(c / width);
      const int dx[] = {0, -1, 1, 0}, dy[] = {-1, 0, 0, 1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
        const auto n = static_cast<std::size_t>(ny) * width + nx;
        if (passable[n] && comp[n] < 0) {
          comp[n] = id;
          stack.push_back(n);
        }
      }
    }
    sizes.push_back(count);
  }
  std::vector<bool> out(passable.size(), false);
  if (sizes.empty()) return out;
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (std::size_t c = 0; c < passable.size(); ++c) out[c] = comp[c] == best;
  return out;
}

/// 4-connected graph of a grid map. Unknown characters count as obstacles and
/// disconnected pockets are dropped; both produce a warning.
inline Graph grid_map_to_graph(const GridMap& m, std::vector<std::string>* warnings = nullptr) {
  std::vector<bool> passable(static_cast<std::size_t>(m.width) * m.height, false);
  bool unknown = false;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      const char c = m.rows[y][x];
      if (!GridMap::known_char(c)) unknown = true;
      passable[static_cast<std::size_t>(y) * m.width + x] = GridMap::passable_char(c);
    }
  }
  if (unknown && warnings) warnings->push_back("unknown map characters treated as obstacles");
  const auto total = std::count(passable.begin(), passable.end(), true);
  if (total == 0) throw ParseError(5, "map has no passable cells");
  auto kept = largest_component(m.width, m.height, passable);
  const auto kept_count = std::count(kept.begin(), kept.end(), true);
  if (kept_count != total && warnings) {
    warnings->push_back("map is disconnected; kept largest component (" + std::to_string(kept_count) + " of " +
                        std::to_string(total) + " cells)");
  }
  return Graph::from_grid(m.width, m.height, kept);
}

inline Graph parse_movingai_map(std::string_view text, std::vector<std::string>* warnings = nullptr) {
  return grid_map_to_graph(read_grid_map(text), warnings);
}

/// Random grid with each cell blocked independently with probability
/// obstacle_ratio; not yet reduced to a component.
inline GridMap generate_random_grid(int width, int height, double obstacle_ratio, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution blocked(obstacle_ratio);
  GridMap m;
  m.width = width;
  m.height = height;
  for (int y = 0; y < height; ++y) {
    std::string row(width, '.');
    for (char& c : row) c = blocked(rng) ? '@' : '.';
    m.rows.push_back(std::move(row));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Instances, plans, metrics
// ---------------------------------------------------------------------------

class Instance {
 public:
  Instance(std::shared_ptr<const Graph> graph, std::vector<Node> starts, std::vector<Node> targets,
           std::optional<std::uint64_t> seed = std::nullopt)
      : graph_(std::move(graph)), starts_(std::move(starts)), targets_(std::move(targets)), seed_(seed) {
    if (!graph_) throw InputError("instance without graph");
    check_distinct(starts_, "starts");
    check_distinct(targets_, "targets");
    if (targets_.size() > starts_.size()) throw InputError("more targets than agents");
    if (starts_.empty()) throw InputError("instance has no agents");
  }

  const Graph& graph() const noexcept { return *graph_; }
  std::shared_ptr<const Graph> graph_ptr() const noexcept { return graph_; }
  const std::vector<Node>& starts() const noexcept { return starts_; }
  const std::vector<Node>& targets() const noexcept { return targets_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  std::size_t num_agents() const noexcept { return starts_.size(); }
  std::size_t num_targets() const noexcept { return targets_.size(); }

  std::vector<bool> target_mask() const {
    std::vector<bool> mask(graph_->size(), false);
    for (Node g : targets_) mask[g] = true;
    return mask;
  }

 private:
  void check_distinct(const std::vector<Node>& nodes, const char* what) const {
    std::vector<bool> seen(graph_->size(), false);
    for (Node v : nodes) {
      graph_->check(v);
      if (seen[v]) throw InputError(std::string(what) + " are not pairwise distinct");
      seen[v] = true;
    }
  }

  std::shared_ptr<const Graph> graph_;
  std::vector<Node> starts_;
  std::vector<Node> targets_;
  std::optional<std::uint64_t> seed_;
};

/// One path per agent, all of equal length makespan()+1.
struct Plan {
  std::vector<std::vector<Node>> paths;

  int makespan() const { return paths.empty() ? 0 : static_cast<int>(paths.front().size()) - 1; }
  std::size_t num_agents() const noexcept { return paths.size(); }
  Node at(std::size_t agent, int t) const { return paths[agent][t]; }
};

struct Metrics {
  int makespan = 0;
  int sum_of_costs = 0;
  int maximum_moves = 0;
  int sum_of_moves = 0;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Samples starts and targets independently, each without replacement.
inline Instance generate_random_instance(std::shared_ptr<const Graph> graph, std::size_t n_agents,
                                         std::size_t n_targets, std::uint64_t seed) {
  if (n_agents > graph->size()) throw CapacityError("more agents than nodes");
  if (n_targets > n_agents) throw InputError("more targets than agents");
  std::mt19937_64 rng(seed);
  auto sample = [&](std::size_t k) {
    std::vector<Node> pool(graph->size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<Node>(i);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    return pool;
  };
  auto starts = sample(n_agents);
  auto targets = sample(n_targets);
  return Instance(std::move(graph), std::move(starts), std::move(targets), seed);
}

struct Violation {
  enum class Kind { wrong_agent_count, length_mismatch, unknown_node, bad_start, illegal_move,
                    vertex_conflict, swap_conflict, target_uncovered };
  Kind kind;
  int timestep = 0;
  std::vector<int> agents;
  Node node = kNoNode;

  std::string describe() const {
    auto list = [this] {
      std::string s;
      for (std::size_t i = 0; i < agents.size(); ++i) s += (i ? "," : "") + std::to_string(agents[i]);
      return s;
    };
    const std::string at = "t=" + std::to_string(timestep) + " ";
    switch (kind) {
      case Kind::wrong_agent_count: return at + "plan has wrong number of paths";
      case Kind::length_mismatch: return at + "path length mismatch agents=" + list();
      case Kind::unknown_node: return at + "unknown node " + std::to_string(node) + " agents=" + list();
      case Kind::bad_start: return at + "bad start agents=" + list() + " node=" + std::to_string(node);
      case Kind::illegal_move: return at + "illegal move agents=" + list() + " to=" + std::to_string(node);
      case Kind::vertex_conflict: return at + "vertex conflict agents=" + list() + " node=" + std::to_string(node);
      case Kind::swap_conflict: return at + "swap conflict agents=" + list();
      case Kind::target_uncovered: return at + "target uncovered node=" + std::to_string(node);
    }
    return at + "unknown violation";
  }
};

/// Every violation of the plan against the instance; empty iff valid.
inline std::vector<Violation> validate_plan(const Instance& inst, const Plan& plan) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  const auto& g = inst.graph();
  if (plan.paths.size() != inst.num_agents()) {
    out.push_back({K::wrong_agent_count, 0, {}, kNoNode});
    return out;
  }
  const std::size_t len = plan.paths.front().size();
  for (std::size_t i = 0; i < plan.paths.size(); ++i) {
    if (plan.paths[i].size() != len || len == 0) out.push_back({K::length_mismatch, 0, {int(i)}, kNoNode});
    for (std::size_t t = 0; t < plan.paths[i].size(); ++t) {
      if (!g.contains(plan.paths[i][t])) out.push_back({K::unknown_node, int(t), {int(i)}, plan.paths[i][t]});
    }
  }
  if (!out.empty()) return out;

  const int T = static_cast<int>(len) - 1;
  std::vector<int> occ(g.size(), -1), prev(g.size(), -1);
  for (std::size_t i = 0; i < plan.paths.size(); ++i) {
    if (plan.paths[i][0] != inst.starts()[i]) out.push_back({K::bad_start, 0, {int(i)}, plan.paths[i][0]});
  }
  for (int t = 0; t <= T; ++t) {
    for (std::size_t i = 0; i < plan.paths.size(); ++i) {
      const Node v = plan.paths[i][t];
      if (occ[v] >= 0) {
        out.push_back({K::vertex_conflict, t, {occ[v], int(i)}, v});
      } else {
        occ[v] = static_cast<int>(i);
      }
      if (t == 0) continue;
      const Node u = plan.paths[i][t - 1];
      if (u == v) continue;
      if (!g.adjacent(u, v)) out.push_back({K::illegal_move, t, {int(i)}, v});
      // swap: i goes u->v while the agent that was at v goes v->u; reported once, from the lower id
      const int j = prev[v];
      if (j > static_cast<int>(i) && plan.paths[j][t] == u) {
        out.push_back({K::swap_conflict, t - 1, {int(i), j}, kNoNode});
      }
    }
    if (t == T) {
      for (Node target : inst.targets()) {
        if (occ[target] < 0) out.push_back({K::target_uncovered, T, {}, target});
      }
    }
    if (t > 0) {
      for (const auto& p : plan.paths) prev[p[t - 1]] = -1;
    }
    std::swap(prev, occ);
  }
  return out;
}

/// Metrics of a valid plan. The plan's horizon is its makespan; sum-of-costs
/// charges each agent up to its last move.
inline Metrics compute_metrics(const Instance& inst, const Plan& plan) {
  if (!validate_plan(inst, plan).empty()) throw ContractError("compute_metrics requires a valid plan");
  Metrics m;
  m.makespan = plan.makespan();
  for (const auto& path : plan.paths) {
    int last_move = 0, moves = 0;
    for (std::size_t t = 1; t < path.size(); ++t) {
      if (path[t] != path[t - 1]) {
        ++moves;
        last_move = static_cast<int>(t);
      }
    }
    m.sum_of_costs += last_move;
    m.sum_of_moves += moves;
    m.maximum_moves = std::max(m.maximum_moves, moves);
  }
  return m;
}

/// Cut the plan at the first timestep where every target is occupied.
inline void truncate_to_first_cover(const Instance& inst, Plan& plan) {
  if (plan.paths.empty()) return;
  const auto is_target = inst.target_mask();
  const int T = plan.makespan();
  for (int t = 0; t <= T; ++t) {
    std::size_t covered = 0;
    for (const auto& p : plan.paths) covered += is_target[p[t]] ? 1 : 0;
    if (covered == inst.num_targets()) {
      for (auto& p : plan.paths) p.resize(t + 1);
      return;
    }
  }
}

}  // namespace tswap
