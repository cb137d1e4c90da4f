#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tswap/assignment.hpp"
#include "tswap/errors.hpp"
#include "tswap/graph.hpp"
#include "tswap/instance.hpp"

namespace tswap {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

/// "x,y" (column, row) to a grid cell.
inline std::optional<Cell> parse_cell(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return std::nullopt;
  try {
    std::size_t a = 0, b = 0;
    const int x = std::stoi(s.substr(0, comma), &a);
    const auto rest = s.substr(comma + 1);
    const int y = std::stoi(rest, &b);
    if (a != comma || b != rest.size()) return std::nullopt;
    return Cell{x, y};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::string format_cell(const Graph& g, Node v) {
  const Cell c = g.cell(v);
  return std::to_string(c.x) + "," + std::to_string(c.y);
}

inline Node node_of_cell(const Graph& g, const Cell& c) {
  auto v = g.node_at(c.x, c.y);
  if (!v) throw InputError("cell " + std::to_string(c.x) + "," + std::to_string(c.y) + " is not a passable node");
  return *v;
}

inline std::vector<Node> nodes_of_cells(const Graph& g, const std::vector<std::string>& cells) {
  std::vector<Node> out;
  for (const auto& s : cells) {
    auto c = parse_cell(s);
    if (!c) throw InputError("expected x,y but got '" + s + "'");
    out.push_back(node_of_cell(g, *c));
  }
  return out;
}

struct LoadedMap {
  std::shared_ptr<const Graph> graph;
  std::vector<std::string> warnings;
};

inline LoadedMap load_map(const std::filesystem::path& path) {
  LoadedMap m;
  m.graph = std::make_shared<const Graph>(parse_movingai_map(read_file(path), &m.warnings));
  return m;
}

/// Native instance text:
///
///   map <path>             (relative paths resolve against `base_dir`)
///   agents N targets M seed K
///
/// or, instead of the `agents` line, explicit `starts x,y ...` and
/// `targets x,y ...` lines. `map inline` is followed by a MovingAI map body
/// (header plus rows). Blank lines and lines starting with '#' are ignored.
inline Instance read_instance(std::string_view text, const std::filesystem::path& base_dir = {},
                              std::vector<std::string>* warnings = nullptr) {
  const auto lines = detail::split_lines(text);
  std::size_t i = 0;
  auto skip_blank = [&] {
    while (i < lines.size()) {
      const auto tok = detail::split_ws(lines[i]);
      if (!tok.empty() && tok[0][0] != '#') break;
      ++i;
    }
  };
  skip_blank();
  if (i == lines.size()) throw ParseError(1, "empty instance file");
  auto head = detail::split_ws(lines[i]);
  if (head.size() != 2 || head[0] != "map") throw ParseError(static_cast<int>(i) + 1, "expected 'map <path>'");
  std::shared_ptr<const Graph> graph;
  if (head[1] == "inline") {
    const std::size_t first = ++i;
    // header is four lines; the row count comes from the height line
    int height = -1;
    for (std::size_t k = first; k < lines.size() && k < first + 4; ++k) {
      auto tok = detail::split_ws(lines[k]);
      if (tok.size() == 2 && tok[0] == "height") height = detail::parse_int(tok[1], static_cast<int>(k) + 1, "height");
    }
    if (height < 0) throw ParseError(static_cast<int>(first) + 1, "inline map lacks a height line");
    const std::size_t end = std::min(lines.size(), first + 4 + static_cast<std::size_t>(height));
    std::string body;
    for (std::size_t k = first; k < end; ++k) body += lines[k] + "\n";
    try {
      graph = std::make_shared<const Graph>(parse_movingai_map(body, warnings));
    } catch (const ParseError& e) {
      throw ParseError(static_cast<int>(first) + e.line(), e.message());
    }
    i = end;
  } else {
    std::filesystem::path p(head[1]);
    if (p.is_relative()) p = base_dir / p;
    auto m = load_map(p);
    if (warnings) warnings->insert(warnings->end(), m.warnings.begin(), m.warnings.end());
    graph = m.graph;
    ++i;
  }

  std::optional<std::vector<Node>> starts, targets;
  std::optional<std::uint64_t> seed;
  for (skip_blank(); i < lines.size(); ++i, skip_blank()) {
    const int ln = static_cast<int>(i) + 1;
    const auto tok = detail::split_ws(lines[i]);
    if (tok.empty() || tok[0][0] == '#') continue;
    try {
      if (tok[0] == "agents") {
        if (tok.size() != 6 || tok[2] != "targets" || tok[4] != "seed") {
          throw ParseError(ln, "expected 'agents N targets M seed K'");
        }
        const int n = detail::parse_int(tok[1], ln, "agents");
        const int m = detail::parse_int(tok[3], ln, "targets");
        const int k = detail::parse_int(tok[5], ln, "seed");
        if (n < 0 || m < 0 || k < 0) throw ParseError(ln, "counts and seed must be non-negative");
        auto inst = generate_random_instance(graph, n, m, static_cast<std::uint64_t>(k));
        starts = inst.starts();
        targets = inst.targets();
        seed = k;
      } else if (tok[0] == "starts") {
        starts = nodes_of_cells(*graph, {tok.begin() + 1, tok.end()});
      } else if (tok[0] == "targets") {
        targets = nodes_of_cells(*graph, {tok.begin() + 1, tok.end()});
      } else {
        throw ParseError(ln, "unknown directive '" + tok[0] + "'");
      }
    } catch (const InputError& e) {
      throw ParseError(ln, e.what());
    } catch (const CapacityError& e) {
      throw ParseError(ln, e.what());
    }
  }
  if (!starts || !targets) throw ParseError(static_cast<int>(lines.size()), "instance lacks starts or targets");
  return Instance(graph, *starts, *targets, seed);
}

inline Instance load_instance(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr) {
  return read_instance(read_file(path), path.parent_path(), warnings);
}

/// Instance with explicit start and target cells, referring to `map_ref`.
inline std::string write_instance(const Instance& inst, const std::string& map_ref) {
  std::ostringstream os;
  os << "map " << map_ref << "\nstarts";
  for (Node s : inst.starts()) os << ' ' << format_cell(inst.graph(), s);
  os << "\ntargets";
  for (Node t : inst.targets()) os << ' ' << format_cell(inst.graph(), t);
  os << '\n';
  return os.str();
}

/// Plan CSV: a '#' line with the metrics, a header `t,a0,a1,...`, then one
/// row of node ids per timestep.
inline std::string write_plan(const Plan& plan, const std::optional<Metrics>& metrics = std::nullopt) {
  std::ostringstream os;
  if (metrics) {
    os << "# makespan=" << metrics->makespan << " sum_of_costs=" << metrics->sum_of_costs
       << " maximum_moves=" << metrics->maximum_moves << " sum_of_moves=" << metrics->sum_of_moves << '\n';
  }
  os << 't';
  for (std::size_t i = 0; i < plan.num_agents(); ++i) os << ",a" << i;
  os << '\n';
  for (int t = 0; t <= plan.makespan() && plan.num_agents() > 0; ++t) {
    os << t;
    for (const auto& p : plan.paths) os << ',' << p[t];
    os << '\n';
  }
  return os.str();
}

inline Plan read_plan(std::string_view text) {
  const auto lines = detail::split_lines(text);
  Plan plan;
  bool header = false;
  int expected_t = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int ln = static_cast<int>(i) + 1;
    const auto& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!header) {
      if (cells.empty() || cells[0] != "t") throw ParseError(ln, "expected plan header 't,a0,...'");
      plan.paths.resize(cells.size() - 1);
      header = true;
      continue;
    }
    if (cells.size() != plan.paths.size() + 1) throw ParseError(ln, "wrong number of columns");
    if (detail::parse_int(cells[0], ln, "timestep") != expected_t++) throw ParseError(ln, "timesteps out of order");
    for (std::size_t a = 0; a < plan.paths.size(); ++a) {
      plan.paths[a].push_back(static_cast<Node>(detail::parse_int(cells[a + 1], ln, "node id")));
    }
  }
  if (!header) throw ParseError(1, "plan has no header");
  if (expected_t == 0) throw ParseError(static_cast<int>(lines.size()), "plan has no rows");
  return plan;
}

/// `s_x,s_y -> g_x,g_y dist=d` per agent, then `bottleneck=B total=C`.
inline std::string write_assignment(const Instance& inst, const Assignment& a) {
  const auto& g = inst.graph();
  DistanceOracle oracle(g);
  std::ostringstream os;
  for (std::size_t i = 0; i < a.goals.size(); ++i) {
    const Node s = inst.starts()[i];
    os << format_cell(g, s) << " -> " << format_cell(g, a.goals[i]) << " dist=" << oracle.dist_lazy(s, a.goals[i])
       << '\n';
  }
  os << "bottleneck=" << a.bottleneck_cost << " total=" << a.total_cost << '\n';
  return os.str();
}

/// One benchmark outcome. Metrics are present iff status is "ok".
struct ResultRow {
  std::string map;
  std::size_t n_agents = 0;
  std::uint64_t seed = 0;
  std::string solver;
  std::string assignment;
  std::optional<Metrics> metrics;
  double runtime_ms = 0.0;
  std::optional<int> lower_bound;
  std::string status = "ok";

  static constexpr std::string_view kHeader =
      "map,n_agents,seed,solver,assignment,makespan,sum_of_costs,maximum_moves,sum_of_moves,runtime_ms,lower_bound,"
      "status";

  std::string to_csv() const {
    std::ostringstream os;
    os << map << ',' << n_agents << ',' << seed << ',' << solver << ',' << assignment << ',';
    if (metrics) {
      os << metrics->makespan << ',' << metrics->sum_of_costs << ',' << metrics->maximum_moves << ','
         << metrics->sum_of_moves;
    } else {
      os << ",,,";
    }
    os << ',' << runtime_ms << ',';
    if (lower_bound) os << *lower_bound;
    os << ',' << status;
    return os.str();
  }

  static ResultRow from_csv(const std::string& line) {
    std::vector<std::string> c;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      c.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (c.size() != 12) throw ParseError(1, "result row needs 12 columns");
    ResultRow r;
    r.map = c[0];
    r.n_agents = static_cast<std::size_t>(detail::parse_int(c[1], 1, "n_agents"));
    try {
      std::size_t used = 0;
      r.seed = std::stoull(c[2], &used);
      if (used != c[2].size()) throw std::invalid_argument("seed");
      r.runtime_ms = std::stod(c[9], &used);
      if (used != c[9].size()) throw std::invalid_argument("runtime");
    } catch (const std::logic_error&) {
      throw ParseError(1, "bad seed or runtime column");
    }
    r.solver = c[3];
    r.assignment = c[4];
    if (!c[5].empty()) {
      r.metrics = Metrics{detail::parse_int(c[5], 1, "makespan"), detail::parse_int(c[6], 1, "sum_of_costs"),
                          detail::parse_int(c[7], 1, "maximum_moves"), detail::parse_int(c[8], 1, "sum_of_moves")};
    }
    if (!c[10].empty()) r.lower_bound = detail::parse_int(c[10], 1, "lower_bound");
    r.status = c[11];
    return r;
  }
};

}  // namespace tswap
