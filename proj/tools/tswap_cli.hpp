#pragma once

// Command-line front end. `run` takes the argument list and output streams so
// tests can drive it in-process.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tswap/assignment.hpp"
#include "tswap/errors.hpp"
#include "tswap/instance.hpp"
#include "tswap/io.hpp"
#include "tswap/optimal.hpp"
#include "tswap/tswap.hpp"

namespace tswap::cli {

enum ExitCode : int { kOk = 0, kInvalid = 1, kUsage = 2, kTimeout = 3 };

/// INI reader that files top-level `key=value` lines under one subcommand, so
/// a config file can list the options of the command it is passed to. List
/// values are whitespace separated and '#' starts a comment.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  explicit SubcommandConfig(std::string subcommand) : subcommand_(std::move(subcommand)) {
    comment('#');
    arrayDelimiter(';');  // keeps "x,y" cells whole
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    for (auto& item : items) {
      if (!subcommand_.empty() && item.parents.empty()) item.parents.push_back(subcommand_);
    }
    return items;
  }

 private:
  std::string subcommand_;
};

/// Where the instance comes from: an instance file, or a map plus explicit
/// cells, or a map plus a random draw.
struct InstanceArgs {
  std::string instance;
  std::string map;
  std::vector<std::string> starts;
  std::vector<std::string> targets;
  int agents = -1;
  int n_targets = -1;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app) {
    app.add_option("--instance", instance, "instance file");
    app.add_option("--map", map, "MovingAI map file");
    app.add_option("--starts", starts, "start cells x,y")->expected(1, -1);
    app.add_option("--targets", targets, "target cells x,y")->expected(1, -1);
    app.add_option("--agents", agents, "random instance: number of agents");
    app.add_option("--n-targets", n_targets, "random instance: number of targets (default: agents)");
    app.add_option("--seed", seed, "random seed");
  }

  /// Label for result rows.
  std::string label() const { return instance.empty() ? map : instance; }

  Instance load(std::vector<std::string>& warnings) const {
    if (!instance.empty()) {
      if (!map.empty()) throw InputError("--instance and --map are mutually exclusive");
      return load_instance(instance, &warnings);
    }
    if (map.empty()) throw InputError("need --instance or --map");
    auto m = load_map(map);
    warnings.insert(warnings.end(), m.warnings.begin(), m.warnings.end());
    if (agents >= 0) {
      if (!starts.empty() || !targets.empty()) throw InputError("--agents excludes --starts/--targets");
      return generate_random_instance(m.graph, agents, n_targets < 0 ? agents : n_targets, seed);
    }
    if (starts.empty() || targets.empty()) throw InputError("need --starts and --targets, or --agents");
    return Instance(m.graph, nodes_of_cells(*m.graph, starts), nodes_of_cells(*m.graph, targets));
  }
};

struct FlowArgs {
  std::string lb = "auto";
  bool no_prune = false;
  bool no_reuse = false;

  void add_to(CLI::App& app) {
    app.add_option("--lb", lb, "flow lower bound: auto|conservative|bottleneck")
        ->check(CLI::IsMember({"auto", "conservative", "bottleneck"}));
    app.add_flag("--no-prune", no_prune, "flow: disable distance pruning");
    app.add_flag("--no-reuse", no_reuse, "flow: disable reuse of the previous flow");
  }

  OptimalOptions options(double timeout_s) const {
    OptimalOptions o;
    o.lower_bound = lb == "conservative" ? LowerBoundMode::conservative
                    : lb == "bottleneck" ? LowerBoundMode::bottleneck
                                         : LowerBoundMode::automatic;
    o.prune = !no_prune;
    o.reuse = !no_reuse;
    if (timeout_s > 0) o.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
    return o;
  }
};

/// One solver run with timing and status.
struct SolveOutcome {
  ResultRow row;
  std::optional<Plan> plan;
  std::optional<Assignment> assignment;
  std::optional<OptimalResult> optimal;
};

inline SolveOutcome solve_one(const Instance& inst, const std::string& map_label, const std::string& solver,
                              const std::string& assign_name, const FlowArgs& flow, double timeout_s) {
  SolveOutcome o;
  o.row.map = map_label;
  o.row.n_agents = inst.num_agents();
  o.row.seed = inst.seed().value_or(0);
  o.row.solver = solver;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };
  try {
    if (solver == "tswap") {
      const auto algo = parse_assign_algorithm(assign_name);
      if (!algo) throw InputError("unknown assignment " + assign_name);
      o.row.assignment = assign_name;
      o.assignment = assign(inst, *algo);
      o.plan = solve_offline(inst, *o.assignment).plan;
    } else if (solver == "flow") {
      o.optimal = solve_optimal(inst, flow.options(timeout_s));
      o.plan = o.optimal->plan;
      o.row.lower_bound = o.optimal->lower_bound;
    } else {
      throw InputError("unknown solver " + solver);
    }
    o.row.runtime_ms = elapsed();
    o.row.metrics = compute_metrics(inst, *o.plan);
    o.row.status = "ok";
  } catch (const TimeoutError&) {
    o.row.runtime_ms = elapsed();
    o.row.status = "timeout";
    o.plan.reset();
  }
  return o;
}

inline int cmd_solve(const InstanceArgs& ia, const std::string& solver, const std::string& assign_name,
                     const FlowArgs& flow, double timeout_s, const std::string& plan_out,
                     const std::string& assignment_out, const std::string& diagnostics_out, std::ostream& out,
                     std::ostream& err) {
  std::vector<std::string> warnings;
  const auto inst = ia.load(warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  const auto o = solve_one(inst, ia.label(), solver, assign_name, flow, timeout_s);
  out << ResultRow::kHeader << '\n' << o.row.to_csv() << '\n';
  if (o.row.status == "timeout") {
    err << "timeout after " << o.row.runtime_ms << " ms\n";
    return kTimeout;
  }
  if (!plan_out.empty()) write_file(plan_out, write_plan(*o.plan, o.row.metrics));
  if (!assignment_out.empty() && o.assignment) write_file(assignment_out, write_assignment(inst, *o.assignment));
  if (!diagnostics_out.empty() && o.optimal) write_file(diagnostics_out, o.optimal->diagnostics_csv());
  return kOk;
}

/// "tswap:alg2" or "flow".
struct SolverSpec {
  std::string solver;
  std::string assignment;
};

inline SolverSpec parse_solver_spec(const std::string& s) {
  if (s == "flow") return {"flow", ""};
  if (s.rfind("tswap:", 0) == 0 && parse_assign_algorithm(s.substr(6))) return {"tswap", s.substr(6)};
  throw InputError("solver must be flow or tswap:<assignment>, got " + s);
}

inline int cmd_bench(const std::vector<std::string>& maps, const std::vector<int>& agent_counts, int n_targets,
                     int seeds, const std::vector<std::string>& solver_names, const FlowArgs& flow, double timeout_s,
                     const std::string& out_path, std::ostream& out, std::ostream& err) {
  std::vector<SolverSpec> solvers;
  for (const auto& s : solver_names) solvers.push_back(parse_solver_spec(s));
  if (solvers.empty()) throw InputError("bench needs at least one solver");
  std::ostringstream csv;
  csv << ResultRow::kHeader << '\n';
  for (const auto& map : maps) {
    auto m = load_map(map);
    for (const auto& w : m.warnings) err << "warning: " << map << ": " << w << '\n';
    for (int n : agent_counts) {
      if (n < 1 || static_cast<std::size_t>(n) > m.graph->size()) {
        throw InputError("agent count " + std::to_string(n) + " does not fit " + map);
      }
      for (int seed = 0; seed < seeds; ++seed) {
        const auto inst = generate_random_instance(m.graph, n, n_targets < 0 ? n : std::min(n, n_targets), seed);
        for (const auto& s : solvers) {
          ResultRow row;
          try {
            row = solve_one(inst, map, s.solver, s.assignment, flow, timeout_s).row;
          } catch (const std::exception& e) {
            row.map = map;
            row.n_agents = inst.num_agents();
            row.seed = static_cast<std::uint64_t>(seed);
            row.solver = s.solver;
            row.assignment = s.assignment;
            row.status = "error";
            err << "error: " << map << " n=" << n << " seed=" << seed << ": " << e.what() << '\n';
          }
          csv << row.to_csv() << '\n';
        }
      }
    }
  }
  if (out_path.empty()) {
    out << csv.str();
  } else {
    write_file(out_path, csv.str());
  }
  return kOk;
}

inline int cmd_online(const InstanceArgs& ia, const std::string& assign_name, const std::string& schedule_spec,
                      std::size_t budget, std::uint64_t schedule_seed, const std::string& trace_out, std::ostream& out,
                      std::ostream& err) {
  std::vector<std::string> warnings;
  const auto inst = ia.load(warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  const auto algo = parse_assign_algorithm(assign_name);
  if (!algo) throw InputError("unknown assignment " + assign_name);
  const auto a = assign(inst, *algo);
  auto schedule = make_schedule(schedule_spec, static_cast<int>(inst.num_agents()), schedule_seed);
  long long psi0 = 0;
  {
    DistanceOracle oracle(inst.graph());
    for (std::size_t i = 0; i < a.goals.size(); ++i) psi0 += oracle.dist_lazy(inst.starts()[i], a.goals[i]);
  }
  auto report = [&](const ExecutionTrace& trace) {
    if (!trace_out.empty()) write_file(trace_out, trace.to_csv());
    out << "terminal=" << (trace.terminal ? 1 : 0) << " activations=" << trace.activations()
        << " sum_of_moves=" << trace.sum_of_moves() << " maximum_moves=" << trace.maximum_moves(inst.num_agents())
        << " initial_distance_sum=" << psi0 << '\n';
  };
  try {
    report(solve_online(inst, a, std::move(schedule), budget));
  } catch (const BudgetExhausted& e) {
    report(e.trace());
    err << e.what() << '\n';
    return kTimeout;
  }
  return kOk;
}

inline int cmd_validate(const InstanceArgs& ia, const std::string& plan_path, std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  const auto inst = ia.load(warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  const auto plan = read_plan(read_file(plan_path));
  const auto violations = validate_plan(inst, plan);
  for (const auto& v : violations) out << v.describe() << '\n';
  if (!violations.empty()) return kInvalid;
  const auto m = compute_metrics(inst, plan);
  out << "valid makespan=" << m.makespan << " sum_of_costs=" << m.sum_of_costs
      << " maximum_moves=" << m.maximum_moves << " sum_of_moves=" << m.sum_of_moves << '\n';
  return kOk;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Unlabeled multi-agent path finding: TSWAP and a flow-based optimal baseline"};
  app.name("tswap");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");
  app.fallthrough();
  app.set_config("--config", "", "key=value file with options of the subcommand; command-line flags win");
  app.config_formatter(std::make_shared<SubcommandConfig>(args.empty() ? std::string() : args.front()));

  double timeout_s = 300.0;
  FlowArgs flow;

  // solve
  InstanceArgs solve_ia;
  std::string solver = "tswap", assign_name = "alg3", plan_out, assignment_out, diagnostics_out;
  auto* solve = app.add_subcommand("solve", "solve one instance");
  solve_ia.add_to(*solve);
  solve->add_option("--solver", solver, "tswap|flow")->check(CLI::IsMember({"tswap", "flow"}));
  solve->add_option("--assign", assign_name, "alg2|alg2dagger|alg3|alg5|naive|linear");
  solve->add_option("--timeout", timeout_s, "seconds per instance (flow only)");
  solve->add_option("--plan-out", plan_out, "write the plan CSV here");
  solve->add_option("--assignment-out", assignment_out, "write the target assignment here (tswap only)");
  solve->add_option("--diagnostics-out", diagnostics_out, "write per-horizon flow statistics here (flow only)");
  flow.add_to(*solve);

  // bench
  std::vector<std::string> bench_maps, bench_solvers{"tswap:alg3", "flow"};
  std::vector<int> bench_agents;
  int bench_targets = -1, bench_seeds = 5;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "run a sweep and emit one CSV row per instance and solver");
  bench->add_option("--map", bench_maps, "map files")->required()->expected(1, -1);
  bench->add_option("--agents", bench_agents, "agent counts")->required()->expected(1, -1);
  bench->add_option("--n-targets", bench_targets, "targets per instance (default: agents)");
  bench->add_option("--seeds", bench_seeds, "instances per setting, seeds 0..N-1")->check(CLI::NonNegativeNumber);
  bench->add_option("--solvers", bench_solvers, "flow and/or tswap:<assignment>")->expected(1, -1);
  bench->add_option("--timeout", timeout_s, "seconds per instance (flow only)");
  bench->add_option("--out", bench_out, "CSV output file (default: stdout)");
  flow.add_to(*bench);

  // online
  InstanceArgs online_ia;
  std::string online_assign = "alg3", schedule_spec = "round_robin", trace_out;
  std::size_t budget = 1'000'000;
  std::uint64_t schedule_seed = 0;
  auto* online = app.add_subcommand("online", "simulate online execution under an activation schedule");
  online_ia.add_to(*online);
  online->add_option("--assign", online_assign, "alg2|alg2dagger|alg3|alg5|naive|linear");
  online->add_option("--schedule", schedule_spec, "round_robin|random_fair|delayed:AGENT:FACTOR");
  online->add_option("--budget", budget, "maximum number of activations");
  online->add_option("--schedule-seed", schedule_seed, "seed for random_fair");
  online->add_option("--trace-out", trace_out, "write the activation trace CSV here");

  // validate
  InstanceArgs validate_ia;
  std::string validate_plan_path;
  auto* validate = app.add_subcommand("validate", "check a plan file against an instance");
  validate_ia.add_to(*validate);
  validate->add_option("--plan", validate_plan_path, "plan CSV")->required();

  // gen
  auto* gen = app.add_subcommand("gen", "generate maps and instances");
  gen->require_subcommand(1);
  int gen_w = 32, gen_h = 32;
  double gen_obstacles = 0.2;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_map;
  int gen_agents = 0, gen_targets = -1;
  bool gen_explicit = false;
  auto* gen_map_cmd = gen->add_subcommand("map", "random grid map with obstacles");
  gen_map_cmd->add_option("--width", gen_w)->check(CLI::PositiveNumber);
  gen_map_cmd->add_option("--height", gen_h)->check(CLI::PositiveNumber);
  gen_map_cmd->add_option("--obstacles", gen_obstacles, "obstacle ratio")->check(CLI::Range(0.0, 1.0));
  gen_map_cmd->add_option("--seed", gen_seed);
  gen_map_cmd->add_option("--out", gen_out)->required();
  auto* gen_inst_cmd = gen->add_subcommand("instance", "random starts and targets on a map");
  gen_inst_cmd->add_option("--map", gen_map)->required();
  gen_inst_cmd->add_option("--agents", gen_agents)->required();
  gen_inst_cmd->add_option("--n-targets", gen_targets, "default: agents");
  gen_inst_cmd->add_option("--seed", gen_seed);
  gen_inst_cmd->add_flag("--explicit", gen_explicit, "write start/target cells instead of the seed line");
  gen_inst_cmd->add_option("--out", gen_out)->required();

  std::vector<const char*> argv{"tswap"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) {
      return cmd_solve(solve_ia, solver, assign_name, flow, timeout_s, plan_out, assignment_out, diagnostics_out, out,
                       err);
    }
    if (*bench) {
      return cmd_bench(bench_maps, bench_agents, bench_targets, bench_seeds, bench_solvers, flow, timeout_s,
                       bench_out, out, err);
    }
    if (*online) return cmd_online(online_ia, online_assign, schedule_spec, budget, schedule_seed, trace_out, out, err);
    if (*validate) return cmd_validate(validate_ia, validate_plan_path, out, err);
    if (*gen_map_cmd) {
      write_file(gen_out, write_grid_map(generate_random_grid(gen_w, gen_h, gen_obstacles, gen_seed)));
      return kOk;
    }
    if (*gen_inst_cmd) {
      const auto m = load_map(gen_map);
      const int targets = gen_targets < 0 ? gen_agents : gen_targets;
      std::filesystem::path out_dir = std::filesystem::path(gen_out).parent_path();
      const auto ref = std::filesystem::relative(std::filesystem::absolute(gen_map),
                                                 std::filesystem::absolute(out_dir.empty() ? "." : out_dir));
      std::string text;
      if (gen_explicit) {
        text = write_instance(generate_random_instance(m.graph, gen_agents, targets, gen_seed), ref.string());
      } else {
        generate_random_instance(m.graph, gen_agents, targets, gen_seed);  // fail early on bad counts
        text = "map " + ref.string() + "\nagents " + std::to_string(gen_agents) + " targets " +
               std::to_string(targets) + " seed " + std::to_string(gen_seed) + "\n";
      }
      write_file(gen_out, text);
      return kOk;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace tswap::cli
