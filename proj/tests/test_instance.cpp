#include <gtest/gtest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "tswap/instance.hpp"

using namespace tswap;

namespace {

std::string map_text(int w, int h, const std::vector<std::string>& rows) {
  std::string s = "type octile\nheight " + std::to_string(h) + "\nwidth " + std::to_string(w) + "\nmap\n";
  for (const auto& r : rows) s += r + "\n";
  return s;
}

bool has(const std::vector<Violation>& vs, Violation::Kind k) {
  return std::any_of(vs.begin(), vs.end(), [k](const Violation& v) { return v.kind == k; });
}

}  // namespace

TEST(MovingAiMap, OpenTwoByTwo) {
  const auto g = parse_movingai_map(map_text(2, 2, {"..", ".."}));
  EXPECT_EQ(g.size(), 4u);
  EXPECT_EQ(g.num_edges(), 4u);
}

TEST(MovingAiMap, SixCellLine) {
  const auto g = parse_movingai_map(map_text(6, 1, {"......"}));
  EXPECT_EQ(g.size(), 6u);
  EXPECT_EQ(g.num_edges(), 5u);
}

TEST(MovingAiMap, BlockedCenter) {
  const auto g = parse_movingai_map(map_text(3, 3, {"...", ".@.", "..."}));
  EXPECT_EQ(g.size(), 8u);
  EXPECT_EQ(g.num_edges(), 8u);
}

TEST(MovingAiMap, ObstacleAndPassableCharacters) {
  const auto g = parse_movingai_map(map_text(6, 1, {".GTOW@"}));
  EXPECT_EQ(g.size(), 2u);
}

TEST(MovingAiMap, MalformedInputReportsLine) {
  try {
    parse_movingai_map("type octile\nheight x\nwidth 2\nmap\n..\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  try {
    parse_movingai_map(map_text(3, 2, {"...", ".."}));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6);
  }
  EXPECT_THROW(parse_movingai_map(map_text(2, 1, {"@@"})), ParseError);
  EXPECT_THROW(parse_movingai_map("height 1\nwidth 1\nmap\n.\n"), ParseError);
  EXPECT_THROW(parse_movingai_map(map_text(2, 2, {".."})), ParseError);
}

TEST(MovingAiMap, DisconnectedKeepsLargestComponentWithWarning) {
  std::vector<std::string> warnings;
  const auto g = parse_movingai_map(map_text(5, 1, {"..@.."}), &warnings);
  // two components of size 2; the first one in row-major order is kept
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(warnings.size(), 1u);
  const auto g2 = parse_movingai_map(map_text(5, 1, {".@..."}), &warnings);
  EXPECT_EQ(g2.size(), 3u);
  EXPECT_FALSE(g2.node_at(0, 0).has_value());
}

TEST(MovingAiMap, UnknownCharactersWarnAndBlock) {
  std::vector<std::string> warnings;
  const auto g = parse_movingai_map(map_text(3, 1, {"..?"}), &warnings);
  EXPECT_EQ(g.size(), 2u);
  EXPECT_FALSE(warnings.empty());
}

TEST(MovingAiMap, RoundTripIsBitExact) {
  const std::string text = map_text(4, 3, {".@T.", "G..W", "O..."});
  EXPECT_EQ(write_grid_map(read_grid_map(text)), text);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = generate_random_grid(9, 7, 0.3, seed);
    EXPECT_EQ(write_grid_map(read_grid_map(write_grid_map(m))), write_grid_map(m));
  }
}

TEST(Instance, RejectsInvalidSets) {
  const auto g = fixtures::line(4);
  EXPECT_THROW(Instance(g, {0, 0}, {1}), InputError);
  EXPECT_THROW(Instance(g, {0, 1}, {2, 2}), InputError);
  EXPECT_THROW(Instance(g, {0}, {1, 2}), InputError);
  EXPECT_THROW(Instance(g, {0, 9}, {1}), InputError);
  EXPECT_THROW(Instance(g, {}, {}), InputError);
  EXPECT_NO_THROW(Instance(g, {0, 1}, {1}));
}

TEST(RandomInstance, DeterministicAndValid) {
  const auto g = fixtures::random_grid(10, 10, 0.2, 3);
  const auto a = generate_random_instance(g, 20, 15, 42);
  const auto b = generate_random_instance(g, 20, 15, 42);
  EXPECT_EQ(a.starts(), b.starts());
  EXPECT_EQ(a.targets(), b.targets());
  EXPECT_EQ(a.num_targets(), 15u);
  EXPECT_EQ(*a.seed(), 42u);
}

TEST(RandomInstance, FullOccupancyIsPermutation) {
  const auto g = fixtures::grid(3, 3);
  const auto inst = generate_random_instance(g, 9, 9, 1);
  auto s = inst.starts();
  std::sort(s.begin(), s.end());
  for (Node v = 0; v < 9; ++v) EXPECT_EQ(s[v], v);
}

TEST(RandomInstance, CapacityError) {
  EXPECT_THROW(generate_random_instance(fixtures::line(3), 4, 1, 0), CapacityError);
}

TEST(RandomInstance, StartFrequenciesAreUniform) {
  const auto g = fixtures::line(10);
  std::vector<int> count(10, 0);
  const int draws = 1000;
  for (int s = 0; s < draws; ++s) {
    const auto inst = generate_random_instance(g, 3, 1, s);
    for (Node v : inst.starts()) ++count[v];
  }
  // each node is a start with probability 3/10
  const double p = 0.3, mean = draws * p, sigma = std::sqrt(draws * p * (1 - p));
  for (int c : count) EXPECT_LE(std::abs(c - mean), 5 * sigma);
}

TEST(ValidatePlan, FlowLineSolutionIsValid) {
  const auto inst = fixtures::flow_line();
  Plan plan{{{1, 2, 2}, {2, 3, 4}}};
  EXPECT_TRUE(validate_plan(inst, plan).empty());
  const Metrics m = compute_metrics(inst, plan);
  EXPECT_EQ(m, (Metrics{2, 3, 2, 3}));
}

TEST(ValidatePlan, SwapConflictReportedOnce) {
  const auto g = fixtures::line(3);
  const Instance inst(g, {0, 1}, {0, 1});
  Plan plan{{{0, 1, 0}, {1, 0, 1}}};
  const auto v = validate_plan(inst, plan);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, Violation::Kind::swap_conflict);
  EXPECT_EQ(v[0].timestep, 0);
  EXPECT_EQ(v[1].timestep, 1);
}

TEST(ValidatePlan, ReportsEachKind) {
  const auto g = fixtures::line(4);
  const Instance inst(g, {0, 1}, {2, 3});
  EXPECT_TRUE(has(validate_plan(inst, Plan{{{1, 2}, {0, 1}}}), Violation::Kind::bad_start));
  EXPECT_TRUE(has(validate_plan(inst, Plan{{{0, 2}, {1, 3}}}), Violation::Kind::illegal_move));
  EXPECT_TRUE(has(validate_plan(inst, Plan{{{0, 1}, {1, 1}}}), Violation::Kind::vertex_conflict));
  EXPECT_TRUE(has(validate_plan(inst, Plan{{{0, 1}, {1, 2}}}), Violation::Kind::target_uncovered));
  EXPECT_TRUE(has(validate_plan(inst, Plan{{{0, 1}}}), Violation::Kind::wrong_agent_count));
  EXPECT_TRUE(has(validate_plan(inst, Plan{{{0, 1}, {1}}}), Violation::Kind::length_mismatch));
  EXPECT_TRUE(has(validate_plan(inst, Plan{{{0, 7}, {1, 2}}}), Violation::Kind::unknown_node));
}

TEST(ValidatePlan, FollowingIsAllowed) {
  const auto g = fixtures::line(4);
  const Instance inst(g, {0, 1}, {1, 2});
  EXPECT_TRUE(validate_plan(inst, Plan{{{0, 1}, {1, 2}}}).empty());
}

TEST(Metrics, ZeroWhenStartsCoverTargets) {
  const auto g = fixtures::line(4);
  const Instance inst(g, {0, 2}, {2});
  EXPECT_EQ(compute_metrics(inst, Plan{{{0}, {2}}}), (Metrics{0, 0, 0, 0}));
}

TEST(Metrics, SingleAgentFourSteps) {
  const auto g = fixtures::line(5);
  const Instance inst(g, {0}, {4});
  EXPECT_EQ(compute_metrics(inst, Plan{{{0, 1, 2, 3, 4}}}), (Metrics{4, 4, 4, 4}));
}

TEST(Metrics, InvalidPlanIsContractError) {
  const auto g = fixtures::line(3);
  const Instance inst(g, {0}, {2});
  EXPECT_THROW(compute_metrics(inst, Plan{{{0, 1}}}), ContractError);
}

TEST(Metrics, WaitsAfterLastMoveAreFree) {
  const auto g = fixtures::line(5);
  const Instance inst(g, {0, 3}, {1, 4});
  // agent 1 waits, then moves at t=2; agent 0 moves at t=1 then rests
  EXPECT_EQ(compute_metrics(inst, Plan{{{0, 1, 1}, {3, 3, 4}}}), (Metrics{2, 3, 1, 2}));
}

TEST(TruncateToFirstCover, CutsTrailingSteps) {
  const auto g = fixtures::line(4);
  const Instance inst(g, {0, 3}, {1});
  Plan plan{{{0, 1, 1, 1}, {3, 2, 3, 2}}};
  truncate_to_first_cover(inst, plan);
  EXPECT_EQ(plan.makespan(), 1);
}
