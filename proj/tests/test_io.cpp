#include <gtest/gtest.h>

#include <filesystem>

#include "support/fixtures.hpp"
#include "support/tempdir.hpp"
#include "tswap/io.hpp"
#include "tswap/tswap.hpp"

using namespace tswap;
namespace fs = std::filesystem;

namespace {

const char* kLineMap = "type octile\nheight 1\nwidth 6\nmap\n......\n";

int parse_error_line(const std::string& text) {
  try {
    read_instance(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Cells, ParseAndFormat) {
  EXPECT_EQ(parse_cell("3,4"), (Cell{3, 4}));
  EXPECT_FALSE(parse_cell("3").has_value());
  EXPECT_FALSE(parse_cell("3,x").has_value());
  EXPECT_FALSE(parse_cell("3,4,5").has_value());
  const auto g = fixtures::grid(4, 3);
  EXPECT_EQ(format_cell(*g, 6), "2,1");
  EXPECT_EQ(node_of_cell(*g, {2, 1}), 6);
  EXPECT_THROW(node_of_cell(*g, {4, 0}), InputError);
}

TEST(ReadInstance, MapFileWithExplicitCells) {
  fixtures::TempDir dir;
  write_file(dir.path() / "line6.map", kLineMap);
  write_file(dir.path() / "swap.inst", "# three agents\nmap line6.map\nstarts 2,0 3,0 4,0\ntargets 0,0 4,0 5,0\n");
  const auto inst = load_instance(dir.path() / "swap.inst");
  EXPECT_EQ(inst.starts(), (std::vector<Node>{2, 3, 4}));
  EXPECT_EQ(inst.targets(), (std::vector<Node>{0, 4, 5}));
  EXPECT_FALSE(inst.seed().has_value());
}

TEST(ReadInstance, InlineMapAndRandomAgents) {
  const std::string text = std::string("map inline\n") + kLineMap + "\nagents 3 targets 2 seed 7\n";
  const auto inst = read_instance(text);
  EXPECT_EQ(inst.graph().size(), 6u);
  EXPECT_EQ(inst.num_agents(), 3u);
  EXPECT_EQ(inst.num_targets(), 2u);
  EXPECT_EQ(*inst.seed(), 7u);
  const auto again = generate_random_instance(inst.graph_ptr(), 3, 2, 7);
  EXPECT_EQ(inst.starts(), again.starts());
  EXPECT_EQ(inst.targets(), again.targets());
}

TEST(ReadInstance, ErrorsCarryLineNumbers) {
  const std::string map = std::string("map inline\n") + kLineMap;  // lines 1..6
  EXPECT_EQ(parse_error_line(map + "starts 0,0\ntargets 9,0\n"), 8);
  EXPECT_EQ(parse_error_line(map + "agents 3 targets 2\n"), 7);
  EXPECT_EQ(parse_error_line(map + "agents 9 targets 2 seed 0\n"), 7);
  EXPECT_EQ(parse_error_line(map + "teleport 1\n"), 7);
  EXPECT_EQ(parse_error_line(map + "starts 0;0\ntargets 1,0\n"), 7);
  EXPECT_EQ(parse_error_line("map inline\ntype octile\nheight 1\nwidth 6\nmap\n.....\nstarts 0,0\n"), 6);
  EXPECT_EQ(parse_error_line("nomap here\n"), 1);
  EXPECT_EQ(parse_error_line(""), 1);
  EXPECT_THROW(read_instance(map + "starts 0,0\n"), ParseError);
}

TEST(ReadInstance, InvalidSetsAreInputErrors) {
  const std::string map = std::string("map inline\n") + kLineMap;
  EXPECT_THROW(read_instance(map + "starts 0,0 0,0\ntargets 1,0\n"), InputError);
  EXPECT_THROW(read_instance(map + "starts 0,0\ntargets 1,0 2,0\n"), InputError);
}

TEST(ReadInstance, MissingMapFile) {
  EXPECT_THROW(read_instance("map /nonexistent/dir/x.map\nstarts 0,0\ntargets 0,0\n"), InputError);
}

TEST(WriteInstance, RoundTrip) {
  fixtures::TempDir dir;
  write_file(dir.path() / "m.map", write_grid_map(generate_random_grid(9, 7, 0.2, 4)));
  const auto map = load_map(dir.path() / "m.map");
  const auto inst = generate_random_instance(map.graph, 6, 4, 2);
  write_file(dir.path() / "i.inst", write_instance(inst, "m.map"));
  const auto back = load_instance(dir.path() / "i.inst");
  EXPECT_EQ(back.starts(), inst.starts());
  EXPECT_EQ(back.targets(), inst.targets());
}

TEST(Plan, CsvRoundTrip) {
  const Plan plan{{{1, 2, 2}, {2, 3, 4}}};
  const Metrics m{2, 3, 2, 3};
  const auto text = write_plan(plan, m);
  EXPECT_EQ(text, "# makespan=2 sum_of_costs=3 maximum_moves=2 sum_of_moves=3\nt,a0,a1\n0,1,2\n1,2,3\n2,2,4\n");
  EXPECT_EQ(read_plan(text).paths, plan.paths);
  EXPECT_EQ(read_plan(write_plan(plan)).paths, plan.paths);
}

TEST(Plan, MalformedCsv) {
  EXPECT_THROW(read_plan(""), ParseError);
  EXPECT_THROW(read_plan("t,a0\n"), ParseError);
  EXPECT_THROW(read_plan("x,a0\n0,1\n"), ParseError);
  try {
    read_plan("t,a0,a1\n0,1,2\n1,2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(read_plan("t,a0\n1,1\n"), ParseError);
  EXPECT_THROW(read_plan("t,a0\n0,q\n"), ParseError);
}

TEST(ResultRow, CsvRoundTrip) {
  ResultRow ok{"maps/a.map", 30, 4, "tswap", "alg2", Metrics{10, 200, 9, 150}, 12.5, 9, "ok"};
  EXPECT_EQ(ok.to_csv(), "maps/a.map,30,4,tswap,alg2,10,200,9,150,12.5,9,ok");
  const auto back = ResultRow::from_csv(ok.to_csv());
  EXPECT_EQ(back.to_csv(), ok.to_csv());
  EXPECT_EQ(back.metrics, ok.metrics);

  ResultRow timeout{"m", 500, 1, "flow", "", std::nullopt, 300000, std::nullopt, "timeout"};
  EXPECT_EQ(timeout.to_csv(), "m,500,1,flow,,,,,,300000,,timeout");
  const auto tb = ResultRow::from_csv(timeout.to_csv());
  EXPECT_FALSE(tb.metrics.has_value());
  EXPECT_FALSE(tb.lower_bound.has_value());
  EXPECT_EQ(tb.status, "timeout");

  EXPECT_THROW(ResultRow::from_csv("a,b,c"), ParseError);
  EXPECT_THROW(ResultRow::from_csv("m,1,x,s,a,,,,,1,,ok"), ParseError);
  EXPECT_EQ(std::count(ResultRow::kHeader.begin(), ResultRow::kHeader.end(), ','), 11);
}

TEST(Assignment, TextExport) {
  const auto inst = fixtures::swap_line();
  Assignment a;
  a.goals = fixtures::swap_line_goals();
  a.bottleneck_cost = 2;
  a.total_cost = 4;
  EXPECT_EQ(write_assignment(inst, a),
            "2,0 -> 0,0 dist=2\n3,0 -> 5,0 dist=2\n4,0 -> 4,0 dist=0\nbottleneck=2 total=4\n");
}
