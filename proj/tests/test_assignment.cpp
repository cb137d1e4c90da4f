#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "tswap/assignment.hpp"

using namespace tswap;

namespace {

// Goals are distinct, every target is taken, and surplus agents sit on non-targets.
void expect_well_formed(const Instance& inst, const Assignment& a) {
  ASSERT_EQ(a.goals.size(), inst.num_agents());
  std::vector<int> used(inst.graph().size(), 0);
  for (Node g : a.goals) {
    ASSERT_TRUE(inst.graph().contains(g));
    ASSERT_EQ(used[g]++, 0);
  }
  for (Node t : inst.targets()) ASSERT_EQ(used[t], 1);
}

struct Costs {
  int bottleneck = 0;
  long long total = 0;
};

Costs target_costs(const Instance& inst, const Assignment& a) {
  const auto d = oracle::all_pairs(inst.graph());
  const auto mask = inst.target_mask();
  Costs c;
  for (std::size_t i = 0; i < a.goals.size(); ++i) {
    if (!mask[a.goals[i]]) continue;
    c.bottleneck = std::max(c.bottleneck, d[inst.starts()[i]][a.goals[i]]);
    c.total += d[inst.starts()[i]][a.goals[i]];
  }
  return c;
}

// Minimum total distance among target maps whose longest pair is <= cap.
long long brute_min_total_capped(const Instance& inst, int cap) {
  const auto d = oracle::all_pairs(inst.graph());
  std::vector<std::size_t> perm(inst.num_agents());
  std::iota(perm.begin(), perm.end(), 0);
  long long best = std::numeric_limits<long long>::max();
  do {
    long long t = 0;
    bool ok = true;
    for (std::size_t k = 0; k < inst.num_targets(); ++k) {
      const int dist = d[inst.starts()[perm[k]]][inst.targets()[k]];
      ok = ok && dist <= cap;
      t += dist;
    }
    if (ok) best = std::min(best, t);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Instance small_random(std::uint64_t seed, bool surplus) {
  const auto g = fixtures::random_grid(6, 6, 0.2, seed);
  const std::size_t n = 2 + seed % 5;  // 2..6 agents
  const std::size_t m = surplus ? std::max<std::size_t>(1, n - 1 - seed % 2) : n;
  return generate_random_instance(g, n, m, seed * 7 + 1);
}

}  // namespace

TEST(Bottleneck, SwapLineCosts) {
  const auto inst = fixtures::swap_line();
  for (bool lazy : {true, false}) {
    const auto a = assign_bottleneck(inst, false, lazy);
    expect_well_formed(inst, a);
    EXPECT_EQ(a.bottleneck_cost, 2);
    EXPECT_EQ(a.goals, (std::vector<Node>{0, 4, 5}));
    // with the min-cost pass: s1->g1, s2->g3, s3->g2
    const auto b = assign_bottleneck(inst, true, lazy);
    EXPECT_EQ(b.bottleneck_cost, 2);
    EXPECT_EQ(b.total_cost, 4);
    EXPECT_EQ(b.goals, fixtures::swap_line_goals());
  }
}

TEST(Bottleneck, MatchesPermutationBruteForce) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    for (bool surplus : {false, true}) {
      const auto inst = small_random(seed, surplus);
      const auto brute = oracle::brute_force_assignment(inst);
      for (bool lazy : {true, false}) {
        const auto a = assign_bottleneck(inst, false, lazy);
        expect_well_formed(inst, a);
        ASSERT_EQ(a.bottleneck_cost, brute.bottleneck) << "seed " << seed;
        ASSERT_EQ(target_costs(inst, a).bottleneck, brute.bottleneck);
        const auto b = assign_bottleneck(inst, true, lazy);
        expect_well_formed(inst, b);
        ASSERT_EQ(b.bottleneck_cost, brute.bottleneck);
        ASSERT_EQ(b.total_cost, brute_min_total_capped(inst, brute.bottleneck));
        ASSERT_EQ(target_costs(inst, b).total, b.total_cost);
      }
    }
  }
}

TEST(Bottleneck, LazyAndEagerAgreeAndLazyExpandsLess) {
  const auto g = fixtures::random_grid(32, 32, 0.2, 11);
  const auto inst = generate_random_instance(g, 60, 60, 5);
  const auto lazy = assign_bottleneck(inst, true, true);
  const auto eager = assign_bottleneck(inst, true, false);
  EXPECT_EQ(lazy.bottleneck_cost, eager.bottleneck_cost);
  EXPECT_EQ(lazy.total_cost, eager.total_cost);
  EXPECT_LT(lazy.expansions, eager.expansions);
}

TEST(Bottleneck, StartsOnTargetsCostZero) {
  const auto g = fixtures::grid(4, 4);
  const Instance inst(g, {3, 5, 9}, {9, 3, 5});
  const auto a = assign_bottleneck(inst, true);
  EXPECT_EQ(a.bottleneck_cost, 0);
  EXPECT_EQ(a.total_cost, 0);
  EXPECT_EQ(a.goals, (std::vector<Node>{3, 5, 9}));
}

TEST(LinearAssignment, MatchesPermutationBruteForce) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    for (bool surplus : {false, true}) {
      const auto inst = small_random(seed, surplus);
      const auto a = assign_optimal_linear(inst);
      expect_well_formed(inst, a);
      ASSERT_EQ(a.total_cost, oracle::brute_force_assignment(inst).total) << "seed " << seed;
    }
  }
}

TEST(GreedyRefined, LineExampleRefinesToOptimum) {
  const auto g = fixtures::line(7);
  const Instance inst(g, {0, 1}, {2, 6});
  for (bool lazy : {true, false}) {
    const auto a = assign_greedy_refined(inst, Objective::makespan, lazy);
    EXPECT_EQ(a.goals, (std::vector<Node>{2, 6}));
    EXPECT_EQ(a.bottleneck_cost, 5);
    EXPECT_EQ(a.bottleneck_cost, oracle::brute_force_assignment(inst).bottleneck);
  }
}

TEST(GreedyRefined, NaiveGreedyOnLineIsWorse) {
  const auto g = fixtures::line(7);
  const Instance inst(g, {0, 1}, {2, 6});
  const auto a = assign_naive_greedy(inst);
  EXPECT_EQ(a.goals, (std::vector<Node>{6, 2}));
  EXPECT_EQ(a.bottleneck_cost, 6);
}

TEST(GreedyRefined, WellFormedAndBoundedByOptimum) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    for (bool surplus : {false, true}) {
      const auto inst = small_random(seed, surplus);
      const auto brute = oracle::brute_force_assignment(inst);
      const auto ms = assign_greedy_refined(inst, Objective::makespan);
      const auto soc = assign_greedy_refined(inst, Objective::sum_of_costs);
      expect_well_formed(inst, ms);
      expect_well_formed(inst, soc);
      ASSERT_GE(ms.bottleneck_cost, brute.bottleneck);
      ASSERT_GE(soc.total_cost, brute.total);
      ASSERT_EQ(target_costs(inst, ms).bottleneck, ms.bottleneck_cost);
      ASSERT_EQ(target_costs(inst, soc).total, soc.total_cost);
    }
  }
}

TEST(GreedyRefined, SumOfCostsResultIsPairwiseSwapStable) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = fixtures::random_grid(12, 12, 0.2, seed);
    const auto inst = generate_random_instance(g, 15, 15, seed);
    const auto d = oracle::all_pairs(*g);
    const auto a = assign_greedy_refined(inst, Objective::sum_of_costs);
    const auto& S = inst.starts();
    for (std::size_t i = 0; i < S.size(); ++i) {
      for (std::size_t j = i + 1; j < S.size(); ++j) {
        const int now = d[S[i]][a.goals[i]] + d[S[j]][a.goals[j]];
        const int swapped = d[S[i]][a.goals[j]] + d[S[j]][a.goals[i]];
        ASSERT_LE(now, swapped);
      }
    }
  }
}

TEST(GreedyRefined, LazyAndEagerAgree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = fixtures::random_grid(20, 20, 0.2, seed);
    const auto inst = generate_random_instance(g, 30, 25, seed);
    for (auto obj : {Objective::makespan, Objective::sum_of_costs}) {
      const auto lazy = assign_greedy_refined(inst, obj, true);
      const auto eager = assign_greedy_refined(inst, obj, false);
      ASSERT_EQ(lazy.goals, eager.goals);
      ASSERT_EQ(lazy.bottleneck_cost, eager.bottleneck_cost);
      ASSERT_EQ(lazy.total_cost, eager.total_cost);
      ASSERT_LE(lazy.expansions, eager.expansions);
    }
  }
}

TEST(NaiveGreedy, WellFormed) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = small_random(seed, seed % 2 == 1);
    expect_well_formed(inst, assign_naive_greedy(inst));
  }
}

TEST(ParkSurplus, OwnStartWhenNotATarget) {
  const auto g = fixtures::line(5);
  const Instance inst(g, {0, 1, 4}, {2});
  const auto a = assign_bottleneck(inst, false);
  EXPECT_EQ(a.goals, (std::vector<Node>{0, 2, 4}));
}

TEST(ParkSurplus, NearestFreeNonTargetWhenStartIsATarget) {
  const auto g = fixtures::line(5);
  const Instance inst(g, {1, 2}, {1});
  Assignment partial;
  partial.goals = {kNoNode, 1};
  // nodes 0 and 2 are equally near; the smaller id wins
  EXPECT_EQ(park_surplus_agents(inst, partial).goals, (std::vector<Node>{0, 1}));
}

TEST(ParkSurplus, OwnStartsAreReservedFirst) {
  const auto g = fixtures::line(4);
  const Instance inst(g, {0, 1, 2}, {0});
  Assignment partial;
  partial.goals = {kNoNode, kNoNode, 0};
  // agent 1 keeps node 1, so agent 0 has to go two steps to node 2
  EXPECT_EQ(park_surplus_agents(inst, partial).goals, (std::vector<Node>{2, 1, 0}));
}

TEST(ParkSurplus, RejectsPartialThatMissesATarget) {
  const auto g = fixtures::line(3);
  const Instance inst(g, {0, 1}, {2});
  Assignment partial;
  partial.goals = {kNoNode, kNoNode};
  EXPECT_THROW(park_surplus_agents(inst, partial), ContractError);
}

TEST(AssignAlgorithm, NamesRoundTrip) {
  for (const char* name : {"alg2", "alg2dagger", "alg3", "alg5", "naive", "linear"}) {
    const auto a = parse_assign_algorithm(name);
    ASSERT_TRUE(a.has_value());
    EXPECT_EQ(to_string(*a), name);
  }
  EXPECT_FALSE(parse_assign_algorithm("hungarian").has_value());
}
