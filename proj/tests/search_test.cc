// Copyright 2026 The MBLAP Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mblap/decision.h"
#include "mblap/derivation.h"
#include "mblap/search.h"
#include "test_support.h"

namespace mblap {
namespace {

constexpr int kHami = 1;
constexpr int kXian = 6;

// Two depots, two bases with two plans each. Plan costs: B1 {100, 300},
// B2 {200, 400}.
Scenario TwoBasesTwoPlans(double budget) {
  Scenario s;
  s.meta.name = "two-plans";
  GlobalParams& g = s.globals;
  g.empty_run_cost_rmb_per_km = 1000.0;
  g.dispatch_legs = 1;
  g.interest_rate = 0.05;
  g.budget = budget;
  g.working_days = 60.0;
  g.duration_days["CRH"] = {{3, 30.0}, {4, 45.0}, {5, 56.25}};
  g.maint_cost_ref["CRH"] = {{3, 1.0}, {4, 3.0}, {5, 6.0}};
  s.emu_types.push_back({1, "T1", "CRH", 1, 100000.0, {100000.0, 200000.0, 400000.0}});
  s.depots.push_back({1, "D1", {{1, 4}}});
  s.depots.push_back({2, "D2", {{1, 2}}});
  for (int j = 0; j < 2; ++j) {
    Base b;
    b.id = j + 1;
    b.name = "B" + std::to_string(j + 1);
    b.pools = {{"III", {{"CRH", {}, 3, 1.0}}, 1, std::nullopt, std::nullopt},
               {"IVV", {{"CRH", {}, 4, 1.0}, {"CRH", {}, 5, 1.25}}, 0, std::nullopt,
                std::nullopt}};
    const double unit = 100.0 * (j + 1);
    b.plans.push_back({1, PlanKind::kExpansion, unit, 20, {{"IVV", 3}}});
    b.plans.push_back({2, PlanKind::kExpansion, unit + 200.0, 20, {{"III", 1}, {"IVV", 6}}});
    s.bases.push_back(b);
  }
  s.distances = {{100.0, 300.0}, {400.0, 50.0}};
  return s;
}

std::vector<SolveReport> SolveBoth(const Scenario& s, SearchOptions a, SearchOptions b) {
  return {SolveMblap(s, a), SolveMblap(s, b)};
}

double Tol(double z) { return 1e-6 * std::max(1.0, std::fabs(z)); }

TEST(EnumerationTest, AllCombinationsInLexOrder) {
  const Scenario s = TwoBasesTwoPlans(1e9);
  ASSERT_TRUE(Validate(s).empty());
  const std::vector<InvestmentDecision> all = EnumerateDecisions(s);
  ASSERT_EQ(all.size(), 9u);
  EXPECT_EQ(all.front().plan, (std::vector<int>{0, 0}));
  EXPECT_EQ(all.back().plan, (std::vector<int>{2, 2}));
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());
}

TEST(EnumerationTest, BudgetCutsBranches) {
  const Scenario s = TwoBasesTwoPlans(350.0);
  const std::vector<InvestmentDecision> all = EnumerateDecisions(s);
  // Affordable: 00, 01, 02(400)x, 10, 11(300), 12x, 20(300), 21x, 22x.
  const std::vector<InvestmentDecision> expected = {
      {{0, 0}}, {{0, 1}}, {{1, 0}}, {{1, 1}}, {{2, 0}}};
  EXPECT_EQ(all, expected);
  long visited = 0;
  const long cut = ForEachDecision(s, [&](const InvestmentDecision&) { ++visited; });
  EXPECT_EQ(visited, 5);
  EXPECT_GT(cut, 0);
}

TEST(EnumerationTest, BudgetBelowCheapestPlanLeavesZeroDecision) {
  const Scenario s = TwoBasesTwoPlans(99.0);
  const std::vector<InvestmentDecision> all = EnumerateDecisions(s);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0], InvestmentDecision::None(s));
}

TEST(EnumerationTest, BundledCountAndBudget) {
  const Scenario s = testing::LoadBundled();
  long count = 0;
  double worst = 0.0;
  ForEachDecision(s, [&](const InvestmentDecision& d) {
    ++count;
    worst = std::max(worst, TotalInvestment(s, d));
  });
  EXPECT_EQ(count, 25009);
  EXPECT_LE(worst, s.globals.budget * (1.0 + 1e-9));
}

TEST(DispatchLowerBoundTest, CheapestCapableBasePerCell) {
  const Scenario s = TwoBasesTwoPlans(1e9);
  const DemandTable demand = DeriveDemand(s);
  double expected = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int level : kLevels) {
      const int n = demand.n(i, 0, level);
      const double best = std::min(s.distances[i][0], s.distances[i][1]) * 1000.0 / 1e6 +
                          s.globals.maint_cost_ref.at("CRH").at(level);
      expected += n * best;
    }
  }
  EXPECT_NEAR(DispatchLowerBound(s, demand), expected, 1e-9);
}

TEST(DispatchLowerBoundTest, UncoverableCellGivesInfinity) {
  Scenario s = TwoBasesTwoPlans(1e9);
  for (Base& b : s.bases) {
    for (ConstructionPlan& p : b.plans) p.added_positions = {{"III", 1}};
  }
  EXPECT_EQ(DispatchLowerBound(s, DeriveDemand(s)), kInf);
  const SolveReport r = SolveMblap(s);
  EXPECT_EQ(r.status, SolveStatus::kInfeasible);
  EXPECT_FALSE(r.uncovered.empty());
}

TEST(DispatchLowerBoundTest, BoundsBundledLowerLevel) {
  const Scenario s = testing::LoadBundled();
  InvestmentDecision d = InvestmentDecision::None(s);
  d.plan[kHami] = 8;
  d.plan[kXian] = 8;
  const SolveReport r = EvaluateDecision(s, d);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_LE(DispatchLowerBound(s, r.demand), r.z_lower + 1e-9);
}

TEST(SearchExampleTest, SmallInstanceMatchesBruteForce) {
  const Scenario s = TwoBasesTwoPlans(1e9);
  const SolveReport r = SolveMblap(s);
  const testing::BruteForceResult bf = testing::BruteForceUpper(s);
  ASSERT_TRUE(bf.feasible);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.z_upper, bf.z_upper, Tol(bf.z_upper));
  EXPECT_NEAR(r.z_upper, r.annualized_investment + r.z_lower, 1e-9);
  EXPECT_NEAR(r.z_lower, r.dispatch_cost + r.maint_cost, 1e-9);
  EXPECT_EQ(r.stats.enumerated, 9);
}

TEST(SearchExampleTest, EvaluateRejectsOverBudgetWhenAsked) {
  const Scenario s = TwoBasesTwoPlans(350.0);
  const InvestmentDecision d{{2, 2}};
  EvaluateOptions lax;
  EXPECT_EQ(EvaluateDecision(s, d, lax).status, SolveStatus::kOptimal);
  EvaluateOptions strict;
  strict.enforce_budget = true;
  EXPECT_EQ(EvaluateDecision(s, d, strict).status, SolveStatus::kInfeasible);
  EXPECT_THROW(EvaluateDecision(s, InvestmentDecision{{3, 0}}), std::invalid_argument);
}

TEST(SearchExampleTest, NodeLimitReportsUnproven) {
  const Scenario s = testing::LoadBundled();
  InvestmentDecision d = InvestmentDecision::None(s);
  d.plan[kHami] = 8;
  d.plan[kXian] = 8;
  EvaluateOptions options;
  options.allocation.node_limit = 1;
  const SolveReport r = EvaluateDecision(s, d, options);
  EXPECT_NE(r.status, SolveStatus::kOptimal);
}

TEST(SearchBundledTest, OptimalDecisionBuildsHamiAndXian) {
  const Scenario s = testing::LoadBundled();
  const SolveReport r = SolveMblap(s);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(FormatDecision(s, r.decision), "Hami=8 Xi'an=8");
  EXPECT_EQ(r.stats.enumerated, 25009);
  EXPECT_LE(r.total_investment, s.globals.budget);
  EXPECT_NEAR(r.z_upper, r.annualized_investment + r.dispatch_cost + r.maint_cost, 1e-9);
  const SolveReport again = EvaluateDecision(s, r.decision);
  EXPECT_NEAR(again.z_upper, r.z_upper, 1e-9);
}

TEST(SearchPropertyTest, MatchesBruteForceOnTinyInstances) {
  std::mt19937_64 rng(1001);
  int feasible = 0;
  for (int k = 0; k < 150; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::TinyLimits());
    const testing::BruteForceResult bf = testing::BruteForceUpper(s);
    SearchOptions options;
    options.workers = 1;
    const SolveReport r = SolveMblap(s, options);
    ASSERT_EQ(r.status == SolveStatus::kOptimal, bf.feasible) << "instance " << k;
    if (!bf.feasible) continue;
    ++feasible;
    EXPECT_NEAR(r.z_upper, bf.z_upper, Tol(bf.z_upper)) << "instance " << k;
    const std::optional<double> lower = testing::BruteForceLower(s, r.decision);
    ASSERT_TRUE(lower.has_value());
    EXPECT_NEAR(r.z_lower, *lower, Tol(*lower)) << "instance " << k;
  }
  EXPECT_GE(feasible, 40);
}

TEST(SearchPropertyTest, PruningDoesNotChangeTheAnswer) {
  std::mt19937_64 rng(2002);
  for (int k = 0; k < 60; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::MediumLimits());
    SearchOptions on;
    SearchOptions off;
    off.pruning = false;
    const auto r = SolveBoth(s, on, off);
    ASSERT_EQ(r[0].status, r[1].status) << "instance " << k;
    if (!r[0].optimal()) continue;
    EXPECT_NEAR(r[0].z_upper, r[1].z_upper, Tol(r[0].z_upper)) << "instance " << k;
    EXPECT_EQ(r[0].decision, r[1].decision) << "instance " << k;
    EXPECT_EQ(r[1].stats.pruned_by_bound, 0);
    EXPECT_EQ(r[1].stats.pruned_by_capacity, 0);
  }
}

TEST(SearchPropertyTest, WorkerCountDoesNotChangeTheAnswer) {
  std::mt19937_64 rng(3003);
  for (int k = 0; k < 60; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::MediumLimits());
    SearchOptions one;
    one.workers = 1;
    SearchOptions many;
    many.workers = 4;
    const auto r = SolveBoth(s, one, many);
    ASSERT_EQ(r[0].status, r[1].status) << "instance " << k;
    EXPECT_EQ(r[0].decision, r[1].decision) << "instance " << k;
    EXPECT_EQ(r[0].z_upper, r[1].z_upper) << "instance " << k;
    EXPECT_EQ(r[0].allocation.flows, r[1].allocation.flows) << "instance " << k;
  }
}

TEST(SearchPropertyTest, LargerBudgetNeverCostsMore) {
  std::mt19937_64 rng(4004);
  for (int k = 0; k < 60; ++k) {
    Scenario s = testing::RandomScenario(rng, testing::MediumLimits());
    s.globals.budget = std::min(s.globals.budget, 1500.0);
    const SolveReport tight = SolveMblap(s);
    s.globals.budget *= 2.0;
    const SolveReport loose = SolveMblap(s);
    if (tight.optimal()) {
      ASSERT_TRUE(loose.optimal()) << "instance " << k;
      EXPECT_LE(loose.z_upper, tight.z_upper + Tol(tight.z_upper)) << "instance " << k;
    }
  }
}

TEST(SearchPropertyTest, DecompositionIsConsistent) {
  std::mt19937_64 rng(5005);
  for (int k = 0; k < 60; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::MediumLimits());
    const SolveReport r = SolveMblap(s);
    if (!r.optimal()) continue;
    EXPECT_NEAR(r.total_investment, TotalInvestment(s, r.decision), 1e-9);
    EXPECT_NEAR(r.annualized_investment, AnnualizedInvestment(s, r.decision), 1e-9);
    EXPECT_NEAR(r.z_upper, r.annualized_investment + r.z_lower, 1e-9);
    EXPECT_NEAR(r.z_lower, r.allocation.cost.total, 1e-9);
    EXPECT_LE(r.total_investment, s.globals.budget * (1.0 + 1e-9));
    const SolveReport again = EvaluateDecision(s, r.decision);
    EXPECT_NEAR(again.z_upper, r.z_upper, Tol(r.z_upper)) << "instance " << k;
  }
}

TEST(SearchPropertyTest, OptimumBeatsEveryEvaluatedDecision) {
  std::mt19937_64 rng(6006);
  for (int k = 0; k < 40; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::MediumLimits());
    const SolveReport r = SolveMblap(s);
    if (!r.optimal()) continue;
    // Includes the no-investment decision, which costs nothing to build.
    for (const InvestmentDecision& d : EnumerateDecisions(s)) {
      const SolveReport e = EvaluateDecision(s, d);
      if (!e.optimal()) continue;
      EXPECT_GE(e.z_upper, r.z_upper - Tol(r.z_upper)) << "instance " << k;
    }
  }
}

TEST(SearchMiscTest, StatusNames) {
  EXPECT_STREQ(SolveStatusName(SolveStatus::kOptimal), "optimal");
  EXPECT_STREQ(SolveStatusName(SolveStatus::kInfeasible), "infeasible");
  EXPECT_STREQ(SolveStatusName(SolveStatus::kUnproven), "unproven");
}

}  // namespace
}  // namespace mblap
