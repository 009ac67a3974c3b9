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

#include <cmath>
#include <random>
#include <stdexcept>

#include "mblap/allocation.h"
#include "mblap/derivation.h"
#include "test_support.h"

namespace mblap {
namespace {

constexpr int kHami = 1;
constexpr int kXian = 6;

// Two depots, two bases, one CRH type. Level III capacity is 2 sets at B1 and
// 4 sets at B2; each depot prefers its own base.
Scenario TwoByTwo() {
  Scenario s;
  s.meta.name = "two-by-two";
  GlobalParams& g = s.globals;
  g.empty_run_cost_rmb_per_km = 1000.0;
  g.dispatch_legs = 1;
  g.interest_rate = 0.05;
  g.budget = 1e9;
  g.working_days = 60.0;
  g.duration_days["CRH"] = {{3, 30.0}, {4, 45.0}, {5, 56.25}};
  g.maint_cost_ref["CRH"] = {{3, 1.0}, {4, 3.0}, {5, 6.0}};
  s.emu_types.push_back({1, "T1", "CRH", 1, 100000.0, {100000.0, 200000.0, 400000.0}});
  s.depots.push_back({1, "D1", {{1, 1}}});
  s.depots.push_back({2, "D2", {{1, 1}}});
  for (int j = 0; j < 2; ++j) {
    Base b;
    b.id = j + 1;
    b.name = "B" + std::to_string(j + 1);
    CapacityPool low{"III", {{"CRH", {}, 3, 1.0}}, j + 1, std::nullopt, std::nullopt};
    CapacityPool high{"IVV", {{"CRH", {}, 4, 1.0}, {"CRH", {}, 5, 1.25}}, 0, std::nullopt,
                      std::nullopt};
    b.pools = {low, high};
    s.bases.push_back(b);
  }
  s.distances = {{100.0, 500.0}, {500.0, 0.0}};
  return s;
}

DemandTable TwoByTwoDemand(const Scenario& s, int d1, int d2) {
  DemandTable t(static_cast<int>(s.depots.size()), static_cast<int>(s.emu_types.size()));
  t.set(0, 0, 3, d1, d1);
  t.set(1, 0, 3, d2, d2);
  return t;
}

InvestmentDecision RandomDecision(const Scenario& s, std::mt19937_64& rng) {
  InvestmentDecision d = InvestmentDecision::None(s);
  for (std::size_t j = 0; j < s.bases.size(); ++j) {
    const int plans = static_cast<int>(s.bases[j].plans.size());
    const int pick = std::uniform_int_distribution<int>(0, plans)(rng);
    d.plan[j] = pick == 0 ? 0 : s.bases[j].plans[pick - 1].id;
  }
  return d;
}

TEST(AllocationExampleTest, CapacityForcesUniqueSplit) {
  const Scenario s = TwoByTwo();
  ASSERT_TRUE(Validate(s).empty());
  const LowerModel model = BuildLowerModel(s, TwoByTwoDemand(s, 3, 1), InvestmentDecision::None(s));
  EXPECT_EQ(model.demand_rows.size(), 2u);
  EXPECT_EQ(model.pool_rows.size(), 2u);
  const AllocationPlan plan = SolveAllocation(s, model);
  ASSERT_EQ(plan.status, AllocationStatus::kOptimal);
  const std::vector<Flow> expected = {{0, 0, 0, 3, 2}, {0, 1, 0, 3, 1}, {1, 1, 0, 3, 1}};
  EXPECT_EQ(plan.flows, expected);
  EXPECT_NEAR(plan.cost.dispatch, 0.7, 1e-9);
  EXPECT_NEAR(plan.cost.maintenance, 4.0, 1e-9);
  EXPECT_NEAR(plan.cost.total, 4.7, 1e-9);
  EXPECT_EQ(plan.BaseTotal(0), 2);
  EXPECT_EQ(plan.BaseTotal(1), 2);
  EXPECT_EQ(plan.workload[0][0][LevelIndex(3)], 2);
  EXPECT_TRUE(AuditAllocation(s, model, plan).empty());
}

TEST(AllocationExampleTest, OverCapacityIsInfeasible) {
  const Scenario s = TwoByTwo();
  const LowerModel model = BuildLowerModel(s, TwoByTwoDemand(s, 5, 2), InvestmentDecision::None(s));
  EXPECT_FALSE(model.InfeasibleByConstruction());
  EXPECT_EQ(SolveAllocation(s, model).status, AllocationStatus::kInfeasible);
}

TEST(AllocationExampleTest, ZeroDemand) {
  const Scenario s = TwoByTwo();
  const LowerModel model = BuildLowerModel(s, TwoByTwoDemand(s, 0, 0), InvestmentDecision::None(s));
  EXPECT_TRUE(model.demand_rows.empty());
  const AllocationPlan plan = SolveAllocation(s, model);
  ASSERT_EQ(plan.status, AllocationStatus::kOptimal);
  EXPECT_TRUE(plan.flows.empty());
  EXPECT_EQ(plan.cost.total, 0.0);
}

TEST(AllocationExampleTest, CutoffBelowOptimum) {
  const Scenario s = TwoByTwo();
  const LowerModel model = BuildLowerModel(s, TwoByTwoDemand(s, 3, 1), InvestmentDecision::None(s));
  AllocationOptions options;
  options.cutoff = 4.0;
  EXPECT_EQ(SolveAllocation(s, model, options).status, AllocationStatus::kCutoff);
  options.cutoff = 4.7;
  EXPECT_EQ(SolveAllocation(s, model, options).status, AllocationStatus::kOptimal);
}

TEST(AllocationExampleTest, RecomputeCostsFromFlows) {
  const Scenario s = TwoByTwo();
  const CostBreakdown c = RecomputeCosts(s, {{0, 1, 0, 3, 3}, {1, 1, 0, 3, 1}});
  EXPECT_NEAR(c.dispatch, 1.5, 1e-12);
  EXPECT_NEAR(c.maintenance, 4.0, 1e-12);
  EXPECT_NEAR(c.total, 5.5, 1e-12);
  EXPECT_THROW(RecomputeCosts(s, {{0, 7, 0, 3, 1}}), std::out_of_range);
}

TEST(AllocationBundledTest, HamiAndXianPlanEight) {
  const Scenario s = testing::LoadBundled();
  const DemandTable demand = DeriveDemand(s);
  InvestmentDecision d = InvestmentDecision::None(s);
  d.plan[kHami] = 8;
  d.plan[kXian] = 8;
  const LowerModel model = BuildLowerModel(s, demand, d);
  EXPECT_FALSE(model.InfeasibleByConstruction());
  ASSERT_EQ(model.pool_rows.size(), 8u);
  for (const PoolRow& row : model.pool_rows) {
    EXPECT_TRUE(row.base == kHami || row.base == kXian);
    EXPECT_GT(row.capacity, 0.0);
  }
  int cells = 0;
  for (int i = 0; i < demand.num_depots(); ++i) {
    for (int e = 0; e < demand.num_types(); ++e) {
      for (int level : kLevels) cells += demand.n(i, e, level) > 0 ? 1 : 0;
    }
  }
  EXPECT_EQ(static_cast<int>(model.demand_rows.size()), cells);
  for (const DemandRow& row : model.demand_rows) {
    EXPECT_EQ(row.columns.size(), 2u);
  }

  const AllocationPlan plan = SolveAllocation(s, model);
  ASSERT_EQ(plan.status, AllocationStatus::kOptimal);
  EXPECT_EQ(plan.BaseTotal(kHami) + plan.BaseTotal(kXian), 194);
  EXPECT_LE(plan.root_bound, plan.cost.total + 1e-9);
  const CostBreakdown again = RecomputeCosts(s, plan.flows);
  EXPECT_NEAR(again.total, plan.cost.total, 1e-9);
  EXPECT_TRUE(AuditAllocation(s, model, plan).empty());
  for (const PoolUsage& u : plan.pools) EXPECT_LE(u.load, u.capacity + 1e-9);
}

TEST(AllocationBundledTest, NoInvestmentLeavesCrDemandUncovered) {
  const Scenario s = testing::LoadBundled();
  const LowerModel model = BuildLowerModel(s, DeriveDemand(s), InvestmentDecision::None(s));
  ASSERT_TRUE(model.InfeasibleByConstruction());
  for (const DemandCell& c : model.uncovered) EXPECT_EQ(s.emu_types[c.type].series, "CR");
  const AllocationPlan plan = SolveAllocation(s, model);
  EXPECT_EQ(plan.status, AllocationStatus::kInfeasible);
  EXPECT_EQ(plan.uncovered, model.uncovered);
}

TEST(AllocationBundledTest, BadDecisionThrows) {
  const Scenario s = testing::LoadBundled();
  InvestmentDecision d = InvestmentDecision::None(s);
  d.plan[0] = 77;
  EXPECT_THROW(BuildLowerModel(s, DeriveDemand(s), d), std::invalid_argument);
}

TEST(AllocationPropertyTest, MatchesBruteForce) {
  std::mt19937_64 rng(424242);
  int feasible = 0;
  int infeasible = 0;
  for (int k = 0; k < 300; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::TinyLimits());
    const InvestmentDecision d = RandomDecision(s, rng);
    const std::optional<double> expected = testing::BruteForceLower(s, d);
    const LowerModel model = BuildLowerModel(s, DeriveDemand(s), d);
    const AllocationPlan plan = SolveAllocation(s, model);
    if (!expected) {
      ASSERT_EQ(plan.status, AllocationStatus::kInfeasible) << "instance " << k;
      ++infeasible;
      continue;
    }
    ASSERT_EQ(plan.status, AllocationStatus::kOptimal) << "instance " << k;
    EXPECT_NEAR(plan.cost.total, *expected, 1e-6 * std::max(1.0, *expected)) << "instance " << k;
    EXPECT_TRUE(AuditAllocation(s, model, plan).empty()) << "instance " << k;
    ++feasible;
  }
  EXPECT_GE(feasible, 50);
  EXPECT_GE(infeasible, 10);
}

TEST(AllocationPropertyTest, RelaxationBoundsAndGreedy) {
  std::mt19937_64 rng(77);
  int greedy_checked = 0;
  for (int k = 0; k < 300; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::MediumLimits());
    const InvestmentDecision d = RandomDecision(s, rng);
    const LowerModel model = BuildLowerModel(s, DeriveDemand(s), d);
    const AllocationPlan plan = SolveAllocation(s, model);
    const std::optional<CostBreakdown> greedy = GreedyAllocationCost(model);
    if (greedy) {
      ASSERT_EQ(plan.status, AllocationStatus::kOptimal) << "instance " << k;
      EXPECT_LE(plan.cost.total, greedy->total + 1e-9) << "instance " << k;
      ++greedy_checked;
    }
    if (plan.status != AllocationStatus::kOptimal) continue;
    EXPECT_LE(plan.root_bound, plan.cost.total + 1e-6) << "instance " << k;
  }
  EXPECT_GE(greedy_checked, 50);
}

TEST(AllocationPropertyTest, RemovingCapacityRowsNeverHurts) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::MediumLimits());
    const InvestmentDecision d = RandomDecision(s, rng);
    const LowerModel model = BuildLowerModel(s, DeriveDemand(s), d);
    const AllocationPlan plan = SolveAllocation(s, model);
    LowerModel relaxed = model;
    for (PoolRow& row : relaxed.pool_rows) row.capacity = kInf;
    const AllocationPlan free = SolveAllocation(s, relaxed);
    if (model.InfeasibleByConstruction()) {
      EXPECT_EQ(free.status, AllocationStatus::kInfeasible);
      continue;
    }
    ASSERT_EQ(free.status, AllocationStatus::kOptimal) << "instance " << k;
    if (plan.status == AllocationStatus::kOptimal) {
      EXPECT_LE(free.cost.total, plan.cost.total + 1e-9) << "instance " << k;
    }
    // Without capacity every cell goes to its cheapest capable base.
    double cheapest = 0.0;
    for (const DemandRow& row : relaxed.demand_rows) {
      double best = kInf;
      for (int c : row.columns) best = std::min(best, relaxed.columns[c].cost);
      cheapest += best * row.cell.n;
    }
    EXPECT_NEAR(free.cost.total, cheapest, 1e-6 * std::max(1.0, cheapest));
  }
}

TEST(AllocationPropertyTest, RowMergingIsExact) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 200; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::MediumLimits());
    const InvestmentDecision d = RandomDecision(s, rng);
    const LowerModel model = BuildLowerModel(s, DeriveDemand(s), d);
    AllocationOptions merged;
    AllocationOptions plain;
    plain.merge_rows = false;
    const AllocationPlan a = SolveAllocation(s, model, merged);
    const AllocationPlan b = SolveAllocation(s, model, plain);
    ASSERT_EQ(a.status, b.status) << "instance " << k;
    if (a.status != AllocationStatus::kOptimal) continue;
    EXPECT_NEAR(a.cost.total, b.cost.total, 1e-6 * std::max(1.0, a.cost.total))
        << "instance " << k;
    EXPECT_TRUE(AuditAllocation(s, model, b).empty());
  }
}

TEST(AllocationPropertyTest, Deterministic) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 100; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::MediumLimits());
    const InvestmentDecision d = RandomDecision(s, rng);
    const LowerModel model = BuildLowerModel(s, DeriveDemand(s), d);
    const AllocationPlan a = SolveAllocation(s, model);
    const AllocationPlan b = SolveAllocation(s, model);
    ASSERT_EQ(a.status, b.status);
    ASSERT_EQ(a.flows, b.flows);
    ASSERT_EQ(a.nodes, b.nodes);
  }
}

TEST(AllocationMiscTest, StatusNames) {
  EXPECT_STREQ(AllocationStatusName(AllocationStatus::kOptimal), "optimal");
  EXPECT_STREQ(AllocationStatusName(AllocationStatus::kInfeasible), "infeasible");
}

}  // namespace
}  // namespace mblap
