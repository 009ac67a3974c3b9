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

// Lower-level dispatch model for a fixed investment decision, and its exact
// integer solution by LP-based branch-and-bound.
//
// Columns exist only where the base is capable of the (type, level) under
// the decision. Each demand cell (depot, type, level) with N > 0 gives an
// equality row; each pool with positive capacity gives a row
//   theta * sum(conversion * f) <= capacity.

#ifndef MBLAP_ALLOCATION_H_
#define MBLAP_ALLOCATION_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mblap/decision.h"
#include "mblap/derivation.h"
#include "mblap/scenario.h"

namespace mblap {

struct DemandCell {
  int depot = 0;
  int type = 0;
  int level = kMinLevel;
  int n = 0;

  bool operator==(const DemandCell&) const = default;
};

struct LowerColumn {
  int depot = 0;
  int base = 0;
  int type = 0;
  int level = kMinLevel;
  double cost = 0.0;  // dispatch + maintenance, million RMB per set
  int pool_row = -1;  // index into LowerModel::pool_rows
  double load = 0.0;  // theta * conversion
};

struct DemandRow {
  DemandCell cell;
  std::vector<int> columns;
};

struct PoolRow {
  int base = 0;
  int pool = 0;  // index within the base
  double capacity = 0.0;  // +inf disables the row
  std::vector<int> columns;
};

struct LowerModel {
  double theta = 1.0;
  std::vector<LowerColumn> columns;
  std::vector<DemandRow> demand_rows;
  std::vector<PoolRow> pool_rows;
  // Cells with N > 0 that no capable base can serve.
  std::vector<DemandCell> uncovered;

  bool InfeasibleByConstruction() const { return !uncovered.empty(); }
};

// Throws std::invalid_argument for a decision that does not fit the scenario.
LowerModel BuildLowerModel(const Scenario& s, const DemandTable& demand,
                           const InvestmentDecision& decision);

enum class AllocationStatus {
  kOptimal,
  kInfeasible,
  kUnproven,         // limit reached with an incumbent
  kLimitNoSolution,  // limit reached before any integer solution
  kCutoff,           // no solution with cost <= cutoff exists
  kNumericFailure,
};

const char* AllocationStatusName(AllocationStatus status);

struct Flow {
  int depot = 0;
  int base = 0;
  int type = 0;
  int level = kMinLevel;
  int count = 0;

  bool operator==(const Flow&) const = default;
};

struct PoolUsage {
  int base = 0;
  int pool = 0;
  double capacity = 0.0;
  double load = 0.0;  // theta-scaled
  double utilization = 0.0;
};

struct CostBreakdown {
  double dispatch = 0.0;
  double maintenance = 0.0;
  double total = 0.0;
};

struct AllocationPlan {
  AllocationStatus status = AllocationStatus::kInfeasible;
  // Nonzero f, ordered by (depot, base, type, level).
  std::vector<Flow> flows;
  // workload[j][e][level index] = F_j^{eg}.
  std::vector<std::vector<std::array<int, kNumLevels>>> workload;
  CostBreakdown cost;
  std::vector<PoolUsage> pools;
  std::vector<DemandCell> uncovered;
  double root_bound = 0.0;  // LP relaxation value at the root
  long nodes = 0;
  std::string detail;

  bool HasSolution() const {
    return status == AllocationStatus::kOptimal ||
           status == AllocationStatus::kUnproven;
  }
  // Standard sets handled by base j over all types and levels.
  int BaseTotal(int base) const;
};

struct AllocationOptions {
  long node_limit = 1000000;
  double time_limit_seconds = 0.0;  // 0 = none
  // Stop early once no solution with cost <= cutoff can exist.
  std::optional<double> cutoff;
  // Merge demand rows that share the same column pattern (same cost, pool and
  // load per base) into one aggregate row. Exact; off only for testing.
  bool merge_rows = true;
};

AllocationPlan SolveAllocation(const Scenario& s, const LowerModel& model,
                               const AllocationOptions& options = {});

// Independent cost evaluation from raw scenario fields. Throws
// std::out_of_range on indices outside the scenario.
CostBreakdown RecomputeCosts(const Scenario& s, const std::vector<Flow>& flows);

// Checks flow balance, pool capacity, workload aggregation and the cost
// figures of `plan` against the model, records them in the audit tally and
// returns the failures (empty when clean).
std::vector<std::string> AuditAllocation(const Scenario& s, const LowerModel& model,
                                         const AllocationPlan& plan);

// Cheapest-feasible-base greedy, row by row in model order. Returns nullopt
// when it strands demand. Used as an upper reference in tests.
std::optional<CostBreakdown> GreedyAllocationCost(const LowerModel& model);

}  // namespace mblap

#endif  // MBLAP_ALLOCATION_H_
