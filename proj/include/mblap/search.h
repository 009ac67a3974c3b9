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

// Upper-level search: every budget-feasible investment decision is either
// evaluated exactly through the lower level or discarded by an admissible
// test (capacity sufficiency, or a cost bound no better than the incumbent).
//
// Decisions are enumerated depth-first over the bases in id order, plans in
// ascending id with plan 0 first. Evaluations may run on several threads;
// the result does not depend on scheduling. Among decisions whose totals
// agree within 1e-9 relative the lexicographically smallest plan vector (in
// base id order) wins.

#ifndef MBLAP_SEARCH_H_
#define MBLAP_SEARCH_H_

#include <functional>
#include <string>
#include <vector>

#include "mblap/allocation.h"
#include "mblap/decision.h"
#include "mblap/derivation.h"
#include "mblap/scenario.h"

namespace mblap {

// Calls `visit` for each decision with total investment <= budget (1e-9
// relative slack), in enumeration order. Returns the number of branches cut
// by the budget.
long ForEachDecision(const Scenario& s,
                     const std::function<void(const InvestmentDecision&)>& visit);

std::vector<InvestmentDecision> EnumerateDecisions(const Scenario& s);

// Sum over demand cells of N times the cheapest unit cost at any base that is
// capable under some plan (or initially). +inf when a cell with demand has
// no such base.
double DispatchLowerBound(const Scenario& s, const DemandTable& demand);

enum class SolveStatus { kOptimal, kInfeasible, kUnproven };

const char* SolveStatusName(SolveStatus status);

struct SearchStats {
  long enumerated = 0;          // budget-feasible decisions
  long pruned_by_budget = 0;    // branches cut during enumeration
  long pruned_by_capacity = 0;  // decisions failing the sufficiency test
  long pruned_by_bound = 0;     // decisions whose bound reached the incumbent
  long lower_level_solves = 0;
  long lower_level_nodes = 0;
  double wall_seconds = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kInfeasible;
  InvestmentDecision decision;
  AllocationPlan allocation;
  DemandTable demand;
  double total_investment = 0.0;
  double annualized_investment = 0.0;
  double dispatch_cost = 0.0;
  double maint_cost = 0.0;
  double z_lower = 0.0;
  double z_upper = 0.0;
  SearchStats stats;
  // Demand cells that cannot be served (infeasible results only).
  std::vector<DemandCell> uncovered;
  std::string detail;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

struct SearchOptions {
  int workers = 0;  // 0 = hardware concurrency
  bool pruning = true;
  double time_limit_seconds = 0.0;  // whole search; 0 = none
  AllocationOptions allocation;     // per lower-level solve (cutoff ignored)
};

SolveReport SolveMblap(const Scenario& s, const SearchOptions& options = {});

struct EvaluateOptions {
  bool enforce_budget = false;
  AllocationOptions allocation;
};

// Costs of exactly this decision. Throws std::invalid_argument when the
// decision does not fit the scenario.
SolveReport EvaluateDecision(const Scenario& s, const InvestmentDecision& decision,
                             const EvaluateOptions& options = {});

}  // namespace mblap

#endif  // MBLAP_SEARCH_H_
