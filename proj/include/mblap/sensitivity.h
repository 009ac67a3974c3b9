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

// One-factor sweeps: fleet size, mileage cycles or maintenance durations are
// scaled by each multiplier and the full problem is re-solved with a relaxed
// budget.

#ifndef MBLAP_SENSITIVITY_H_
#define MBLAP_SENSITIVITY_H_

#include <optional>
#include <string>
#include <vector>

#include "mblap/decision.h"
#include "mblap/scenario.h"
#include "mblap/search.h"

namespace mblap {

enum class SweepFactor { kFleetSize, kMileageCycle, kMaintDuration };

const char* SweepFactorName(SweepFactor factor);
std::optional<SweepFactor> ParseSweepFactor(const std::string& text);

// 0.80, 0.85, ..., 1.20.
std::vector<double> DefaultMultipliers();

struct SweepSpec {
  SweepFactor factor = SweepFactor::kFleetSize;
  std::vector<double> multipliers = DefaultMultipliers();
  // Unset means the scenario's sweep_budget_relax.
  std::optional<double> budget_relax;
};

// Copy of `s` with the factor scaled and the budget multiplied by
// `budget_relax`. Fleet counts are rounded half up. Throws
// std::invalid_argument when multiplier <= 0.
Scenario Perturb(const Scenario& s, SweepFactor factor, double multiplier,
                 double budget_relax);

struct SweepRow {
  double multiplier = 1.0;
  bool feasible = false;
  SolveStatus status = SolveStatus::kInfeasible;
  double z_upper = 0.0;
  double annualized_investment = 0.0;
  double construction_share = 0.0;
  InvestmentDecision decision;
  int total_demand = 0;
};

// Rows in multiplier order. Throws std::invalid_argument for an empty or
// nonpositive multiplier list.
std::vector<SweepRow> RunSweep(const Scenario& s, const SweepSpec& spec,
                               const SearchOptions& options = {});

}  // namespace mblap

#endif  // MBLAP_SENSITIVITY_H_
