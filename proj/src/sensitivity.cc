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

#include "mblap/sensitivity.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mblap/derivation.h"

namespace mblap {

const char* SweepFactorName(SweepFactor factor) {
  switch (factor) {
    case SweepFactor::kFleetSize:
      return "fleetSize";
    case SweepFactor::kMileageCycle:
      return "mileageCycle";
    case SweepFactor::kMaintDuration:
      return "maintDuration";
  }
  return "fleetSize";
}

std::optional<SweepFactor> ParseSweepFactor(const std::string& text) {
  if (text == "fleetSize") return SweepFactor::kFleetSize;
  if (text == "mileageCycle") return SweepFactor::kMileageCycle;
  if (text == "maintDuration") return SweepFactor::kMaintDuration;
  return std::nullopt;
}

std::vector<double> DefaultMultipliers() {
  std::vector<double> out;
  for (int k = 80; k <= 120; k += 5) out.push_back(k / 100.0);
  return out;
}

Scenario Perturb(const Scenario& s, SweepFactor factor, double multiplier,
                 double budget_relax) {
  if (!(multiplier > 0.0)) throw std::invalid_argument("multiplier must be positive");
  Scenario out = s;
  out.globals.budget = s.globals.budget * budget_relax;
  switch (factor) {
    case SweepFactor::kFleetSize:
      for (Depot& d : out.depots) {
        for (FleetEntry& f : d.fleet) {
          f.train_count = RoundDemand(f.train_count * multiplier, RoundingMode::kHalfUp);
        }
      }
      break;
    case SweepFactor::kMileageCycle:
      for (EmuType& t : out.emu_types) {
        for (double& km : t.cycle_km) km *= multiplier;
      }
      break;
    case SweepFactor::kMaintDuration:
      for (auto& [series, levels] : out.globals.duration_days) {
        for (auto& [level, days] : levels) days *= multiplier;
      }
      break;
  }
  return out;
}

std::vector<SweepRow> RunSweep(const Scenario& s, const SweepSpec& spec,
                               const SearchOptions& options) {
  if (spec.multipliers.empty()) throw std::invalid_argument("no multipliers");
  std::vector<double> multipliers = spec.multipliers;
  for (double m : multipliers) {
    if (!(m > 0.0)) throw std::invalid_argument("multipliers must be positive");
  }
  std::sort(multipliers.begin(), multipliers.end());
  const double relax = spec.budget_relax.value_or(s.globals.sweep_budget_relax);
  std::vector<SweepRow> rows;
  for (double m : multipliers) {
    const Scenario perturbed = Perturb(s, spec.factor, m, relax);
    const SolveReport report = SolveMblap(perturbed, options);
    SweepRow row;
    row.multiplier = m;
    row.status = report.status;
    row.feasible = report.status != SolveStatus::kInfeasible;
    row.total_demand = report.demand.Total();
    if (row.feasible) {
      row.z_upper = report.z_upper;
      row.annualized_investment = report.annualized_investment;
      row.construction_share =
          report.z_upper > 0.0 ? report.annualized_investment / report.z_upper : 0.0;
      row.decision = report.decision;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mblap
