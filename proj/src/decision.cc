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

#include "mblap/decision.h"

#include <stdexcept>

#include "mblap/derivation.h"

namespace mblap {

void CheckDecision(const Scenario& s, const InvestmentDecision& d) {
  if (d.plan.size() != s.bases.size()) {
    throw std::invalid_argument("decision has " + std::to_string(d.plan.size()) +
                                " entries for " + std::to_string(s.bases.size()) +
                                " bases");
  }
  for (std::size_t j = 0; j < d.plan.size(); ++j) {
    if (d.plan[j] != 0 && s.FindPlan(static_cast<int>(j), d.plan[j]) == nullptr) {
      throw std::invalid_argument("base '" + s.bases[j].name + "' has no plan " +
                                  std::to_string(d.plan[j]));
    }
  }
}

double TotalInvestment(const Scenario& s, const InvestmentDecision& d) {
  CheckDecision(s, d);
  double total = 0.0;
  for (std::size_t j = 0; j < d.plan.size(); ++j) {
    total += PlanInvestment(s, static_cast<int>(j), d.plan[j]);
  }
  return total;
}

double AnnualizedInvestment(const Scenario& s, const InvestmentDecision& d) {
  CheckDecision(s, d);
  double total = 0.0;
  for (std::size_t j = 0; j < d.plan.size(); ++j) {
    total += PlanAnnualizedInvestment(s, static_cast<int>(j), d.plan[j]);
  }
  return total;
}

std::string FormatDecision(const Scenario& s, const InvestmentDecision& d) {
  std::string out;
  for (std::size_t j = 0; j < d.plan.size() && j < s.bases.size(); ++j) {
    if (d.plan[j] == 0) continue;
    if (!out.empty()) out += ' ';
    out += s.bases[j].name + "=" + std::to_string(d.plan[j]);
  }
  return out.empty() ? "none" : out;
}

}  // namespace mblap
