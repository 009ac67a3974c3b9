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

#ifndef MBLAP_DECISION_H_
#define MBLAP_DECISION_H_

#include <string>
#include <vector>

#include "mblap/scenario.h"

namespace mblap {

// Upper-level choice: one plan id per base, in base order. 0 = no build.
struct InvestmentDecision {
  std::vector<int> plan;

  static InvestmentDecision None(const Scenario& s) {
    return {std::vector<int>(s.bases.size(), 0)};
  }

  bool operator==(const InvestmentDecision&) const = default;
  auto operator<=>(const InvestmentDecision&) const = default;
};

// Throws std::invalid_argument when the vector length or a plan id does not
// match the scenario.
void CheckDecision(const Scenario& s, const InvestmentDecision& d);

double TotalInvestment(const Scenario& s, const InvestmentDecision& d);
double AnnualizedInvestment(const Scenario& s, const InvestmentDecision& d);

// "Hami=8 Xi'an=8"; "none" when nothing is built.
std::string FormatDecision(const Scenario& s, const InvestmentDecision& d);

}  // namespace mblap

#endif  // MBLAP_DECISION_H_
