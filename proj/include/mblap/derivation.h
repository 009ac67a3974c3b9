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

// Quantities derived from a Scenario: annual maintenance demand, pool
// capacities, capability flags and unit cost coefficients.
//
// Indices below are vector positions in the Scenario (depot i, base j,
// EMU type e), and levels are the literal grades 3, 4 and 5.

#ifndef MBLAP_DERIVATION_H_
#define MBLAP_DERIVATION_H_

#include <vector>

#include "mblap/scenario.h"

namespace mblap {

// gamma (1 + gamma)^T / ((1 + gamma)^T - 1). Throws std::domain_error when
// gamma <= 0 or years < 1.
double CapitalRecoveryFactor(double gamma, double years);

// positions * working_days / (work_unbalance * duration_days). Throws
// std::domain_error when duration_days <= 0 or working_days <= 0.
double PoolCapacity(double positions, double working_days, double duration_days,
                    double work_unbalance);

// Applies `mode` with a 1e-9 guard so that values such as 3.4999999999 from
// floating point evaluation of an exact 3.5 still round half up.
int RoundDemand(double raw, RoundingMode mode);

class DemandTable {
 public:
  DemandTable() = default;
  DemandTable(int num_depots, int num_types);

  int num_depots() const { return num_depots_; }
  int num_types() const { return num_types_; }

  double raw(int i, int e, int level) const { return raw_[Slot(i, e, level)]; }
  int n(int i, int e, int level) const { return n_[Slot(i, e, level)]; }
  void set(int i, int e, int level, double raw, int n) {
    raw_[Slot(i, e, level)] = raw;
    n_[Slot(i, e, level)] = n;
  }

  double TotalRaw() const;
  int Total() const;

  bool operator==(const DemandTable&) const = default;

 private:
  std::size_t Slot(int i, int e, int level) const {
    return (static_cast<std::size_t>(i) * num_types_ + e) * kNumLevels +
           LevelIndex(level);
  }

  int num_depots_ = 0;
  int num_types_ = 0;
  std::vector<double> raw_;
  std::vector<int> n_;
};

// Unrounded annual events: omega m H l (1/L^g - [g < 5] / L^{g+1}).
double RawDemand(const Scenario& s, int depot_index, int type_index, int level);

// Full table using the scenario's rounding mode and scope.
DemandTable DeriveDemand(const Scenario& s);

// Position count of a pool after applying plan `plan_id` (0 = none).
int PoolPositions(const Scenario& s, int base_index, int pool_index, int plan_id);

// Level whose duration denominates the pool (explicit, else lowest member).
int PoolReferenceLevel(const CapacityPool& pool);

// Duration (days) used for the pool's capacity. When the covered series
// disagree the longest duration is used.
double PoolDurationDays(const Scenario& s, const CapacityPool& pool);

struct PoolState {
  int pool_index = 0;
  int positions = 0;
  double capacity = 0.0;  // standard trainset equivalents per year
};

// One entry per pool of the base, in pool order. Throws
// std::invalid_argument on an unknown plan id.
std::vector<PoolState> EffectiveCapacity(const Scenario& s, int base_index,
                                         int plan_id);

// The pool at a base serving (type, level), or -1, with its conversion.
struct Coverage {
  int pool_index = -1;
  double conversion = 0.0;
};
Coverage FindCoverage(const Scenario& s, int base_index, int type_index,
                      int level);

// xi[e][level index] for one base under a plan.
using CapabilityMatrix = std::vector<std::array<bool, kNumLevels>>;
CapabilityMatrix Capability(const Scenario& s, int base_index, int plan_id);

// Million RMB per standard trainset visit (all legs of the empty run).
double DispatchUnitCost(const Scenario& s, int depot_index, int base_index);

// Million RMB per standard trainset overhaul at the base.
double MaintUnitCost(const Scenario& s, int base_index, int type_index,
                     int level);

// Plan investment after the regional ratio, and its annualized value.
// Plan 0 costs nothing.
double PlanInvestment(const Scenario& s, int base_index, int plan_id);
double PlanAnnualizedInvestment(const Scenario& s, int base_index, int plan_id);

}  // namespace mblap

#endif  // MBLAP_DERIVATION_H_
