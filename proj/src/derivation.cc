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

#include "mblap/derivation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mblap {

namespace {

constexpr double kRoundingGuard = 1e-9;

double LookupTable(const SeriesLevelTable& table, const std::string& series,
                   int level, const char* what) {
  auto row = table.find(series);
  if (row != table.end()) {
    auto cell = row->second.find(level);
    if (cell != row->second.end()) return cell->second;
  }
  throw std::out_of_range(std::string("no ") + what + " for series '" + series +
                          "' level " + std::to_string(level));
}

// Rounds the (depot, series, level) totals and hands the integer units back
// to the member types: floors first, then the remainder by largest
// fractional part (lower type index on ties).
void RoundBySeries(const Scenario& s, DemandTable& table) {
  std::vector<std::string> series;
  for (const EmuType& t : s.emu_types) {
    if (std::find(series.begin(), series.end(), t.series) == series.end()) {
      series.push_back(t.series);
    }
  }
  const RoundingMode mode = s.globals.demand_rounding;
  for (int i = 0; i < table.num_depots(); ++i) {
    for (const std::string& tag : series) {
      for (int level : kLevels) {
        std::vector<int> members;
        double total = 0.0;
        for (int e = 0; e < table.num_types(); ++e) {
          if (s.emu_types[e].series != tag) continue;
          members.push_back(e);
          total += table.raw(i, e, level);
        }
        int remaining = RoundDemand(total, mode);
        std::vector<std::pair<double, int>> fractions;
        for (int e : members) {
          const double raw = table.raw(i, e, level);
          const int base = static_cast<int>(std::floor(raw + kRoundingGuard));
          table.set(i, e, level, raw, base);
          remaining -= base;
          if (raw > 0.0) fractions.push_back({raw - base, e});
        }
        std::stable_sort(fractions.begin(), fractions.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t k = 0; k < fractions.size() && remaining > 0; ++k, --remaining) {
          const int e = fractions[k].second;
          table.set(i, e, level, table.raw(i, e, level), table.n(i, e, level) + 1);
        }
      }
    }
  }
}

}  // namespace

double CapitalRecoveryFactor(double gamma, double years) {
  if (!(gamma > 0.0)) throw std::domain_error("interest rate must be positive");
  if (!(years >= 1.0)) throw std::domain_error("payback period must be >= 1 year");
  // (1+g)^T - 1 via expm1/log1p keeps precision for small rates.
  const double growth_minus_one = std::expm1(years * std::log1p(gamma));
  return gamma * (growth_minus_one + 1.0) / growth_minus_one;
}

double PoolCapacity(double positions, double working_days, double duration_days,
                    double work_unbalance) {
  if (!(duration_days > 0.0)) throw std::domain_error("duration must be positive");
  if (!(working_days > 0.0)) throw std::domain_error("working days must be positive");
  if (!(work_unbalance > 0.0)) throw std::domain_error("work unbalance must be positive");
  return positions * working_days / (work_unbalance * duration_days);
}

int RoundDemand(double raw, RoundingMode mode) {
  double v = 0.0;
  switch (mode) {
    case RoundingMode::kHalfUp:
      v = std::floor(raw + 0.5 + kRoundingGuard);
      break;
    case RoundingMode::kCeil:
      v = std::ceil(raw - kRoundingGuard);
      break;
    case RoundingMode::kFloor:
      v = std::floor(raw + kRoundingGuard);
      break;
  }
  return std::max(0, static_cast<int>(v));
}

DemandTable::DemandTable(int num_depots, int num_types)
    : num_depots_(num_depots),
      num_types_(num_types),
      raw_(static_cast<std::size_t>(num_depots) * num_types * kNumLevels, 0.0),
      n_(raw_.size(), 0) {}

double DemandTable::TotalRaw() const {
  return std::accumulate(raw_.begin(), raw_.end(), 0.0);
}

int DemandTable::Total() const { return std::accumulate(n_.begin(), n_.end(), 0); }

double RawDemand(const Scenario& s, int depot_index, int type_index, int level) {
  const EmuType& t = s.emu_types[type_index];
  int trains = 0;
  for (const FleetEntry& f : s.depots[depot_index].fleet) {
    if (f.type_id == t.id) trains += f.train_count;
  }
  if (trains == 0) return 0.0;
  const double km = static_cast<double>(trains) * t.annual_mileage_km;
  double events = km / t.cycle_km[LevelIndex(level)];
  if (level < kMaxLevel) events -= km / t.cycle_km[LevelIndex(level) + 1];
  return s.globals.demand_unbalance * t.standardization_factor * events;
}

DemandTable DeriveDemand(const Scenario& s) {
  const int depots = static_cast<int>(s.depots.size());
  const int types = static_cast<int>(s.emu_types.size());
  DemandTable table(depots, types);
  for (int i = 0; i < depots; ++i) {
    for (int e = 0; e < types; ++e) {
      for (int level : kLevels) {
        const double raw = RawDemand(s, i, e, level);
        table.set(i, e, level, raw, RoundDemand(raw, s.globals.demand_rounding));
      }
    }
  }
  if (s.globals.rounding_scope == RoundingScope::kDepotSeries) RoundBySeries(s, table);
  return table;
}

int PoolPositions(const Scenario& s, int base_index, int pool_index, int plan_id) {
  const CapacityPool& pool = s.bases[base_index].pools[pool_index];
  int positions = pool.initial_positions;
  if (plan_id != 0) {
    const ConstructionPlan* plan = s.FindPlan(base_index, plan_id);
    if (plan == nullptr) {
      throw std::invalid_argument("base " + std::to_string(s.bases[base_index].id) +
                                  " has no plan " + std::to_string(plan_id));
    }
    auto it = plan->added_positions.find(pool.id);
    if (it != plan->added_positions.end()) positions += it->second;
  }
  return positions;
}

int PoolReferenceLevel(const CapacityPool& pool) {
  if (pool.reference_level) return *pool.reference_level;
  int level = kMaxLevel;
  for (const PoolMember& m : pool.members) level = std::min(level, m.level);
  return level;
}

double PoolDurationDays(const Scenario& s, const CapacityPool& pool) {
  const int level = PoolReferenceLevel(pool);
  double days = 0.0;
  for (const PoolMember& m : pool.members) {
    for (const EmuType& t : s.emu_types) {
      if (!SelectsType(m, t)) continue;
      days = std::max(days, LookupTable(s.globals.duration_days, t.series, level,
                                        "duration"));
    }
  }
  if (days <= 0.0) {
    throw std::out_of_range("pool '" + pool.id + "' selects no known EMU type");
  }
  return days;
}

std::vector<PoolState> EffectiveCapacity(const Scenario& s, int base_index,
                                         int plan_id) {
  if (plan_id != 0 && s.FindPlan(base_index, plan_id) == nullptr) {
    throw std::invalid_argument("base " + std::to_string(s.bases[base_index].id) +
                                " has no plan " + std::to_string(plan_id));
  }
  const Base& base = s.bases[base_index];
  const GlobalParams& g = s.globals;
  std::vector<PoolState> out;
  for (int q = 0; q < static_cast<int>(base.pools.size()); ++q) {
    const CapacityPool& pool = base.pools[q];
    PoolState state;
    state.pool_index = q;
    state.positions = PoolPositions(s, base_index, q, plan_id);
    const int added = state.positions - pool.initial_positions;
    // An unused pool may select no type; it then has no duration and, having
    // nothing to serve, its capacity is irrelevant.
    bool selects_any = false;
    for (const PoolMember& m : pool.members) {
      for (const EmuType& t : s.emu_types) selects_any = selects_any || SelectsType(m, t);
    }
    if (selects_any) {
      const double d = PoolDurationDays(s, pool);
      if (pool.capacity_override) {
        state.capacity = *pool.capacity_override +
                         PoolCapacity(added, g.working_days, d, g.work_unbalance);
      } else {
        state.capacity =
            PoolCapacity(state.positions, g.working_days, d, g.work_unbalance);
      }
    }
    out.push_back(state);
  }
  return out;
}

Coverage FindCoverage(const Scenario& s, int base_index, int type_index, int level) {
  const Base& base = s.bases[base_index];
  const EmuType& t = s.emu_types[type_index];
  for (int q = 0; q < static_cast<int>(base.pools.size()); ++q) {
    for (const PoolMember& m : base.pools[q].members) {
      if (m.level == level && SelectsType(m, t)) return {q, m.conversion};
    }
  }
  return {};
}

CapabilityMatrix Capability(const Scenario& s, int base_index, int plan_id) {
  const std::vector<PoolState> pools = EffectiveCapacity(s, base_index, plan_id);
  CapabilityMatrix xi(s.emu_types.size());
  for (int e = 0; e < static_cast<int>(s.emu_types.size()); ++e) {
    for (int level : kLevels) {
      const Coverage c = FindCoverage(s, base_index, e, level);
      xi[e][LevelIndex(level)] = c.pool_index >= 0 && pools[c.pool_index].capacity > 0.0;
    }
  }
  return xi;
}

double DispatchUnitCost(const Scenario& s, int depot_index, int base_index) {
  const GlobalParams& g = s.globals;
  return g.empty_run_cost_rmb_per_km * 1e-6 * g.dispatch_legs *
         s.distances[depot_index][base_index];
}

double MaintUnitCost(const Scenario& s, int base_index, int type_index, int level) {
  const double ref = LookupTable(s.globals.maint_cost_ref,
                                 s.emu_types[type_index].series, level,
                                 "maintenance cost");
  return ref * (1.0 + s.bases[base_index].maint_ratio);
}

double PlanInvestment(const Scenario& s, int base_index, int plan_id) {
  if (plan_id == 0) return 0.0;
  const ConstructionPlan* plan = s.FindPlan(base_index, plan_id);
  if (plan == nullptr) {
    throw std::invalid_argument("base " + std::to_string(s.bases[base_index].id) +
                                " has no plan " + std::to_string(plan_id));
  }
  return plan->reference_investment * (1.0 + s.bases[base_index].invest_ratio);
}

double PlanAnnualizedInvestment(const Scenario& s, int base_index, int plan_id) {
  if (plan_id == 0) return 0.0;
  const ConstructionPlan* plan = s.FindPlan(base_index, plan_id);
  if (plan == nullptr) {
    throw std::invalid_argument("base " + std::to_string(s.bases[base_index].id) +
                                " has no plan " + std::to_string(plan_id));
  }
  return CapitalRecoveryFactor(s.globals.interest_rate, plan->payback_years) *
         PlanInvestment(s, base_index, plan_id);
}

}  // namespace mblap
