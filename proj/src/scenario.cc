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

#include "mblap/scenario.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace mblap {

namespace {

std::string Str(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

class ViolationSink {
 public:
  void Add(std::string code, std::string path, std::string message) {
    out_.push_back({std::move(code), std::move(path), std::move(message)});
  }
  std::vector<Violation> Take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

void ValidateGlobals(const Scenario& s, ViolationSink& sink) {
  const GlobalParams& g = s.globals;
  if (!(g.empty_run_cost_rmb_per_km > 0.0)) {
    sink.Add("empty-run-cost-not-positive", "globals.empty_run_cost_rmb_per_km",
             "emptyRunCost must be positive");
  }
  if (g.dispatch_legs < 1) {
    sink.Add("dispatch-legs-below-one", "globals.dispatch_legs",
             "dispatchLegs must be at least 1");
  }
  if (!(g.interest_rate > 0.0 && g.interest_rate < 1.0)) {
    sink.Add("interest-rate-out-of-range", "globals.interest_rate",
             "interestRate must lie in (0, 1)");
  }
  if (!(g.budget >= 0.0)) {
    sink.Add("budget-negative", "globals.budget", "budget must be >= 0");
  }
  if (!(g.dispatch_unbalance >= 1.0)) {
    sink.Add("dispatch-unbalance-below-one", "globals.dispatch_unbalance",
             "dispatchUnbalance below 1");
  }
  if (!(g.demand_unbalance > 0.0)) {
    sink.Add("demand-unbalance-not-positive", "globals.demand_unbalance",
             "demandUnbalance must be positive");
  }
  if (!(g.working_days >= 1.0 && g.working_days <= 366.0)) {
    sink.Add("working-days-out-of-range", "globals.working_days",
             "workingDays must lie in [1, 366]");
  }
  if (!(g.work_unbalance > 0.0)) {
    sink.Add("work-unbalance-not-positive", "globals.work_unbalance",
             "workUnbalance must be positive");
  }
  if (!(g.sweep_budget_relax >= 1.0)) {
    sink.Add("sweep-budget-relax-below-one", "globals.sweep_budget_relax",
             "sweepBudgetRelax must be >= 1");
  }
  for (const auto& [series, levels] : g.duration_days) {
    for (const auto& [level, days] : levels) {
      const std::string path =
          "globals.duration_days." + series + "." + std::to_string(level);
      if (!IsLevel(level)) {
        sink.Add("level-out-of-range", path, "maintenance level must be 3, 4 or 5");
      }
      if (!(days > 0.0)) {
        sink.Add("duration-not-positive", path, "duration must be positive");
      }
    }
  }
  for (const auto& [series, levels] : g.maint_cost_ref) {
    for (const auto& [level, cost] : levels) {
      const std::string path =
          "globals.maint_cost_ref." + series + "." + std::to_string(level);
      if (!IsLevel(level)) {
        sink.Add("level-out-of-range", path, "maintenance level must be 3, 4 or 5");
      }
      if (!(cost > 0.0)) {
        sink.Add("maint-cost-not-positive", path,
                 "maintenance cost must be positive");
      }
    }
  }
}

void ValidateTypes(const Scenario& s, ViolationSink& sink) {
  std::set<int> seen;
  for (std::size_t k = 0; k < s.emu_types.size(); ++k) {
    const EmuType& t = s.emu_types[k];
    const std::string path = "emu_types[" + std::to_string(k) + "]";
    if (!seen.insert(t.id).second) {
      sink.Add("duplicate-type-id", path, "duplicate EMU type id " + std::to_string(t.id));
    }
    if (t.series.empty()) {
      sink.Add("type-series-missing", path + ".series", "series tag is empty");
    }
    if (t.standardization_factor != 1 && t.standardization_factor != 2) {
      sink.Add("standardization-factor-invalid", path + ".standardization_factor",
               "standardization factor must be 1 or 2");
    }
    if (!(t.annual_mileage_km > 0.0)) {
      sink.Add("annual-mileage-not-positive", path + ".annual_mileage_km",
               "annual mileage must be positive");
    }
    if (!(t.cycle_km[0] > 0.0 && t.cycle_km[0] < t.cycle_km[1] &&
          t.cycle_km[1] < t.cycle_km[2])) {
      sink.Add("cycles-not-increasing", path + ".cycle_km",
               "mileage cycles must satisfy 0 < L3 < L4 < L5");
    }
  }
}

void ValidateDepots(const Scenario& s, ViolationSink& sink) {
  std::set<int> seen;
  for (std::size_t i = 0; i < s.depots.size(); ++i) {
    const Depot& d = s.depots[i];
    const std::string path = "depots[" + std::to_string(i) + "]";
    if (!seen.insert(d.id).second) {
      sink.Add("duplicate-depot-id", path, "duplicate depot id " + std::to_string(d.id));
    }
    for (std::size_t k = 0; k < d.fleet.size(); ++k) {
      const FleetEntry& f = d.fleet[k];
      const std::string fpath = path + ".fleet[" + std::to_string(k) + "]";
      if (s.TypeIndex(f.type_id) < 0) {
        sink.Add("unknown-type", fpath,
                 "depot '" + d.name + "' references unknown EMU type " +
                     std::to_string(f.type_id));
      }
      if (f.train_count < 0) {
        sink.Add("train-count-negative", fpath, "train count must be >= 0");
      }
    }
  }
}

void ValidateBases(const Scenario& s, ViolationSink& sink) {
  std::set<int> seen;
  for (std::size_t j = 0; j < s.bases.size(); ++j) {
    const Base& b = s.bases[j];
    const std::string path = "bases[" + std::to_string(j) + "]";
    if (!seen.insert(b.id).second) {
      sink.Add("duplicate-base-id", path, "duplicate base id " + std::to_string(b.id));
    }
    if (!(b.invest_ratio > -1.0)) {
      sink.Add("invest-ratio-out-of-range", path + ".invest_ratio",
               "investment ratio must exceed -1");
    }
    if (!(b.maint_ratio > -1.0)) {
      sink.Add("maint-ratio-out-of-range", path + ".maint_ratio",
               "maintenance ratio must exceed -1");
    }

    std::set<std::string> pool_ids;
    // (type id, level) -> pool id, for the disjointness check.
    std::map<std::pair<int, int>, std::string> owner;
    for (std::size_t q = 0; q < b.pools.size(); ++q) {
      const CapacityPool& pool = b.pools[q];
      const std::string ppath = path + ".pools[" + std::to_string(q) + "]";
      if (!pool_ids.insert(pool.id).second) {
        sink.Add("duplicate-pool-id", ppath, "duplicate pool id '" + pool.id + "'");
      }
      if (pool.members.empty()) {
        sink.Add("pool-empty", ppath, "pool has no members");
      }
      if (pool.initial_positions < 0) {
        sink.Add("positions-negative", ppath + ".initial_positions",
                 "initial positions must be >= 0");
      }
      if (pool.capacity_override && !(*pool.capacity_override >= 0.0)) {
        sink.Add("capacity-override-negative", ppath + ".capacity_override",
                 "capacity override must be >= 0");
      }
      if (pool.reference_level && !IsLevel(*pool.reference_level)) {
        sink.Add("level-out-of-range", ppath + ".reference_level",
                 "maintenance level must be 3, 4 or 5");
      }
      for (std::size_t m = 0; m < pool.members.size(); ++m) {
        const PoolMember& member = pool.members[m];
        const std::string mpath = ppath + ".members[" + std::to_string(m) + "]";
        if (!IsLevel(member.level)) {
          sink.Add("level-out-of-range", mpath + ".level",
                   "maintenance level must be 3, 4 or 5");
        }
        if (!(member.conversion > 0.0)) {
          sink.Add("conversion-not-positive", mpath + ".conversion",
                   "conversion coefficient must be positive");
        }
        if (member.series.empty() == member.type_ids.empty()) {
          sink.Add("member-selector-invalid", mpath,
                   "member must give exactly one of series or types");
        }
        for (int id : member.type_ids) {
          if (s.TypeIndex(id) < 0) {
            sink.Add("unknown-type", mpath,
                     "pool '" + pool.id + "' references unknown EMU type " +
                         std::to_string(id));
          }
        }
        for (const EmuType& t : s.emu_types) {
          if (!SelectsType(member, t)) continue;
          auto [it, inserted] = owner.emplace(std::make_pair(t.id, member.level), pool.id);
          if (!inserted) {
            sink.Add("pool-members-overlap", mpath,
                     "type " + std::to_string(t.id) + " level " +
                         std::to_string(member.level) + " is served by pools '" +
                         it->second + "' and '" + pool.id + "'");
          }
        }
      }
      const int ref = pool.reference_level.value_or(kMaxLevel + 1);
      int lowest = kMaxLevel + 1;
      for (const PoolMember& member : pool.members) lowest = std::min(lowest, member.level);
      const int level = pool.reference_level ? ref : lowest;
      if (IsLevel(level)) {
        // The duration of the reference level must be known for every series
        // the pool touches.
        std::set<std::string> series;
        for (const PoolMember& member : pool.members) {
          for (const EmuType& t : s.emu_types) {
            if (SelectsType(member, t)) series.insert(t.series);
          }
        }
        for (const std::string& tag : series) {
          auto it = s.globals.duration_days.find(tag);
          if (it == s.globals.duration_days.end() || !it->second.count(level)) {
            sink.Add("duration-missing", ppath,
                     "no duration for series '" + tag + "' level " +
                         std::to_string(level));
          }
        }
      }
    }

    std::set<int> plan_ids;
    for (std::size_t p = 0; p < b.plans.size(); ++p) {
      const ConstructionPlan& plan = b.plans[p];
      const std::string ppath = path + ".plans[" + std::to_string(p) + "]";
      if (plan.id < 1) {
        sink.Add("plan-id-reserved", ppath,
                 "plan ids start at 1 (0 means no construction)");
      }
      if (!plan_ids.insert(plan.id).second) {
        sink.Add("duplicate-plan-id", ppath, "duplicate plan id " + std::to_string(plan.id));
      }
      if (!(plan.reference_investment > 0.0)) {
        sink.Add("investment-not-positive", ppath + ".reference_investment",
                 "reference investment must be positive");
      }
      if (plan.payback_years < 1) {
        sink.Add("payback-below-one", ppath + ".payback_years",
                 "payback period must be at least 1 year");
      }
      bool any_positive = false;
      for (const auto& [pool_id, positions] : plan.added_positions) {
        if (!pool_ids.count(pool_id)) {
          sink.Add("unknown-pool", ppath + ".added_positions." + pool_id,
                   "plan adds positions to unknown pool '" + pool_id + "'");
        }
        if (positions < 0) {
          sink.Add("positions-negative", ppath + ".added_positions." + pool_id,
                   "added positions must be >= 0");
        }
        any_positive = any_positive || positions > 0;
      }
      if (!any_positive) {
        sink.Add("plan-adds-nothing", ppath, "plan must add at least one position");
      }
    }
  }
}

void ValidateDistances(const Scenario& s, ViolationSink& sink) {
  if (s.distances.size() != s.depots.size()) {
    sink.Add("distance-shape", "distances",
             "expected " + std::to_string(s.depots.size()) + " rows, got " +
                 std::to_string(s.distances.size()));
    return;
  }
  for (std::size_t i = 0; i < s.distances.size(); ++i) {
    const auto& row = s.distances[i];
    if (row.size() != s.bases.size()) {
      sink.Add("distance-shape", "distances[" + std::to_string(i) + "]",
               "expected " + std::to_string(s.bases.size()) + " columns, got " +
                   std::to_string(row.size()));
      continue;
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!std::isfinite(row[j]) || row[j] < 0.0) {
        sink.Add("distance-invalid",
                 "distances[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                 "distance from depot " + std::to_string(s.depots[i].id) +
                     " to base " + std::to_string(s.bases[j].id) + " is " +
                     Str(row[j]) + "; must be finite and >= 0");
      }
    }
  }
}

void ValidateCoverage(const Scenario& s, ViolationSink& sink) {
  std::set<std::string> demanded;
  for (const Depot& d : s.depots) {
    for (const FleetEntry& f : d.fleet) {
      const int t = s.TypeIndex(f.type_id);
      if (t >= 0 && f.train_count > 0) demanded.insert(s.emu_types[t].series);
    }
  }
  for (const std::string& series : demanded) {
    for (int level : kLevels) {
      auto d = s.globals.duration_days.find(series);
      if (d == s.globals.duration_days.end() || !d->second.count(level)) {
        sink.Add("duration-missing",
                 "globals.duration_days." + series + "." + std::to_string(level),
                 "no duration for series '" + series + "' level " + std::to_string(level));
      }
      auto c = s.globals.maint_cost_ref.find(series);
      if (c == s.globals.maint_cost_ref.end() || !c->second.count(level)) {
        sink.Add("maint-cost-missing",
                 "globals.maint_cost_ref." + series + "." + std::to_string(level),
                 "no maintenance cost for series '" + series + "' level " +
                     std::to_string(level));
      }
    }
  }
}

}  // namespace

int Scenario::TypeIndex(int type_id) const {
  for (std::size_t k = 0; k < emu_types.size(); ++k) {
    if (emu_types[k].id == type_id) return static_cast<int>(k);
  }
  return -1;
}

int Scenario::DepotIndex(int depot_id) const {
  for (std::size_t k = 0; k < depots.size(); ++k) {
    if (depots[k].id == depot_id) return static_cast<int>(k);
  }
  return -1;
}

int Scenario::BaseIndex(int base_id) const {
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (bases[k].id == base_id) return static_cast<int>(k);
  }
  return -1;
}

int Scenario::FindBase(const std::string& key) const {
  const std::string folded = FoldName(key);
  if (folded.empty()) return -1;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (FoldName(bases[k].name) == folded) return static_cast<int>(k);
  }
  if (std::all_of(folded.begin(), folded.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    return BaseIndex(std::stoi(folded));
  }
  return -1;
}

const ConstructionPlan* Scenario::FindPlan(int base_index, int plan_id) const {
  if (base_index < 0 || base_index >= static_cast<int>(bases.size())) return nullptr;
  for (const ConstructionPlan& plan : bases[base_index].plans) {
    if (plan.id == plan_id) return &plan;
  }
  return nullptr;
}

int Scenario::TotalTrains() const {
  int total = 0;
  for (const Depot& d : depots) {
    for (const FleetEntry& f : d.fleet) total += f.train_count;
  }
  return total;
}

bool SelectsType(const PoolMember& member, const EmuType& type) {
  if (!member.series.empty()) return member.series == type.series;
  return std::find(member.type_ids.begin(), member.type_ids.end(), type.id) !=
         member.type_ids.end();
}

std::string FoldName(const std::string& name) {
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

const char* RoundingModeName(RoundingMode mode) {
  switch (mode) {
    case RoundingMode::kHalfUp:
      return "halfUp";
    case RoundingMode::kCeil:
      return "ceil";
    case RoundingMode::kFloor:
      return "floor";
  }
  return "halfUp";
}

std::optional<RoundingMode> ParseRoundingMode(const std::string& text) {
  if (text == "halfUp") return RoundingMode::kHalfUp;
  if (text == "ceil") return RoundingMode::kCeil;
  if (text == "floor") return RoundingMode::kFloor;
  return std::nullopt;
}

const char* RoundingScopeName(RoundingScope scope) {
  return scope == RoundingScope::kCell ? "cell" : "depotSeries";
}

std::optional<RoundingScope> ParseRoundingScope(const std::string& text) {
  if (text == "cell") return RoundingScope::kCell;
  if (text == "depotSeries") return RoundingScope::kDepotSeries;
  return std::nullopt;
}

const char* PlanKindName(PlanKind kind) {
  return kind == PlanKind::kNew ? "new" : "expansion";
}

std::vector<Violation> Validate(const Scenario& scenario) {
  ViolationSink sink;
  ValidateGlobals(scenario, sink);
  ValidateTypes(scenario, sink);
  ValidateDepots(scenario, sink);
  ValidateBases(scenario, sink);
  ValidateDistances(scenario, sink);
  ValidateCoverage(scenario, sink);
  return sink.Take();
}

std::string FormatViolation(const Violation& violation) {
  return violation.code + " " + violation.path + ": " + violation.message;
}

}  // namespace mblap
