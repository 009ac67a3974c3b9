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

// Problem instances for the maintenance-base location-allocation problem.
//
// A Scenario bundles the EMU fleet (types and depot assignments), the
// candidate maintenance bases with their capacity pools and construction
// plans, the depot-to-base distance table, and the global economic and
// operational parameters. Units are fixed throughout the library: money in
// million RMB, distances in km, time in years (durations in days).
//
// Scenarios are plain values. Once loaded and validated they are treated as
// immutable and can be shared between threads.

#ifndef MBLAP_SCENARIO_H_
#define MBLAP_SCENARIO_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mblap {

// High-level maintenance grades III, IV and V.
inline constexpr int kMinLevel = 3;
inline constexpr int kMaxLevel = 5;
inline constexpr int kNumLevels = 3;
inline constexpr std::array<int, kNumLevels> kLevels = {3, 4, 5};

constexpr int LevelIndex(int level) { return level - kMinLevel; }
constexpr bool IsLevel(int level) {
  return level >= kMinLevel && level <= kMaxLevel;
}

enum class RoundingMode { kHalfUp, kCeil, kFloor };

// Granularity at which fractional annual demand is rounded to whole
// standard trainsets.
//   kCell:        every (depot, type, level) cell independently.
//   kDepotSeries: the (depot, series, level) total is rounded, then split
//                 back over the series' types by largest remainder.
enum class RoundingScope { kCell, kDepotSeries };

struct EmuType {
  int id = 0;
  std::string name;
  std::string series;
  int standardization_factor = 1;  // standard trainsets per train
  double annual_mileage_km = 0.0;
  std::array<double, kNumLevels> cycle_km{};  // levels III, IV, V

  bool operator==(const EmuType&) const = default;
};

struct FleetEntry {
  int type_id = 0;
  int train_count = 0;

  bool operator==(const FleetEntry&) const = default;
};

struct Depot {
  int id = 0;
  std::string name;
  std::vector<FleetEntry> fleet;

  bool operator==(const Depot&) const = default;
};

// One maintenance activity served by a pool. The EMU types are selected
// either by series tag or by an explicit list of type ids.
struct PoolMember {
  std::string series;
  std::vector<int> type_ids;
  int level = kMinLevel;
  double conversion = 1.0;  // capacity units consumed per standard trainset

  bool operator==(const PoolMember&) const = default;
};

// A group of (type, level) activities sharing maintenance positions.
struct CapacityPool {
  std::string id;
  std::vector<PoolMember> members;
  int initial_positions = 0;
  // Initial capacity in standard trainsets/year; replaces the
  // position-based value for the initial endowment only.
  std::optional<double> capacity_override;
  // Level whose duration denominates the pool's capacity units. Defaults to
  // the lowest member level.
  std::optional<int> reference_level;

  bool operator==(const CapacityPool&) const = default;
};

enum class PlanKind { kNew, kExpansion };

struct ConstructionPlan {
  int id = 0;  // >= 1; id 0 is the implicit "no construction" option
  PlanKind kind = PlanKind::kNew;
  double reference_investment = 0.0;  // million RMB before regional ratio
  int payback_years = 1;
  std::map<std::string, int> added_positions;  // pool id -> positions

  bool operator==(const ConstructionPlan&) const = default;
};

struct Base {
  int id = 0;
  std::string name;
  std::vector<CapacityPool> pools;
  double invest_ratio = 0.0;  // signed fraction applied to plan investment
  double maint_ratio = 0.0;   // signed fraction applied to unit maint. cost
  std::vector<ConstructionPlan> plans;

  bool operator==(const Base&) const = default;
};

// Values keyed by series tag, then by maintenance level.
using SeriesLevelTable = std::map<std::string, std::map<int, double>>;

struct GlobalParams {
  double empty_run_cost_rmb_per_km = 0.0;
  // Empty legs charged per maintenance visit: 1 charges the tabulated
  // distance once, 2 charges the out-and-back run.
  int dispatch_legs = 1;
  double interest_rate = 0.0;
  double budget = 0.0;
  double dispatch_unbalance = 1.0;
  double demand_unbalance = 1.0;
  double working_days = 300.0;
  double work_unbalance = 1.0;
  SeriesLevelTable duration_days;
  SeriesLevelTable maint_cost_ref;
  RoundingMode demand_rounding = RoundingMode::kHalfUp;
  RoundingScope rounding_scope = RoundingScope::kCell;
  double sweep_budget_relax = 1.5;

  bool operator==(const GlobalParams&) const = default;
};

struct ScenarioMeta {
  std::string name;
  std::string currency = "million RMB";
  std::vector<std::string> notes;
  // Optional source note per distance entry, same shape as the table.
  std::vector<std::vector<std::string>> distance_notes;

  bool operator==(const ScenarioMeta&) const = default;
};

struct Scenario {
  ScenarioMeta meta;
  GlobalParams globals;
  std::vector<EmuType> emu_types;
  std::vector<Depot> depots;
  std::vector<Base> bases;
  // distances[i][j]: km from depot i to base j (vector positions, not ids).
  std::vector<std::vector<double>> distances;

  bool operator==(const Scenario&) const = default;

  // Index lookups; return -1 when absent.
  int TypeIndex(int type_id) const;
  int DepotIndex(int depot_id) const;
  int BaseIndex(int base_id) const;
  // Matches a base by numeric id or by its name folded to lowercase
  // alphanumerics ("Xi'an" -> "xian").
  int FindBase(const std::string& key) const;

  // Plan lookup within a base; nullptr when absent. Plan 0 is never stored.
  const ConstructionPlan* FindPlan(int base_index, int plan_id) const;

  int TotalTrains() const;
};

// True when the member selects `type` (by series tag or explicit id list).
bool SelectsType(const PoolMember& member, const EmuType& type);

// Lowercase alphanumeric folding used for name matching.
std::string FoldName(const std::string& name);

const char* RoundingModeName(RoundingMode mode);
std::optional<RoundingMode> ParseRoundingMode(const std::string& text);
const char* RoundingScopeName(RoundingScope scope);
std::optional<RoundingScope> ParseRoundingScope(const std::string& text);
const char* PlanKindName(PlanKind kind);

// A violated scenario invariant. `code` is stable and machine-readable,
// `path` locates the offending field.
struct Violation {
  std::string code;
  std::string path;
  std::string message;
};

std::vector<Violation> Validate(const Scenario& scenario);

std::string FormatViolation(const Violation& violation);

}  // namespace mblap

#endif  // MBLAP_SCENARIO_H_
