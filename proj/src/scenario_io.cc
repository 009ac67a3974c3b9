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

#include "mblap/scenario_io.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace mblap {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void Fail(const std::string& path, const std::string& message) {
  throw ScenarioParseError(path + ": " + message);
}

// Typed access to one JSON object. Every key read is recorded; Finish()
// rejects the keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& value, std::string path)
      : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) Fail(path_, "expected an object");
  }

  bool Has(const std::string& key) {
    known_.insert(key);
    return value_.contains(key);
  }

  const json& Get(const std::string& key) {
    if (!Has(key)) Fail(path_, "missing key '" + key + "'");
    return value_.at(key);
  }

  std::string Path(const std::string& key) const { return path_ + "." + key; }

  double Number(const std::string& key) { return AsNumber(Get(key), Path(key)); }
  double Number(const std::string& key, double fallback) {
    return Has(key) ? Number(key) : fallback;
  }
  int Int(const std::string& key) { return AsInt(Get(key), Path(key)); }
  int Int(const std::string& key, int fallback) {
    return Has(key) ? Int(key) : fallback;
  }
  std::string String(const std::string& key) {
    return AsString(Get(key), Path(key));
  }
  std::string String(const std::string& key, const std::string& fallback) {
    return Has(key) ? String(key) : fallback;
  }
  const json& Array(const std::string& key) {
    const json& v = Get(key);
    if (!v.is_array()) Fail(Path(key), "expected an array");
    return v;
  }

  void Finish() const {
    for (auto it = value_.begin(); it != value_.end(); ++it) {
      if (!known_.count(it.key())) Fail(path_, "unknown key '" + it.key() + "'");
    }
  }

  static double AsNumber(const json& v, const std::string& path) {
    if (!v.is_number()) Fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) Fail(path, "expected a finite number");
    return d;
  }
  static int AsInt(const json& v, const std::string& path) {
    if (!v.is_number_integer()) Fail(path, "expected an integer");
    const auto n = v.get<long long>();
    if (n < -2147483647LL || n > 2147483647LL) Fail(path, "integer out of range");
    return static_cast<int>(n);
  }
  static std::string AsString(const json& v, const std::string& path) {
    if (!v.is_string()) Fail(path, "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& value_;
  std::string path_;
  std::set<std::string> known_;
};

std::string Index(const std::string& path, std::size_t k) {
  return path + "[" + std::to_string(k) + "]";
}

SeriesLevelTable ReadSeriesLevelTable(const json& v, const std::string& path) {
  if (!v.is_object()) Fail(path, "expected an object keyed by series");
  SeriesLevelTable table;
  for (auto it = v.begin(); it != v.end(); ++it) {
    const std::string spath = path + "." + it.key();
    if (!it.value().is_object()) Fail(spath, "expected an object keyed by level");
    auto& row = table[it.key()];
    for (auto lt = it.value().begin(); lt != it.value().end(); ++lt) {
      const std::string lpath = spath + "." + lt.key();
      int level = 0;
      try {
        std::size_t used = 0;
        level = std::stoi(lt.key(), &used);
        if (used != lt.key().size()) throw std::invalid_argument(lt.key());
      } catch (const std::exception&) {
        Fail(lpath, "level key must be an integer");
      }
      row[level] = ObjectReader::AsNumber(lt.value(), lpath);
    }
  }
  return table;
}

ScenarioMeta ReadMeta(const json& v) {
  ObjectReader r(v, "meta");
  ScenarioMeta meta;
  meta.name = r.String("name", "");
  meta.currency = r.String("currency", "million RMB");
  if (r.Has("notes")) {
    const json& notes = r.Array("notes");
    for (std::size_t k = 0; k < notes.size(); ++k) {
      meta.notes.push_back(ObjectReader::AsString(notes[k], Index("meta.notes", k)));
    }
  }
  if (r.Has("distance_notes")) {
    const json& rows = r.Array("distance_notes");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string rpath = Index("meta.distance_notes", i);
      if (!rows[i].is_array()) Fail(rpath, "expected an array");
      std::vector<std::string> row;
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        row.push_back(ObjectReader::AsString(rows[i][j], Index(rpath, j)));
      }
      meta.distance_notes.push_back(std::move(row));
    }
  }
  r.Finish();
  return meta;
}

GlobalParams ReadGlobals(const json& v) {
  ObjectReader r(v, "globals");
  GlobalParams g;
  g.empty_run_cost_rmb_per_km = r.Number("empty_run_cost_rmb_per_km");
  g.dispatch_legs = r.Int("dispatch_legs", 1);
  g.interest_rate = r.Number("interest_rate");
  g.budget = r.Number("budget");
  g.dispatch_unbalance = r.Number("dispatch_unbalance");
  g.demand_unbalance = r.Number("demand_unbalance", 1.0);
  g.working_days = r.Number("working_days");
  g.work_unbalance = r.Number("work_unbalance", 1.0);
  g.duration_days =
      ReadSeriesLevelTable(r.Get("duration_days"), r.Path("duration_days"));
  g.maint_cost_ref =
      ReadSeriesLevelTable(r.Get("maint_cost_ref"), r.Path("maint_cost_ref"));
  if (r.Has("demand_rounding")) {
    const std::string text = r.String("demand_rounding");
    auto mode = ParseRoundingMode(text);
    if (!mode) Fail(r.Path("demand_rounding"), "unknown rounding mode '" + text + "'");
    g.demand_rounding = *mode;
  }
  if (r.Has("rounding_scope")) {
    const std::string text = r.String("rounding_scope");
    auto scope = ParseRoundingScope(text);
    if (!scope) Fail(r.Path("rounding_scope"), "unknown rounding scope '" + text + "'");
    g.rounding_scope = *scope;
  }
  g.sweep_budget_relax = r.Number("sweep_budget_relax", 1.5);
  r.Finish();
  return g;
}

EmuType ReadEmuType(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  EmuType t;
  t.id = r.Int("id");
  t.name = r.String("name", "");
  t.series = r.String("series");
  t.standardization_factor = r.Int("standardization_factor", 1);
  t.annual_mileage_km = r.Number("annual_mileage_km");
  const json& cycles = r.Array("cycle_km");
  if (cycles.size() == 1) {
    const double l3 = ObjectReader::AsNumber(cycles[0], Index(r.Path("cycle_km"), 0));
    t.cycle_km = {l3, 2.0 * l3, 4.0 * l3};
  } else if (cycles.size() == static_cast<std::size_t>(kNumLevels)) {
    for (int k = 0; k < kNumLevels; ++k) {
      t.cycle_km[k] = ObjectReader::AsNumber(cycles[k], Index(r.Path("cycle_km"), k));
    }
  } else {
    Fail(r.Path("cycle_km"), "expected 1 (level III only) or 3 values");
  }
  r.Finish();
  return t;
}

Depot ReadDepot(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  Depot d;
  d.id = r.Int("id");
  d.name = r.String("name", "");
  const json& fleet = r.Array("fleet");
  for (std::size_t k = 0; k < fleet.size(); ++k) {
    ObjectReader fr(fleet[k], Index(r.Path("fleet"), k));
    FleetEntry f;
    f.type_id = fr.Int("type");
    f.train_count = fr.Int("trains");
    fr.Finish();
    d.fleet.push_back(f);
  }
  r.Finish();
  return d;
}

PoolMember ReadMember(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  PoolMember m;
  const bool has_series = r.Has("series");
  const bool has_types = r.Has("types");
  if (has_series == has_types) Fail(path, "give exactly one of 'series' or 'types'");
  if (has_series) {
    m.series = r.String("series");
    if (m.series.empty()) Fail(r.Path("series"), "series tag is empty");
  } else {
    const json& ids = r.Array("types");
    if (ids.empty()) Fail(r.Path("types"), "type list is empty");
    for (std::size_t k = 0; k < ids.size(); ++k) {
      m.type_ids.push_back(ObjectReader::AsInt(ids[k], Index(r.Path("types"), k)));
    }
  }
  m.level = r.Int("level");
  m.conversion = r.Number("conversion", 1.0);
  r.Finish();
  return m;
}

CapacityPool ReadPool(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  CapacityPool pool;
  pool.id = r.String("id");
  const json& members = r.Array("members");
  for (std::size_t k = 0; k < members.size(); ++k) {
    pool.members.push_back(ReadMember(members[k], Index(r.Path("members"), k)));
  }
  pool.initial_positions = r.Int("initial_positions", 0);
  if (r.Has("capacity_override")) pool.capacity_override = r.Number("capacity_override");
  if (r.Has("reference_level")) pool.reference_level = r.Int("reference_level");
  r.Finish();
  return pool;
}

ConstructionPlan ReadPlan(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  ConstructionPlan plan;
  plan.id = r.Int("id");
  const std::string kind = r.String("kind");
  if (kind == "new") {
    plan.kind = PlanKind::kNew;
  } else if (kind == "expansion") {
    plan.kind = PlanKind::kExpansion;
  } else {
    Fail(r.Path("kind"), "expected 'new' or 'expansion'");
  }
  plan.reference_investment = r.Number("reference_investment");
  plan.payback_years = r.Int("payback_years");
  const json& added = r.Get("added_positions");
  if (!added.is_object()) Fail(r.Path("added_positions"), "expected an object keyed by pool id");
  for (auto it = added.begin(); it != added.end(); ++it) {
    plan.added_positions[it.key()] =
        ObjectReader::AsInt(it.value(), r.Path("added_positions") + "." + it.key());
  }
  r.Finish();
  return plan;
}

Base ReadBase(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  Base b;
  b.id = r.Int("id");
  b.name = r.String("name", "");
  b.invest_ratio = r.Number("invest_ratio", 0.0);
  b.maint_ratio = r.Number("maint_ratio", 0.0);
  if (r.Has("pools")) {
    const json& pools = r.Array("pools");
    for (std::size_t k = 0; k < pools.size(); ++k) {
      b.pools.push_back(ReadPool(pools[k], Index(r.Path("pools"), k)));
    }
  }
  if (r.Has("plans")) {
    const json& plans = r.Array("plans");
    for (std::size_t k = 0; k < plans.size(); ++k) {
      b.plans.push_back(ReadPlan(plans[k], Index(r.Path("plans"), k)));
    }
  }
  r.Finish();
  return b;
}

Scenario FromJson(const json& doc) {
  ObjectReader r(doc, "$");
  Scenario s;
  if (r.Has("meta")) s.meta = ReadMeta(r.Get("meta"));
  s.globals = ReadGlobals(r.Get("globals"));
  const json& types = r.Array("emu_types");
  for (std::size_t k = 0; k < types.size(); ++k) {
    s.emu_types.push_back(ReadEmuType(types[k], Index("emu_types", k)));
  }
  const json& depots = r.Array("depots");
  for (std::size_t k = 0; k < depots.size(); ++k) {
    s.depots.push_back(ReadDepot(depots[k], Index("depots", k)));
  }
  const json& bases = r.Array("bases");
  for (std::size_t k = 0; k < bases.size(); ++k) {
    s.bases.push_back(ReadBase(bases[k], Index("bases", k)));
  }
  const json& rows = r.Array("distances");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string rpath = Index("distances", i);
    if (!rows[i].is_array()) Fail(rpath, "expected an array");
    std::vector<double> row;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      // Range checks belong to Validate so negatives are reported with (i, j).
      if (!rows[i][j].is_number()) Fail(Index(rpath, j), "expected a number");
      row.push_back(rows[i][j].get<double>());
    }
    s.distances.push_back(std::move(row));
  }
  r.Finish();
  return s;
}

ordered_json TableToJson(const SeriesLevelTable& table) {
  ordered_json out = ordered_json::object();
  for (const auto& [series, levels] : table) {
    ordered_json row = ordered_json::object();
    for (const auto& [level, value] : levels) row[std::to_string(level)] = value;
    out[series] = row;
  }
  return out;
}

ordered_json ToJson(const Scenario& s) {
  ordered_json doc;
  ordered_json meta;
  meta["name"] = s.meta.name;
  meta["currency"] = s.meta.currency;
  meta["notes"] = s.meta.notes;
  if (!s.meta.distance_notes.empty()) meta["distance_notes"] = s.meta.distance_notes;
  doc["meta"] = meta;

  const GlobalParams& g = s.globals;
  ordered_json globals;
  globals["empty_run_cost_rmb_per_km"] = g.empty_run_cost_rmb_per_km;
  globals["dispatch_legs"] = g.dispatch_legs;
  globals["interest_rate"] = g.interest_rate;
  globals["budget"] = g.budget;
  globals["dispatch_unbalance"] = g.dispatch_unbalance;
  globals["demand_unbalance"] = g.demand_unbalance;
  globals["working_days"] = g.working_days;
  globals["work_unbalance"] = g.work_unbalance;
  globals["duration_days"] = TableToJson(g.duration_days);
  globals["maint_cost_ref"] = TableToJson(g.maint_cost_ref);
  globals["demand_rounding"] = RoundingModeName(g.demand_rounding);
  globals["rounding_scope"] = RoundingScopeName(g.rounding_scope);
  globals["sweep_budget_relax"] = g.sweep_budget_relax;
  doc["globals"] = globals;

  ordered_json types = ordered_json::array();
  for (const EmuType& t : s.emu_types) {
    ordered_json e;
    e["id"] = t.id;
    e["name"] = t.name;
    e["series"] = t.series;
    e["standardization_factor"] = t.standardization_factor;
    e["annual_mileage_km"] = t.annual_mileage_km;
    e["cycle_km"] = t.cycle_km;
    types.push_back(e);
  }
  doc["emu_types"] = types;

  ordered_json depots = ordered_json::array();
  for (const Depot& d : s.depots) {
    ordered_json e;
    e["id"] = d.id;
    e["name"] = d.name;
    ordered_json fleet = ordered_json::array();
    for (const FleetEntry& f : d.fleet) {
      fleet.push_back(ordered_json{{"type", f.type_id}, {"trains", f.train_count}});
    }
    e["fleet"] = fleet;
    depots.push_back(e);
  }
  doc["depots"] = depots;

  ordered_json bases = ordered_json::array();
  for (const Base& b : s.bases) {
    ordered_json e;
    e["id"] = b.id;
    e["name"] = b.name;
    e["invest_ratio"] = b.invest_ratio;
    e["maint_ratio"] = b.maint_ratio;
    ordered_json pools = ordered_json::array();
    for (const CapacityPool& p : b.pools) {
      ordered_json pj;
      pj["id"] = p.id;
      ordered_json members = ordered_json::array();
      for (const PoolMember& m : p.members) {
        ordered_json mj;
        if (!m.series.empty()) {
          mj["series"] = m.series;
        } else {
          mj["types"] = m.type_ids;
        }
        mj["level"] = m.level;
        mj["conversion"] = m.conversion;
        members.push_back(mj);
      }
      pj["members"] = members;
      pj["initial_positions"] = p.initial_positions;
      if (p.capacity_override) pj["capacity_override"] = *p.capacity_override;
      if (p.reference_level) pj["reference_level"] = *p.reference_level;
      pools.push_back(pj);
    }
    e["pools"] = pools;
    ordered_json plans = ordered_json::array();
    for (const ConstructionPlan& p : b.plans) {
      ordered_json pj;
      pj["id"] = p.id;
      pj["kind"] = PlanKindName(p.kind);
      pj["reference_investment"] = p.reference_investment;
      pj["payback_years"] = p.payback_years;
      ordered_json added = ordered_json::object();
      for (const auto& [pool, n] : p.added_positions) added[pool] = n;
      pj["added_positions"] = added;
      plans.push_back(pj);
    }
    e["plans"] = plans;
    bases.push_back(e);
  }
  doc["bases"] = bases;
  doc["distances"] = s.distances;
  return doc;
}

}  // namespace

ScenarioValidationError::ScenarioValidationError(std::vector<Violation> violations)
    : std::runtime_error([&] {
        std::string text = "scenario has " + std::to_string(violations.size()) +
                           " violation(s)";
        for (const Violation& v : violations) text += "\n  " + FormatViolation(v);
        return text;
      }()),
      violations_(std::move(violations)) {}

Scenario ParseScenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(std::string("malformed JSON: ") + e.what());
  }
  return FromJson(doc);
}

Scenario LoadScenarioFromString(const std::string& text) {
  Scenario s = ParseScenario(text);
  std::vector<Violation> violations = Validate(s);
  if (!violations.empty()) throw ScenarioValidationError(std::move(violations));
  return s;
}

Scenario LoadScenarioFromStream(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return LoadScenarioFromString(buffer.str());
}

Scenario LoadScenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioParseError(path + ": cannot open file");
  return LoadScenarioFromStream(in);
}

std::string SerializeScenario(const Scenario& scenario) {
  return ToJson(scenario).dump(2) + "\n";
}

}  // namespace mblap
