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

#include "mblap/report.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mblap {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string Money(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string UtcNow() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json CellJson(const Scenario& s, const DemandCell& c) {
  return ordered_json{{"depot", s.depots[c.depot].name},
                      {"type", s.emu_types[c.type].name},
                      {"level", c.level},
                      {"n", c.n}};
}

}  // namespace

std::string FormatNumber(double value) {
  if (!std::isfinite(value)) return value > 0 ? "inf" : (value < 0 ? "-inf" : "nan");
  char buf[64];
  auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string SolveReportJson(const Scenario& s, const SolveReport& report,
                            const ReportSettings& settings) {
  ordered_json doc;
  doc["scenario"] = s.meta.name;
  doc["command"] = settings.command;
  doc["status"] = SolveStatusName(report.status);
  doc["optimal"] = report.optimal();
  doc["currency"] = s.meta.currency;

  ordered_json used;
  used["budget"] = s.globals.budget;
  used["dispatch_unbalance"] = s.globals.dispatch_unbalance;
  used["interest_rate"] = s.globals.interest_rate;
  used["empty_run_cost_rmb_per_km"] = s.globals.empty_run_cost_rmb_per_km;
  used["dispatch_legs"] = s.globals.dispatch_legs;
  used["demand_rounding"] = RoundingModeName(s.globals.demand_rounding);
  used["rounding_scope"] = RoundingScopeName(s.globals.rounding_scope);
  used["sweep_budget_relax"] = s.globals.sweep_budget_relax;
  ordered_json overrides = ordered_json::object();
  for (const auto& [k, v] : settings.overrides) overrides[k] = v;
  used["overrides"] = overrides;
  doc["settings"] = used;

  const bool solved = report.status != SolveStatus::kInfeasible ||
                      report.allocation.HasSolution();
  ordered_json decision = ordered_json::array();
  if (report.decision.plan.size() == s.bases.size()) {
    for (std::size_t j = 0; j < s.bases.size(); ++j) {
      const int p = report.decision.plan[j];
      ordered_json e;
      e["base"] = s.bases[j].name;
      e["base_id"] = s.bases[j].id;
      e["plan"] = p;
      const ConstructionPlan* plan = s.FindPlan(static_cast<int>(j), p);
      e["kind"] = plan ? PlanKindName(plan->kind) : "none";
      e["investment"] = PlanInvestment(s, static_cast<int>(j), p);
      e["annualized_investment"] = PlanAnnualizedInvestment(s, static_cast<int>(j), p);
      decision.push_back(e);
    }
  }
  doc["decision"] = decision;

  ordered_json costs;
  costs["total_investment"] = report.total_investment;
  costs["annualized_investment"] = report.annualized_investment;
  costs["dispatch"] = report.dispatch_cost;
  costs["maintenance"] = report.maint_cost;
  costs["z_lower"] = report.z_lower;
  costs["z_upper"] = report.z_upper;
  costs["construction_share"] =
      report.z_upper > 0.0 ? report.annualized_investment / report.z_upper : 0.0;
  doc["costs"] = solved ? costs : ordered_json(nullptr);

  ordered_json demand;
  demand["raw_total"] = report.demand.TotalRaw();
  demand["standard_sets"] = report.demand.Total();
  doc["demand"] = demand;

  ordered_json bases = ordered_json::array();
  if (report.allocation.HasSolution()) {
    for (std::size_t j = 0; j < s.bases.size(); ++j) {
      const int sets = report.allocation.BaseTotal(static_cast<int>(j));
      double dispatch = 0.0;
      double maint = 0.0;
      for (const Flow& f : report.allocation.flows) {
        if (f.base != static_cast<int>(j)) continue;
        dispatch += DispatchUnitCost(s, f.depot, f.base) * f.count;
        maint += MaintUnitCost(s, f.base, f.type, f.level) * f.count;
      }
      if (sets == 0 && report.decision.plan[j] == 0) continue;
      ordered_json b;
      b["base"] = s.bases[j].name;
      b["standard_sets"] = sets;
      ordered_json levels = ordered_json::object();
      for (int level : kLevels) {
        int n = 0;
        for (const auto& per_type : report.allocation.workload[j]) n += per_type[LevelIndex(level)];
        levels[std::to_string(level)] = n;
      }
      b["sets_by_level"] = levels;
      b["dispatch"] = dispatch;
      b["maintenance"] = maint;
      bases.push_back(b);
    }
  }
  doc["bases"] = bases;

  ordered_json pools = ordered_json::array();
  for (const PoolUsage& u : report.allocation.pools) {
    ordered_json p;
    p["base"] = s.bases[u.base].name;
    p["pool"] = s.bases[u.base].pools[u.pool].id;
    p["capacity"] = u.capacity;
    p["load"] = u.load;
    p["utilization"] = u.utilization;
    pools.push_back(p);
  }
  doc["pools"] = pools;

  ordered_json flows = ordered_json::array();
  for (const Flow& f : report.allocation.flows) {
    flows.push_back(ordered_json{{"depot", s.depots[f.depot].name},
                                 {"base", s.bases[f.base].name},
                                 {"type", s.emu_types[f.type].name},
                                 {"level", f.level},
                                 {"f", f.count}});
  }
  doc["allocation"] = flows;

  ordered_json uncovered = ordered_json::array();
  for (const DemandCell& c : report.uncovered) uncovered.push_back(CellJson(s, c));
  doc["uncovered"] = uncovered;
  doc["detail"] = report.detail;

  ordered_json stats;
  stats["decisions_enumerated"] = report.stats.enumerated;
  stats["pruned_by_budget"] = report.stats.pruned_by_budget;
  stats["pruned_by_capacity"] = report.stats.pruned_by_capacity;
  doc["stats"] = stats;

  ordered_json meta;
  meta["generated_at"] = UtcNow();
  meta["scenario_path"] = settings.scenario_path;
  meta["wall_seconds"] = report.stats.wall_seconds;
  meta["pruned_by_bound"] = report.stats.pruned_by_bound;
  meta["lower_level_solves"] = report.stats.lower_level_solves;
  meta["lower_level_nodes"] = report.stats.lower_level_nodes;
  doc["metadata"] = meta;
  return doc.dump(2) + "\n";
}

std::string StripMetadata(const std::string& report_json) {
  ordered_json doc = ordered_json::parse(report_json);
  doc.erase("metadata");
  return doc.dump(2) + "\n";
}

std::string SummaryText(const Scenario& s, const SolveReport& report) {
  std::ostringstream out;
  out << "scenario: " << s.meta.name << "\n";
  out << "status: " << SolveStatusName(report.status) << "\n";
  if (!report.allocation.HasSolution()) {
    if (!report.detail.empty()) out << "detail: " << report.detail << "\n";
    for (const DemandCell& c : report.uncovered) {
      out << "uncovered: " << s.depots[c.depot].name << " " << s.emu_types[c.type].name
          << " level " << c.level << " (" << c.n << " sets)\n";
    }
    return out.str();
  }
  out << "decision:\n";
  bool any = false;
  for (std::size_t j = 0; j < s.bases.size(); ++j) {
    const int p = report.decision.plan[j];
    if (p == 0) continue;
    any = true;
    const ConstructionPlan* plan = s.FindPlan(static_cast<int>(j), p);
    out << "  " << s.bases[j].name << ": plan " << p << " (" << PlanKindName(plan->kind)
        << "), investment " << Money(PlanInvestment(s, static_cast<int>(j), p)) << "\n";
  }
  if (!any) out << "  no construction\n";
  out << "total investment: " << Money(report.total_investment) << "\n";
  out << "annualized investment: " << Money(report.annualized_investment) << "\n";
  out << "dispatch cost: " << Money(report.dispatch_cost) << "\n";
  out << "maintenance cost: " << Money(report.maint_cost) << "\n";
  out << "lower-level total: " << Money(report.z_lower) << "\n";
  out << "annual total cost: " << Money(report.z_upper) << "\n";
  out << "standard sets per base:\n";
  for (std::size_t j = 0; j < s.bases.size(); ++j) {
    const int sets = report.allocation.BaseTotal(static_cast<int>(j));
    if (sets > 0) out << "  " << s.bases[j].name << ": " << sets << "\n";
  }
  out << "(money in " << s.meta.currency << ", per year except investment)\n";
  return out.str();
}

std::string AllocationCsv(const Scenario& s, const std::vector<Flow>& flows) {
  std::string out = "depot,base,type,level,f\n";
  for (const Flow& f : flows) {
    out += CsvField(s.depots[f.depot].name) + "," + CsvField(s.bases[f.base].name) + "," +
           CsvField(s.emu_types[f.type].name) + "," + std::to_string(f.level) + "," +
           std::to_string(f.count) + "\n";
  }
  return out;
}

std::vector<Flow> ParseAllocationCsv(const Scenario& s, const std::string& text) {
  auto find = [](const auto& items, const std::string& name, const char* what) {
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (items[k].name == name) return static_cast<int>(k);
    }
    throw std::runtime_error(std::string("unknown ") + what + " '" + name + "'");
  };
  std::vector<Flow> flows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 5) throw std::runtime_error("malformed allocation row: " + line);
    flows.push_back({find(s.depots, f[0], "depot"), find(s.bases, f[1], "base"),
                     find(s.emu_types, f[2], "type"), std::stoi(f[3]), std::stoi(f[4])});
  }
  return flows;
}

std::string DemandCsv(const Scenario& s, const DemandTable& demand) {
  std::string out = "depot,type,level,raw,N\n";
  for (int i = 0; i < demand.num_depots(); ++i) {
    for (int e = 0; e < demand.num_types(); ++e) {
      for (int level : kLevels) {
        out += CsvField(s.depots[i].name) + "," + CsvField(s.emu_types[e].name) + "," +
               std::to_string(level) + "," + FormatNumber(demand.raw(i, e, level)) + "," +
               std::to_string(demand.n(i, e, level)) + "\n";
      }
    }
  }
  return out;
}

std::string CapacityCsv(const Scenario& s) {
  std::string out = "base,plan,pool,positions,capacity\n";
  for (int j = 0; j < static_cast<int>(s.bases.size()); ++j) {
    std::vector<int> options = {0};
    for (const ConstructionPlan& p : s.bases[j].plans) options.push_back(p.id);
    std::sort(options.begin() + 1, options.end());
    for (int p : options) {
      for (const PoolState& st : EffectiveCapacity(s, j, p)) {
        out += CsvField(s.bases[j].name) + "," + std::to_string(p) + "," +
               CsvField(s.bases[j].pools[st.pool_index].id) + "," +
               std::to_string(st.positions) + "," + FormatNumber(st.capacity) + "\n";
      }
    }
  }
  return out;
}

std::string SweepCsv(const Scenario& s, SweepFactor factor, const std::vector<SweepRow>& rows) {
  std::string out =
      "factor,multiplier,feasible,status,z_upper,annualized_investment,"
      "construction_share,total_demand,decision\n";
  for (const SweepRow& r : rows) {
    out += std::string(SweepFactorName(factor)) + "," + FormatNumber(r.multiplier) + "," +
           (r.feasible ? "true" : "false") + "," + SolveStatusName(r.status) + "," +
           FormatNumber(r.z_upper) + "," + FormatNumber(r.annualized_investment) + "," +
           FormatNumber(r.construction_share) + "," + std::to_string(r.total_demand) + "," +
           CsvField(r.feasible ? FormatDecision(s, r.decision) : "") + "\n";
  }
  return out;
}

std::string SweepLongCsv(SweepFactor factor, const std::vector<SweepRow>& rows) {
  std::string out = "factor,multiplier,metric,value\n";
  for (const SweepRow& r : rows) {
    if (!r.feasible) continue;
    const std::string prefix =
        std::string(SweepFactorName(factor)) + "," + FormatNumber(r.multiplier) + ",";
    out += prefix + "z_upper," + FormatNumber(r.z_upper) + "\n";
    out += prefix + "annualized_investment," + FormatNumber(r.annualized_investment) + "\n";
    out += prefix + "construction_share," + FormatNumber(r.construction_share) + "\n";
  }
  return out;
}

}  // namespace mblap
