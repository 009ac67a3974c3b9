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

#include "mblap/allocation.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "mblap/audit.h"
#include "mblap/lp.h"

namespace mblap {

namespace {

constexpr double kCostTieTolerance = 1e-9;

double Slack(double value) {
  return std::isfinite(value) ? kCostTieTolerance * std::max(1.0, std::fabs(value)) : 0.0;
}

// Demand rows sharing one column pattern, solved as a single aggregate row.
struct Group {
  std::vector<int> rows;  // indices into model.demand_rows
  int demand = 0;
};

struct Node {
  std::vector<double> lower;
  std::vector<double> upper;
  int depth = 0;
  double bound = 0.0;
  long seq = 0;
};

using Clock = std::chrono::steady_clock;

bool SamePattern(const LowerModel& model, const DemandRow& a, const DemandRow& b) {
  if (a.cell.depot != b.cell.depot || a.columns.size() != b.columns.size()) return false;
  for (std::size_t k = 0; k < a.columns.size(); ++k) {
    const LowerColumn& x = model.columns[a.columns[k]];
    const LowerColumn& y = model.columns[b.columns[k]];
    if (x.base != y.base || x.cost != y.cost || x.pool_row != y.pool_row ||
        x.load != y.load) {
      return false;
    }
  }
  return true;
}

std::vector<Group> BuildGroups(const LowerModel& model, bool merge) {
  std::vector<Group> groups;
  for (int r = 0; r < static_cast<int>(model.demand_rows.size()); ++r) {
    const DemandRow& row = model.demand_rows[r];
    bool placed = false;
    if (merge) {
      for (Group& g : groups) {
        if (SamePattern(model, model.demand_rows[g.rows.front()], row)) {
          g.rows.push_back(r);
          g.demand += row.cell.n;
          placed = true;
          break;
        }
      }
    }
    if (!placed) groups.push_back({{r}, row.cell.n});
  }
  return groups;
}

// Slot k of group g is the k-th column of the group's first row.
struct Aggregate {
  std::vector<Group> groups;
  std::vector<int> var_group;
  std::vector<int> var_slot;
  std::vector<double> var_cost;
  LinearProgram lp;
};

// Rewrites a <= row over integer variables with integer coefficients and a
// rounded-down right-hand side when the loads share a small common
// denominator. The integer points are unchanged; the relaxation tightens.
void IntegerScale(std::vector<double>& row, double& rhs) {
  constexpr int kMaxScale = 64;
  constexpr double kExact = 1e-9;
  double unit = kInf;
  for (double a : row) {
    if (a < 0.0) return;
    if (a > 0.0) unit = std::min(unit, a);
  }
  if (!std::isfinite(unit)) return;
  for (int q = 1; q <= kMaxScale; ++q) {
    bool integral = true;
    for (double a : row) {
      const double scaled = q * a / unit;
      integral = integral && std::fabs(scaled - std::round(scaled)) <= kExact * scaled + kExact;
    }
    if (!integral) continue;
    for (double& a : row) a = std::round(q * a / unit);
    rhs = std::floor(q * rhs / unit + Tolerances::kFeasibility);
    return;
  }
}

Aggregate BuildAggregate(const LowerModel& model, bool merge) {
  Aggregate agg;
  agg.groups = BuildGroups(model, merge);
  for (int g = 0; g < static_cast<int>(agg.groups.size()); ++g) {
    const DemandRow& first = model.demand_rows[agg.groups[g].rows.front()];
    for (int k = 0; k < static_cast<int>(first.columns.size()); ++k) {
      agg.var_group.push_back(g);
      agg.var_slot.push_back(k);
      agg.var_cost.push_back(model.columns[first.columns[k]].cost);
    }
  }
  const int n = static_cast<int>(agg.var_group.size());
  agg.lp = LinearProgram(n);
  agg.lp.objective = agg.var_cost;
  for (int v = 0; v < n; ++v) agg.lp.upper[v] = agg.groups[agg.var_group[v]].demand;

  for (int g = 0; g < static_cast<int>(agg.groups.size()); ++g) {
    std::vector<double> row(n, 0.0);
    for (int v = 0; v < n; ++v) {
      if (agg.var_group[v] == g) row[v] = 1.0;
    }
    agg.lp.AddRow(std::move(row), RowSense::kEqual, agg.groups[g].demand);
  }
  for (int p = 0; p < static_cast<int>(model.pool_rows.size()); ++p) {
    if (!std::isfinite(model.pool_rows[p].capacity)) continue;
    std::vector<double> row(n, 0.0);
    bool any = false;
    for (int v = 0; v < n; ++v) {
      const DemandRow& first = model.demand_rows[agg.groups[agg.var_group[v]].rows.front()];
      const LowerColumn& c = model.columns[first.columns[agg.var_slot[v]]];
      if (c.pool_row == p) {
        row[v] = c.load;
        any = true;
      }
    }
    if (!any) continue;
    double rhs = model.pool_rows[p].capacity;
    IntegerScale(row, rhs);
    agg.lp.AddRow(std::move(row), RowSense::kLessEqual, rhs);
  }
  return agg;
}

// Spreads each aggregate slot value over the group's member rows, first row
// first and lowest slot first.
std::vector<Flow> Disaggregate(const LowerModel& model, const Aggregate& agg,
                               const std::vector<int>& y) {
  std::vector<Flow> flows;
  std::vector<std::vector<int>> slot_values(agg.groups.size());
  for (std::size_t v = 0; v < y.size(); ++v) {
    auto& values = slot_values[agg.var_group[v]];
    if (static_cast<int>(values.size()) <= agg.var_slot[v]) values.resize(agg.var_slot[v] + 1, 0);
    values[agg.var_slot[v]] = y[v];
  }
  for (std::size_t g = 0; g < agg.groups.size(); ++g) {
    std::vector<int> left = slot_values[g];
    std::size_t slot = 0;
    for (int r : agg.groups[g].rows) {
      const DemandRow& row = model.demand_rows[r];
      int need = row.cell.n;
      while (need > 0 && slot < left.size()) {
        const int take = std::min(need, left[slot]);
        if (take > 0) {
          const LowerColumn& c = model.columns[row.columns[slot]];
          flows.push_back({c.depot, c.base, c.type, c.level, take});
          need -= take;
          left[slot] -= take;
        }
        if (left[slot] == 0) ++slot;
      }
    }
  }
  std::sort(flows.begin(), flows.end(), [](const Flow& a, const Flow& b) {
    return std::tie(a.depot, a.base, a.type, a.level) <
           std::tie(b.depot, b.base, b.type, b.level);
  });
  return flows;
}

void FillPlan(const Scenario& s, const LowerModel& model, const std::vector<Flow>& flows,
              AllocationPlan& plan) {
  plan.flows = flows;
  plan.workload.assign(s.bases.size(),
                       std::vector<std::array<int, kNumLevels>>(s.emu_types.size(),
                                                                {0, 0, 0}));
  std::map<std::tuple<int, int, int, int>, double> unit_cost;
  for (const LowerColumn& c : model.columns) {
    unit_cost[{c.depot, c.base, c.type, c.level}] = c.cost;
  }
  std::vector<double> load(model.pool_rows.size(), 0.0);
  std::map<std::tuple<int, int, int, int>, int> column_of;
  for (int k = 0; k < static_cast<int>(model.columns.size()); ++k) {
    const LowerColumn& c = model.columns[k];
    column_of[{c.depot, c.base, c.type, c.level}] = k;
  }
  plan.cost = {};
  for (const Flow& f : flows) {
    plan.workload[f.base][f.type][LevelIndex(f.level)] += f.count;
    const LowerColumn& c = model.columns[column_of.at({f.depot, f.base, f.type, f.level})];
    plan.cost.dispatch += DispatchUnitCost(s, f.depot, f.base) * f.count;
    plan.cost.maintenance += MaintUnitCost(s, f.base, f.type, f.level) * f.count;
    if (c.pool_row >= 0) load[c.pool_row] += c.load * f.count;
  }
  plan.cost.total = plan.cost.dispatch + plan.cost.maintenance;
  plan.pools.clear();
  for (std::size_t p = 0; p < model.pool_rows.size(); ++p) {
    const PoolRow& row = model.pool_rows[p];
    PoolUsage u;
    u.base = row.base;
    u.pool = row.pool;
    u.capacity = row.capacity;
    u.load = load[p];
    const bool bounded = row.capacity > 0.0 && std::isfinite(row.capacity);
    u.utilization = bounded ? load[p] / row.capacity : 0.0;
    plan.pools.push_back(u);
  }
}

double MaintRef(const Scenario& s, int type, int level) {
  return s.globals.maint_cost_ref.at(s.emu_types.at(type).series).at(level);
}

}  // namespace

const char* AllocationStatusName(AllocationStatus status) {
  switch (status) {
    case AllocationStatus::kOptimal:
      return "optimal";
    case AllocationStatus::kInfeasible:
      return "infeasible";
    case AllocationStatus::kUnproven:
      return "unproven";
    case AllocationStatus::kLimitNoSolution:
      return "limit-no-solution";
    case AllocationStatus::kCutoff:
      return "cutoff";
    case AllocationStatus::kNumericFailure:
      return "numeric-failure";
  }
  return "numeric-failure";
}

int AllocationPlan::BaseTotal(int base) const {
  int total = 0;
  for (const Flow& f : flows) {
    if (f.base == base) total += f.count;
  }
  return total;
}

LowerModel BuildLowerModel(const Scenario& s, const DemandTable& demand,
                           const InvestmentDecision& decision) {
  CheckDecision(s, decision);
  if (demand.num_depots() != static_cast<int>(s.depots.size()) ||
      demand.num_types() != static_cast<int>(s.emu_types.size())) {
    throw std::invalid_argument("demand table does not match the scenario");
  }
  LowerModel model;
  model.theta = s.globals.dispatch_unbalance;
  const int bases = static_cast<int>(s.bases.size());
  const int types = static_cast<int>(s.emu_types.size());

  // pool_row_of[j][q] for pools with positive capacity.
  std::vector<std::vector<int>> pool_row_of(bases);
  for (int j = 0; j < bases; ++j) {
    const std::vector<PoolState> pools = EffectiveCapacity(s, j, decision.plan[j]);
    pool_row_of[j].assign(pools.size(), -1);
    for (const PoolState& p : pools) {
      if (p.capacity <= 0.0) continue;
      pool_row_of[j][p.pool_index] = static_cast<int>(model.pool_rows.size());
      model.pool_rows.push_back({j, p.pool_index, p.capacity, {}});
    }
  }

  for (int i = 0; i < demand.num_depots(); ++i) {
    for (int e = 0; e < types; ++e) {
      for (int level : kLevels) {
        const int n = demand.n(i, e, level);
        if (n <= 0) continue;
        DemandRow row;
        row.cell = {i, e, level, n};
        for (int j = 0; j < bases; ++j) {
          const Coverage cov = FindCoverage(s, j, e, level);
          if (cov.pool_index < 0) continue;
          const int pool_row = pool_row_of[j][cov.pool_index];
          if (pool_row < 0) continue;
          LowerColumn c;
          c.depot = i;
          c.base = j;
          c.type = e;
          c.level = level;
          c.cost = DispatchUnitCost(s, i, j) + MaintUnitCost(s, j, e, level);
          c.pool_row = pool_row;
          c.load = model.theta * cov.conversion;
          const int k = static_cast<int>(model.columns.size());
          model.columns.push_back(c);
          row.columns.push_back(k);
          model.pool_rows[pool_row].columns.push_back(k);
        }
        if (row.columns.empty()) model.uncovered.push_back(row.cell);
        model.demand_rows.push_back(std::move(row));
      }
    }
  }
  return model;
}

AllocationPlan SolveAllocation(const Scenario& s, const LowerModel& model,
                               const AllocationOptions& options) {
  AllocationPlan plan;
  plan.uncovered = model.uncovered;
  if (model.InfeasibleByConstruction()) {
    plan.status = AllocationStatus::kInfeasible;
    plan.detail = "demand without a capable base";
    return plan;
  }
  if (model.demand_rows.empty()) {
    plan.status = AllocationStatus::kOptimal;
    FillPlan(s, model, {}, plan);
    AuditAllocation(s, model, plan);
    return plan;
  }

  const Aggregate agg = BuildAggregate(model, options.merge_rows);
  const int n = agg.lp.num_vars;
  const auto start = Clock::now();
  auto out_of_time = [&] {
    if (options.time_limit_seconds <= 0.0) return false;
    return std::chrono::duration<double>(Clock::now() - start).count() >
           options.time_limit_seconds;
  };

  std::vector<int> incumbent;
  double incumbent_cost = kInf;
  bool cut_by_cutoff = false;
  const double cutoff = options.cutoff.value_or(kInf);

  std::vector<Node> open;
  long seq = 0;
  open.push_back({agg.lp.lower, agg.lp.upper, 0, -kInf, seq++});
  LinearProgram work = agg.lp;
  bool limit_hit = false;
  bool root = true;

  while (!open.empty()) {
    if (plan.nodes >= options.node_limit || out_of_time()) {
      limit_hit = true;
      break;
    }
    // Deepest node first until an incumbent exists, then the smallest parent
    // bound. Remaining ties go to the earlier node (the floor child).
    std::size_t pick = 0;
    for (std::size_t k = 1; k < open.size(); ++k) {
      const Node& a = open[k];
      const Node& b = open[pick];
      const bool better =
          incumbent.empty()
              ? std::tie(b.depth, a.bound, a.seq) < std::tie(a.depth, b.bound, b.seq)
              : std::tie(a.bound, b.depth, a.seq) < std::tie(b.bound, a.depth, b.seq);
      if (better) pick = k;
    }
    Node node = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    if (node.bound >= incumbent_cost - Slack(incumbent_cost)) continue;
    if (node.bound > cutoff + Slack(cutoff)) {
      cut_by_cutoff = true;
      continue;
    }
    ++plan.nodes;

    work.lower = node.lower;
    work.upper = node.upper;
    const LpOutcome lp = SolveLp(work);
    if (lp.status == LpStatus::kInfeasible) {
      if (root) {
        plan.status = AllocationStatus::kInfeasible;
        plan.detail = "pool capacity cannot absorb the demand";
        return plan;
      }
      continue;
    }
    if (lp.status != LpStatus::kOptimal) {
      plan.status = AllocationStatus::kNumericFailure;
      plan.detail = std::string("LP ") + LpStatusName(lp.status) + ": " + lp.detail;
      return plan;
    }
    if (root) {
      plan.root_bound = lp.objective;
      root = false;
    }
    if (lp.objective >= incumbent_cost - Slack(incumbent_cost)) continue;
    if (lp.objective > cutoff + Slack(cutoff)) {
      cut_by_cutoff = true;
      continue;
    }

    int branch = -1;
    double best_distance = 1.0;
    for (int v = 0; v < n; ++v) {
      const double frac = lp.x[v] - std::floor(lp.x[v]);
      if (frac <= Tolerances::kIntegrality || frac >= 1.0 - Tolerances::kIntegrality) continue;
      const double distance = std::fabs(frac - 0.5);
      if (distance < best_distance) {
        best_distance = distance;
        branch = v;
      }
    }
    if (branch < 0) {
      std::vector<int> y(n);
      double cost = 0.0;
      for (int v = 0; v < n; ++v) {
        y[v] = static_cast<int>(std::llround(lp.x[v]));
        cost += agg.var_cost[v] * y[v];
      }
      if (cost < incumbent_cost - Slack(incumbent_cost) ||
          (cost <= incumbent_cost + Slack(incumbent_cost) && y < incumbent)) {
        incumbent = std::move(y);
        incumbent_cost = cost;
      }
      continue;
    }
    const double value = lp.x[branch];
    Node down{node.lower, node.upper, node.depth + 1, lp.objective, seq++};
    down.upper[branch] = std::floor(value);
    Node up{std::move(node.lower), std::move(node.upper), node.depth + 1, lp.objective, seq++};
    up.lower[branch] = std::ceil(value);
    open.push_back(std::move(down));
    open.push_back(std::move(up));
  }

  if (incumbent.empty()) {
    if (limit_hit) {
      plan.status = AllocationStatus::kLimitNoSolution;
    } else {
      plan.status = cut_by_cutoff ? AllocationStatus::kCutoff : AllocationStatus::kInfeasible;
    }
    return plan;
  }
  plan.status = limit_hit ? AllocationStatus::kUnproven : AllocationStatus::kOptimal;
  FillPlan(s, model, Disaggregate(model, agg, incumbent), plan);
  AuditAllocation(s, model, plan);
  return plan;
}

CostBreakdown RecomputeCosts(const Scenario& s, const std::vector<Flow>& flows) {
  CostBreakdown out;
  const double per_km = s.globals.empty_run_cost_rmb_per_km / 1e6 * s.globals.dispatch_legs;
  for (const Flow& f : flows) {
    const double km = s.distances.at(f.depot).at(f.base);
    const double ref = MaintRef(s, f.type, f.level);
    out.dispatch += per_km * km * f.count;
    out.maintenance += ref * (1.0 + s.bases.at(f.base).maint_ratio) * f.count;
  }
  out.total = out.dispatch + out.maintenance;
  return out;
}

std::vector<std::string> AuditAllocation(const Scenario& s, const LowerModel& model,
                                         const AllocationPlan& plan) {
  std::vector<std::string> failures;
  auto check = [&](AuditLaw law, bool ok, const std::string& detail) {
    RecordAudit(law, ok, detail);
    if (!ok) failures.push_back(std::string(AuditLawName(law)) + ": " + detail);
  };

  // Flow balance against the demand rows; flows outside the model count as
  // violations too.
  std::map<std::tuple<int, int, int>, int> served;
  for (const Flow& f : plan.flows) served[{f.depot, f.type, f.level}] += f.count;
  bool balance = true;
  std::string balance_detail;
  for (const DemandRow& row : model.demand_rows) {
    auto it = served.find({row.cell.depot, row.cell.type, row.cell.level});
    const int got = it == served.end() ? 0 : it->second;
    if (got != row.cell.n) {
      balance = false;
      balance_detail = "depot " + std::to_string(row.cell.depot) + " type " +
                       std::to_string(row.cell.type) + " level " +
                       std::to_string(row.cell.level) + " served " + std::to_string(got) +
                       " of " + std::to_string(row.cell.n);
    }
    if (it != served.end()) served.erase(it);
  }
  for (const auto& [cell, count] : served) {
    if (count != 0) {
      balance = false;
      balance_detail = "flow for a cell without demand";
    }
  }
  for (const Flow& f : plan.flows) {
    if (f.count < 0) {
      balance = false;
      balance_detail = "negative flow";
    }
  }
  check(AuditLaw::kFlowBalance, balance, balance_detail);

  // Pool capacity, with loads rebuilt from the scenario's pool definitions.
  std::map<std::pair<int, int>, double> load;
  bool capable = true;
  for (const Flow& f : plan.flows) {
    const Coverage c = FindCoverage(s, f.base, f.type, f.level);
    if (c.pool_index < 0) {
      capable = false;
      continue;
    }
    load[{f.base, c.pool_index}] += s.globals.dispatch_unbalance * c.conversion * f.count;
  }
  bool capacity_ok = capable;
  std::string capacity_detail = capable ? "" : "flow to an incapable base";
  for (const auto& [key, value] : load) {
    double capacity = 0.0;
    for (const PoolRow& row : model.pool_rows) {
      if (row.base == key.first && row.pool == key.second) capacity = row.capacity;
    }
    if (value > capacity + Tolerances::kFeasibility * std::max(1.0, capacity)) {
      capacity_ok = false;
      capacity_detail = "base " + std::to_string(key.first) + " pool " +
                        std::to_string(key.second) + " load " + std::to_string(value) +
                        " > " + std::to_string(capacity);
    }
  }
  check(AuditLaw::kPoolCapacity, capacity_ok, capacity_detail);

  bool workload_ok = plan.workload.size() == s.bases.size();
  if (workload_ok) {
    std::vector<std::vector<std::array<int, kNumLevels>>> expect(
        s.bases.size(),
        std::vector<std::array<int, kNumLevels>>(s.emu_types.size(), {0, 0, 0}));
    for (const Flow& f : plan.flows) expect[f.base][f.type][LevelIndex(f.level)] += f.count;
    workload_ok = expect == plan.workload;
  }
  check(AuditLaw::kWorkload, workload_ok, "F differs from the sum of f");

  const CostBreakdown again = RecomputeCosts(s, plan.flows);
  const double scale = std::max(1.0, std::fabs(again.total));
  const bool cost_ok = std::fabs(again.total - plan.cost.total) <= 1e-6 * scale &&
                       std::fabs(again.dispatch - plan.cost.dispatch) <= 1e-6 * scale &&
                       std::fabs(again.maintenance - plan.cost.maintenance) <= 1e-6 * scale;
  check(AuditLaw::kCost, cost_ok,
        "reported " + std::to_string(plan.cost.total) + " recomputed " +
            std::to_string(again.total));
  return failures;
}

std::optional<CostBreakdown> GreedyAllocationCost(const LowerModel& model) {
  std::vector<double> residual(model.pool_rows.size());
  for (std::size_t p = 0; p < residual.size(); ++p) residual[p] = model.pool_rows[p].capacity;
  double total = 0.0;
  for (const DemandRow& row : model.demand_rows) {
    std::vector<int> order = row.columns;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return model.columns[a].cost < model.columns[b].cost;
    });
    int need = row.cell.n;
    for (int k : order) {
      if (need == 0) break;
      const LowerColumn& c = model.columns[k];
      double& room = residual[c.pool_row];
      int fit = need;
      if (std::isfinite(room)) {
        fit = std::min<int>(need, static_cast<int>(std::floor((room + 1e-9) / c.load)));
      }
      if (fit <= 0) continue;
      room -= fit * c.load;
      total += fit * c.cost;
      need -= fit;
    }
    if (need > 0) return std::nullopt;
  }
  return CostBreakdown{0.0, 0.0, total};
}

}  // namespace mblap
