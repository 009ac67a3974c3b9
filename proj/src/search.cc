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

#include "mblap/search.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>
#include <utility>

#include "mblap/audit.h"
#include "mblap/lp.h"

namespace mblap {

namespace {

using Clock = std::chrono::steady_clock;

// Node limit of the probe pass.
constexpr long kProbeNodes = 200;

double Slack(double value) {
  return std::isfinite(value) ? 1e-9 * std::max(1.0, std::fabs(value)) : 0.0;
}

// Base indices sorted by id.
std::vector<int> BaseOrder(const Scenario& s) {
  std::vector<int> order(s.bases.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return s.bases[a].id < s.bases[b].id; });
  return order;
}

// 0 followed by the base's plan ids in ascending order.
std::vector<int> PlanOptions(const Base& base) {
  std::vector<int> ids = {0};
  for (const ConstructionPlan& p : base.plans) ids.push_back(p.id);
  std::sort(ids.begin() + 1, ids.end());
  return ids;
}

std::vector<int> LexKey(const std::vector<int>& order, const InvestmentDecision& d) {
  std::vector<int> key;
  key.reserve(order.size());
  for (int j : order) key.push_back(d.plan[j]);
  return key;
}

struct Cell {
  int depot;
  int type;
  int level;
  int n;
};

std::vector<Cell> DemandCells(const DemandTable& demand) {
  std::vector<Cell> cells;
  for (int i = 0; i < demand.num_depots(); ++i) {
    for (int e = 0; e < demand.num_types(); ++e) {
      for (int level : kLevels) {
        if (demand.n(i, e, level) > 0) cells.push_back({i, e, level, demand.n(i, e, level)});
      }
    }
  }
  return cells;
}

// Tables shared by the decision filters. Option k of base j is
// options[j][k]; capable/capacity tables follow the same indexing.
struct Tables {
  std::vector<int> order;
  std::vector<std::vector<int>> options;
  std::vector<std::vector<double>> investment;
  std::vector<std::vector<double>> annualized;
  std::vector<Cell> cells;
  // unit_cost[c][j]; capable[j][k][type * kNumLevels + level index]
  std::vector<std::vector<double>> unit_cost;
  std::vector<std::vector<std::vector<char>>> capable;
  // Capacity sufficiency sets: required load and available[j][k].
  struct CheckSet {
    std::string label;
    double required = 0.0;
    std::vector<std::vector<double>> available;
  };
  std::vector<CheckSet> checks;
};

Tables BuildTables(const Scenario& s, const DemandTable& demand) {
  Tables t;
  t.order = BaseOrder(s);
  const int bases = static_cast<int>(s.bases.size());
  const int types = static_cast<int>(s.emu_types.size());
  t.options.resize(bases);
  t.investment.resize(bases);
  t.annualized.resize(bases);
  t.capable.resize(bases);
  std::vector<std::vector<std::vector<PoolState>>> pools(bases);
  for (int j = 0; j < bases; ++j) {
    t.options[j] = PlanOptions(s.bases[j]);
    for (int p : t.options[j]) {
      t.investment[j].push_back(PlanInvestment(s, j, p));
      t.annualized[j].push_back(PlanAnnualizedInvestment(s, j, p));
      pools[j].push_back(EffectiveCapacity(s, j, p));
      std::vector<char> bits(static_cast<std::size_t>(types) * kNumLevels, 0);
      for (int e = 0; e < types; ++e) {
        for (int level : kLevels) {
          const Coverage c = FindCoverage(s, j, e, level);
          bits[e * kNumLevels + LevelIndex(level)] =
              c.pool_index >= 0 && pools[j].back()[c.pool_index].capacity > 0.0;
        }
      }
      t.capable[j].push_back(std::move(bits));
    }
  }
  t.cells = DemandCells(demand);
  for (const Cell& c : t.cells) {
    std::vector<double> row(bases);
    for (int j = 0; j < bases; ++j) {
      row[j] = DispatchUnitCost(s, c.depot, j) + MaintUnitCost(s, j, c.type, c.level);
    }
    t.unit_cost.push_back(std::move(row));
  }

  // Total demand per (type, level) and the smallest conversion any base
  // would charge for it.
  std::vector<double> total(static_cast<std::size_t>(types) * kNumLevels, 0.0);
  for (const Cell& c : t.cells) total[c.type * kNumLevels + LevelIndex(c.level)] += c.n;
  std::vector<double> min_conversion(total.size(), kInf);
  for (int j = 0; j < bases; ++j) {
    for (int e = 0; e < types; ++e) {
      for (int level : kLevels) {
        const Coverage c = FindCoverage(s, j, e, level);
        double& m = min_conversion[e * kNumLevels + LevelIndex(level)];
        if (c.pool_index >= 0) m = std::min(m, c.conversion);
      }
    }
  }
  // Candidate sets: every demanded (type, level) alone, plus the demanded
  // part of every pool's member set.
  std::set<std::vector<int>> sets;
  for (int k = 0; k < static_cast<int>(total.size()); ++k) {
    if (total[k] > 0.0) sets.insert({k});
  }
  for (int j = 0; j < bases; ++j) {
    for (const CapacityPool& pool : s.bases[j].pools) {
      std::vector<int> members;
      for (int e = 0; e < types; ++e) {
        for (const PoolMember& m : pool.members) {
          const int k = e * kNumLevels + LevelIndex(m.level);
          if (SelectsType(m, s.emu_types[e]) && total[k] > 0.0) members.push_back(k);
        }
      }
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      if (members.size() > 1) sets.insert(members);
    }
  }
  for (const std::vector<int>& members : sets) {
    Tables::CheckSet check;
    for (int k : members) {
      const double conv = std::isfinite(min_conversion[k]) ? min_conversion[k] : 1.0;
      check.required += s.globals.dispatch_unbalance * total[k] * conv;
      if (!check.label.empty()) check.label += ",";
      check.label += s.emu_types[k / kNumLevels].name + "/" +
                     std::to_string(kMinLevel + k % kNumLevels);
    }
    check.available.resize(bases);
    for (int j = 0; j < bases; ++j) {
      for (std::size_t o = 0; o < t.options[j].size(); ++o) {
        double cap = 0.0;
        const std::vector<PoolState>& states = pools[j][o];
        for (std::size_t q = 0; q < states.size(); ++q) {
          bool touches = false;
          for (int k : members) {
            const Coverage c = FindCoverage(s, j, k / kNumLevels, kMinLevel + k % kNumLevels);
            touches = touches || c.pool_index == static_cast<int>(q);
          }
          if (touches) cap += states[q].capacity;
        }
        check.available[j].push_back(cap);
      }
    }
    t.checks.push_back(std::move(check));
  }
  return t;
}

// Option indices per base for a decision.
std::vector<int> OptionIndex(const Tables& t, const InvestmentDecision& d) {
  std::vector<int> idx(d.plan.size());
  for (std::size_t j = 0; j < d.plan.size(); ++j) {
    const auto& opts = t.options[j];
    idx[j] = static_cast<int>(std::find(opts.begin(), opts.end(), d.plan[j]) - opts.begin());
  }
  return idx;
}

bool CapacitySufficient(const Tables& t, const std::vector<int>& option) {
  for (const Tables::CheckSet& check : t.checks) {
    double available = 0.0;
    for (std::size_t j = 0; j < option.size(); ++j) available += check.available[j][option[j]];
    if (available < check.required - Slack(check.required)) return false;
  }
  return true;
}

// annualized investment + uncapacitated cheapest capable assignment.
double DecisionBound(const Tables& t, const std::vector<int>& option) {
  double bound = 0.0;
  for (std::size_t j = 0; j < option.size(); ++j) bound += t.annualized[j][option[j]];
  for (std::size_t c = 0; c < t.cells.size(); ++c) {
    const Cell& cell = t.cells[c];
    const int bit = cell.type * kNumLevels + LevelIndex(cell.level);
    double best = kInf;
    for (std::size_t j = 0; j < option.size(); ++j) {
      if (t.capable[j][option[j]][bit]) best = std::min(best, t.unit_cost[c][j]);
    }
    bound += cell.n * best;
  }
  return bound;
}

void FillCosts(const Scenario& s, SolveReport& report) {
  report.total_investment = TotalInvestment(s, report.decision);
  report.annualized_investment = AnnualizedInvestment(s, report.decision);
  report.dispatch_cost = report.allocation.cost.dispatch;
  report.maint_cost = report.allocation.cost.maintenance;
  report.z_lower = report.allocation.cost.total;
  report.z_upper = report.annualized_investment + report.z_lower;
}

}  // namespace

const char* SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnproven:
      return "unproven";
  }
  return "unproven";
}

long ForEachDecision(const Scenario& s,
                     const std::function<void(const InvestmentDecision&)>& visit) {
  const std::vector<int> order = BaseOrder(s);
  const double budget = s.globals.budget;
  const double limit = budget + Slack(budget);
  InvestmentDecision d = InvestmentDecision::None(s);
  long cut = 0;
  std::vector<std::vector<int>> options;
  std::vector<std::vector<double>> cost;
  for (int j : order) {
    options.push_back(PlanOptions(s.bases[j]));
    std::vector<double> c;
    for (int p : options.back()) c.push_back(PlanInvestment(s, j, p));
    cost.push_back(std::move(c));
  }
  std::function<void(std::size_t, double)> dfs = [&](std::size_t depth, double spent) {
    if (depth == order.size()) {
      RecordAudit(AuditLaw::kBudget, spent <= limit,
                  "decision spends " + std::to_string(spent));
      visit(d);
      return;
    }
    for (std::size_t k = 0; k < options[depth].size(); ++k) {
      const double next = spent + cost[depth][k];
      if (next > limit) {
        ++cut;
        continue;
      }
      d.plan[order[depth]] = options[depth][k];
      dfs(depth + 1, next);
    }
    d.plan[order[depth]] = 0;
  };
  dfs(0, 0.0);
  return cut;
}

std::vector<InvestmentDecision> EnumerateDecisions(const Scenario& s) {
  std::vector<InvestmentDecision> out;
  ForEachDecision(s, [&](const InvestmentDecision& d) { out.push_back(d); });
  return out;
}

double DispatchLowerBound(const Scenario& s, const DemandTable& demand) {
  double total = 0.0;
  for (const Cell& c : DemandCells(demand)) {
    double best = kInf;
    for (int j = 0; j < static_cast<int>(s.bases.size()); ++j) {
      bool capable = false;
      for (int p : PlanOptions(s.bases[j])) {
        capable = capable || Capability(s, j, p)[c.type][LevelIndex(c.level)];
      }
      if (capable) {
        best = std::min(best, DispatchUnitCost(s, c.depot, j) +
                                  MaintUnitCost(s, j, c.type, c.level));
      }
    }
    if (!std::isfinite(best)) return kInf;
    total += c.n * best;
  }
  return total;
}

SolveReport SolveMblap(const Scenario& s, const SearchOptions& options) {
  const auto start = Clock::now();
  SolveReport report;
  report.demand = DeriveDemand(s);
  report.decision = InvestmentDecision::None(s);
  const Tables tables = BuildTables(s, report.demand);

  struct Candidate {
    InvestmentDecision decision;
    std::vector<int> key;
    double annualized;
    double bound;
  };
  std::vector<Candidate> candidates;
  std::vector<char> coverable(report.demand.num_types() * kNumLevels, 0);
  report.stats.pruned_by_budget = ForEachDecision(s, [&](const InvestmentDecision& d) {
    ++report.stats.enumerated;
    const std::vector<int> option = OptionIndex(tables, d);
    for (std::size_t j = 0; j < option.size(); ++j) {
      const auto& bits = tables.capable[j][option[j]];
      for (std::size_t k = 0; k < bits.size(); ++k) coverable[k] |= bits[k];
    }
    if (options.pruning && !CapacitySufficient(tables, option)) {
      ++report.stats.pruned_by_capacity;
      return;
    }
    double annual = 0.0;
    for (std::size_t j = 0; j < option.size(); ++j) annual += tables.annualized[j][option[j]];
    const double bound = options.pruning ? DecisionBound(tables, option) : annual;
    candidates.push_back({d, LexKey(tables.order, d), annual, bound});
  });
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.bound != b.bound) return a.bound < b.bound;
                     return a.key < b.key;
                   });

  std::mutex mu;
  double best_z = kInf;
  int best_index = -1;
  bool unproven = false;
  std::string unproven_detail;
  std::atomic<bool> stop{false};
  std::atomic<long> solves{0};
  std::atomic<long> nodes{0};
  std::atomic<long> bound_pruned{0};
  std::vector<char> done(candidates.size(), 0);

  auto timed_out = [&] {
    if (options.time_limit_seconds <= 0.0) return false;
    return std::chrono::duration<double>(Clock::now() - start).count() >
           options.time_limit_seconds;
  };
  auto incumbent = [&] {
    std::lock_guard<std::mutex> lock(mu);
    return best_z;
  };
  auto mark_unproven = [&](const std::string& detail) {
    std::lock_guard<std::mutex> lock(mu);
    unproven = true;
    unproven_detail = detail;
  };

  // Evaluates candidate k with the given node limit. Returns false when the
  // candidate still needs a full solve.
  auto evaluate = [&](std::size_t k, double bound, long node_limit, bool probe) {
    const Candidate& cand = candidates[k];
    const double best = incumbent();
    if (options.pruning && bound > best + Slack(best)) {
      bound_pruned.fetch_add(1);
      return true;
    }
    if (stop.load() || timed_out()) {
      stop.store(true);
      mark_unproven("search time limit reached");
      return true;
    }
    AllocationOptions alloc = options.allocation;
    alloc.node_limit = node_limit;
    alloc.cutoff.reset();
    if (options.pruning && std::isfinite(best)) {
      alloc.cutoff = best + Slack(best) - cand.annualized;
    }
    const LowerModel model = BuildLowerModel(s, report.demand, cand.decision);
    const AllocationPlan plan = SolveAllocation(s, model, alloc);
    solves.fetch_add(1);
    nodes.fetch_add(plan.nodes);
    switch (plan.status) {
      case AllocationStatus::kInfeasible:
      case AllocationStatus::kCutoff:
        return true;
      case AllocationStatus::kNumericFailure:
        mark_unproven(std::string("lower level ") + AllocationStatusName(plan.status) +
                      " for " + FormatDecision(s, cand.decision));
        return true;
      case AllocationStatus::kLimitNoSolution:
        if (probe) {
          candidates[k].bound = std::max(bound, cand.annualized + plan.root_bound);
          return false;
        }
        mark_unproven(std::string("lower level ") + AllocationStatusName(plan.status) +
                      " for " + FormatDecision(s, cand.decision));
        return true;
      case AllocationStatus::kOptimal:
      case AllocationStatus::kUnproven:
        break;
    }
    {
      std::lock_guard<std::mutex> lock(mu);
      const double z = cand.annualized + plan.cost.total;
      const bool better = z < best_z - Slack(best_z);
      const bool tie = !better && z <= best_z + Slack(best_z) &&
                       (best_index < 0 || cand.key < candidates[best_index].key);
      if (better || tie) {
        best_z = z;
        best_index = static_cast<int>(k);
      }
    }
    if (plan.status == AllocationStatus::kOptimal) return true;
    if (probe) {
      candidates[k].bound = std::max(bound, cand.annualized + plan.root_bound);
      return false;
    }
    mark_unproven("lower level limit reached for " + FormatDecision(s, cand.decision));
    return true;
  };

  int workers = options.workers > 0 ? options.workers
                                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(candidates.size())));
  auto parallel = [&](const std::vector<std::size_t>& order,
                      const std::function<void(std::size_t)>& body) {
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= order.size()) return;
        body(order[i]);
      }
    };
    if (workers <= 1) {
      loop();
      return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (std::thread& th : pool) th.join();
  };

  // Probe pass: a short branch-and-bound per candidate finds incumbents early
  // and replaces the assignment bound by the LP bound where it is tighter.
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.pruning) {
    const long probe_limit = std::min(options.allocation.node_limit, kProbeNodes);
    parallel(order, [&](std::size_t k) {
      done[k] = evaluate(k, candidates[k].bound, probe_limit, true);
    });
    order.clear();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (!done[k]) order.push_back(k);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (candidates[a].bound != candidates[b].bound) {
        return candidates[a].bound < candidates[b].bound;
      }
      return candidates[a].key < candidates[b].key;
    });
  }
  parallel(order, [&](std::size_t k) {
    evaluate(k, candidates[k].bound, options.allocation.node_limit, false);
  });

  report.stats.lower_level_solves = solves.load();
  report.stats.lower_level_nodes = nodes.load();
  report.stats.pruned_by_bound = bound_pruned.load();

  if (best_index < 0) {
    report.status = unproven ? SolveStatus::kUnproven : SolveStatus::kInfeasible;
    report.detail = unproven ? unproven_detail : "no budget-feasible decision serves all demand";
    for (const Cell& c : tables.cells) {
      if (!coverable[c.type * kNumLevels + LevelIndex(c.level)]) {
        report.uncovered.push_back({c.depot, c.type, c.level, c.n});
      }
    }
    if (report.uncovered.empty() && !unproven) {
      report.detail += "; capacity is short for every affordable decision";
    }
    report.stats.wall_seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    return report;
  }

  // Re-solve the winner without a cutoff so the allocation does not depend
  // on what the incumbent was when it was first evaluated.
  report.decision = candidates[best_index].decision;
  AllocationOptions alloc = options.allocation;
  alloc.cutoff.reset();
  const LowerModel model = BuildLowerModel(s, report.demand, report.decision);
  report.allocation = SolveAllocation(s, model, alloc);
  report.stats.lower_level_solves += 1;
  report.stats.lower_level_nodes += report.allocation.nodes;
  FillCosts(s, report);
  if (report.allocation.status == AllocationStatus::kUnproven) unproven = true;
  report.status = unproven ? SolveStatus::kUnproven : SolveStatus::kOptimal;
  report.detail = unproven ? unproven_detail : "";
  report.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

SolveReport EvaluateDecision(const Scenario& s, const InvestmentDecision& decision,
                             const EvaluateOptions& options) {
  const auto start = Clock::now();
  CheckDecision(s, decision);
  SolveReport report;
  report.decision = decision;
  report.demand = DeriveDemand(s);
  report.total_investment = TotalInvestment(s, decision);
  report.annualized_investment = AnnualizedInvestment(s, decision);
  if (options.enforce_budget &&
      report.total_investment > s.globals.budget + Slack(s.globals.budget)) {
    report.status = SolveStatus::kInfeasible;
    report.detail = "investment exceeds the budget";
    return report;
  }
  AllocationOptions alloc = options.allocation;
  alloc.cutoff.reset();
  const LowerModel model = BuildLowerModel(s, report.demand, decision);
  report.allocation = SolveAllocation(s, model, alloc);
  report.stats.enumerated = 1;
  report.stats.lower_level_solves = 1;
  report.stats.lower_level_nodes = report.allocation.nodes;
  report.uncovered = report.allocation.uncovered;
  switch (report.allocation.status) {
    case AllocationStatus::kOptimal:
      report.status = SolveStatus::kOptimal;
      break;
    case AllocationStatus::kUnproven:
      report.status = SolveStatus::kUnproven;
      break;
    case AllocationStatus::kInfeasible:
    case AllocationStatus::kCutoff:
      report.status = SolveStatus::kInfeasible;
      break;
    case AllocationStatus::kLimitNoSolution:
    case AllocationStatus::kNumericFailure:
      report.status = SolveStatus::kUnproven;
      break;
  }
  report.detail = report.allocation.detail;
  if (report.allocation.HasSolution()) FillCosts(s, report);
  report.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace mblap
