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

// Acceptance suite for the northwest case study. Prints one PASS/FAIL line
// per criterion and exits nonzero when any selected criterion fails.
//
//   acceptance_test                 all criteria
//   acceptance_test --criterion 4   one criterion

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mblap/allocation.h"
#include "mblap/audit.h"
#include "mblap/decision.h"
#include "mblap/derivation.h"
#include "mblap/lp.h"
#include "mblap/search.h"
#include "mblap/sensitivity.h"
#include "test_support.h"

namespace mblap {
namespace {

using Clock = std::chrono::steady_clock;

// Accumulates the checks of one criterion.
class Verdict {
 public:
  void Check(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
    notes_.push_back((ok ? "" : "!") + what);
  }
  void Note(const std::string& what) { notes_.push_back(what); }
  bool passed() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string Num(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

bool Within(double value, double target, double rel) {
  return std::fabs(value - target) <= rel * std::fabs(target);
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int BaseByName(const Scenario& s, const std::string& name) { return s.FindBase(name); }

InvestmentDecision HamiXianEight(const Scenario& s) {
  InvestmentDecision d = InvestmentDecision::None(s);
  d.plan[BaseByName(s, "hami")] = 8;
  d.plan[BaseByName(s, "xian")] = 8;
  return d;
}

double BaseMaintenance(const Scenario& s, const AllocationPlan& plan, int base) {
  double total = 0.0;
  for (const Flow& f : plan.flows) {
    if (f.base == base) total += MaintUnitCost(s, f.base, f.type, f.level) * f.count;
  }
  return total;
}

// 1. Capital recovery factor.
void Criterion1(Verdict& v) {
  const auto start = Clock::now();
  const double crf = CapitalRecoveryFactor(0.065, 20);
  const double t = Seconds(start);
  v.Check(crf >= 0.0903 && crf <= 0.0912,
          "crf(0.065, 20) = " + Num(crf, 6) + " in [0.0903, 0.0912]");
  v.Check(t < 0.01, "runtime " + Num(t * 1e3, 3) + " ms negligible");
}

// 2. Investment arithmetic for Hami 8 + Xi'an 8.
void Criterion2(Verdict& v) {
  const Scenario s = testing::LoadBundled();
  const InvestmentDecision d = HamiXianEight(s);
  const auto start = Clock::now();
  const double total = TotalInvestment(s, d);
  const double annual = AnnualizedInvestment(s, d);
  const double t = Seconds(start);
  v.Check(std::fabs(total - (2850.0 * 0.88 + 1450.0)) < 1e-9,
          "total investment " + Num(total, 6) + " = 2850 x 0.88 + 1450 = 3958");
  v.Check(std::fabs(annual - 359.21) <= 0.5, "annualized " + Num(annual, 3) + " = 359.21 +- 0.5");
  v.Check(t < 1e-3, "runtime " + Num(t * 1e3, 4) + " ms < 1 ms");
}

// 3. Capacity tables after Hami 8 and Xi'an 8.
void Criterion3(Verdict& v) {
  const Scenario s = testing::LoadBundled();
  struct Expect {
    const char* base;
    const char* pool;
    double capacity;
  };
  const Expect table[] = {
      {"hami", "CRH-III", 30.0}, {"hami", "CR-III", 30.0},   {"hami", "CRH-IV&V", 20.0},
      {"hami", "CR-IV&V", 40.0}, {"xian", "CRH-III", 60.0},  {"xian", "CR-III", 30.0},
      {"xian", "CR-IV&V", 40.0},
  };
  for (const Expect& e : table) {
    const int j = BaseByName(s, e.base);
    const std::vector<PoolState> pools = EffectiveCapacity(s, j, 8);
    double got = -1.0;
    for (const PoolState& p : pools) {
      if (s.bases[j].pools[p.pool_index].id == e.pool) got = p.capacity;
    }
    v.Check(got == e.capacity, s.bases[j].name + " " + e.pool + " " + Num(got, 4) + " == " +
                                   Num(e.capacity, 0));
  }
  // Xi'an CRH IV&V: positions x working days / (work unbalance x level IV days).
  const int xian = BaseByName(s, "xian");
  for (const PoolState& p : EffectiveCapacity(s, xian, 8)) {
    const CapacityPool& pool = s.bases[xian].pools[p.pool_index];
    if (pool.id != "CRH-IV&V") continue;
    const double formula = p.positions * s.globals.working_days /
                           (s.globals.work_unbalance * s.globals.duration_days.at("CRH").at(4));
    v.Check(std::fabs(p.capacity - formula) < 1e-9,
            "Xi'an CRH-IV&V " + Num(p.capacity, 4) + " == formula value " + Num(formula, 4) +
                " (" + std::to_string(p.positions) + " positions)");
  }
}

// 4. Optimal plan on the bundled scenario.
void Criterion4(Verdict& v) {
  const Scenario s = testing::LoadBundled();
  const auto start = Clock::now();
  const SolveReport r = SolveMblap(s);
  const double t = Seconds(start);
  const int hami = BaseByName(s, "hami");
  const int xian = BaseByName(s, "xian");
  v.Check(r.optimal(), std::string("status ") + SolveStatusName(r.status));
  if (!r.optimal()) return;
  v.Check(r.decision == HamiXianEight(s), "decision " + FormatDecision(s, r.decision) +
                                              " == Hami=8 Xi'an=8");
  const int sets_hami = r.allocation.BaseTotal(hami);
  const int sets_xian = r.allocation.BaseTotal(xian);
  v.Check(sets_hami == 57 && sets_xian == 137, "sets Hami " + std::to_string(sets_hami) +
                                                   ", Xi'an " + std::to_string(sets_xian) +
                                                   " == 57, 137");
  v.Check(Within(r.z_upper, 2278.15, 0.05),
          "Z_upper " + Num(r.z_upper) + " within 5% of 2278.15 [" + Num(2278.15 * 0.95) + ", " +
              Num(2278.15 * 1.05) + "]");
  const double m_hami = BaseMaintenance(s, r.allocation, hami);
  const double m_xian = BaseMaintenance(s, r.allocation, xian);
  v.Check(Within(m_hami, 446.59, 0.05), "maintenance Hami " + Num(m_hami) + " within 5% of 446.59");
  v.Check(Within(m_xian, 1284.15, 0.05),
          "maintenance Xi'an " + Num(m_xian) + " within 5% of 1284.15");
  v.Check(t < 60.0, "runtime " + Num(t) + " s < 60 s");
  for (double scale : {0.9, 0.95, 1.05, 1.1}) {
    Scenario scaled = s;
    for (auto& row : scaled.distances) {
      for (double& km : row) km *= scale;
    }
    const SolveReport rs = SolveMblap(scaled);
    v.Check(rs.optimal() && rs.decision == r.decision,
            "distances x" + Num(scale) + ": " + FormatDecision(s, rs.decision));
  }
}

// 5. Xi'an expansion only.
void Criterion5(Verdict& v) {
  const Scenario s = testing::LoadBundled();
  InvestmentDecision d = InvestmentDecision::None(s);
  d.plan[BaseByName(s, "xian")] = 11;
  const SolveReport e = EvaluateDecision(s, d);
  const SolveReport opt = SolveMblap(s);
  v.Check(e.optimal(), std::string("evaluate status ") + SolveStatusName(e.status));
  v.Check(opt.optimal(), std::string("solve status ") + SolveStatusName(opt.status));
  if (!e.optimal() || !opt.optimal()) return;
  v.Check(Within(e.z_upper, 2300.56, 0.05),
          "Z_upper " + Num(e.z_upper) + " within 5% of 2300.56 [" + Num(2300.56 * 0.95) + ", " +
              Num(2300.56 * 1.05) + "]");
  v.Check(e.z_upper > opt.z_upper,
          "Z_upper " + Num(e.z_upper) + " > optimum " + Num(opt.z_upper));
  v.Note("gap " + Num(100.0 * (e.z_upper / opt.z_upper - 1.0), 1) + "% (reported, not asserted)");
}

// 6. Tiny instances against full brute force.
void Criterion6(Verdict& v) {
  std::mt19937_64 rng(6);
  const auto start = Clock::now();
  int mismatches = 0;
  int feasible = 0;
  const int count = 250;
  for (int k = 0; k < count; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::TinyLimits());
    const testing::BruteForceResult bf = testing::BruteForceUpper(s);
    const SolveReport r = SolveMblap(s);
    if (r.optimal() != bf.feasible) {
      ++mismatches;
      continue;
    }
    if (!bf.feasible) continue;
    ++feasible;
    if (std::fabs(r.z_upper - bf.z_upper) > 1e-6 * std::max(1.0, std::fabs(bf.z_upper))) {
      ++mismatches;
    }
  }
  const double t = Seconds(start);
  v.Check(mismatches == 0, std::to_string(count) + " instances (" + std::to_string(feasible) +
                               " feasible), " + std::to_string(mismatches) + " mismatches");
  v.Check(t < 120.0, "runtime " + Num(t) + " s < 120 s");
}

// 7. Pruning on vs off.
void Criterion7(Verdict& v) {
  std::mt19937_64 rng(7);
  const auto start = Clock::now();
  int disagreements = 0;
  int feasible = 0;
  for (int k = 0; k < 50; ++k) {
    const Scenario s = testing::RandomScenario(rng, testing::MediumLimits());
    SearchOptions off;
    off.pruning = false;
    const SolveReport a = SolveMblap(s);
    const SolveReport b = SolveMblap(s, off);
    if (a.status != b.status) {
      ++disagreements;
      continue;
    }
    if (!a.optimal()) continue;
    ++feasible;
    const bool same = a.decision == b.decision &&
                      std::fabs(a.z_upper - b.z_upper) <= 1e-9 * std::max(1.0, a.z_upper);
    if (!same) ++disagreements;
  }
  const double t = Seconds(start);
  v.Check(disagreements == 0, "50 medium instances (" + std::to_string(feasible) +
                                  " feasible), " + std::to_string(disagreements) +
                                  " disagreements");
  v.Check(t < 300.0, "runtime " + Num(t) + " s < 300 s");
}

// 8. LP core suites.
void Criterion8(Verdict& v) {
  std::mt19937_64 rng(8);
  const auto start = Clock::now();
  int bad_certificate = 0;
  int nondeterministic = 0;
  for (int k = 0; k < 1000; ++k) {
    const testing::RandomLp inst = testing::MakeRandomLp(rng);
    const LpOutcome a = SolveLp(inst.lp);
    double reference = 0.0;
    for (int j = 0; j < inst.lp.num_vars; ++j) {
      reference += inst.lp.objective[j] * inst.feasible_point[j];
    }
    if (a.status != LpStatus::kOptimal || MaxViolation(inst.lp, a.x) > 1e-6 ||
        a.objective > reference + 1e-6 * std::max(1.0, std::fabs(reference))) {
      ++bad_certificate;
    }
    const LpOutcome b = SolveLp(inst.lp);
    if (b.status != a.status || b.x != a.x || b.objective != a.objective) ++nondeterministic;
  }
  const double t = Seconds(start);
  v.Check(bad_certificate == 0, "1000 random LPs, " + std::to_string(bad_certificate) +
                                    " without a valid optimal certificate");
  v.Check(nondeterministic == 0,
          "determinism, " + std::to_string(nondeterministic) + " differing repeats");
  v.Check(t < 60.0, "runtime " + Num(t) + " s < 60 s");
  int cycling_failures = 0;
  for (const testing::CyclingInstance& inst : testing::CyclingInstances()) {
    for (int threshold : {0, 1, 2, 5, 50}) {
      LpOptions options;
      options.stall_threshold = threshold;
      const LpOutcome out = SolveLp(inst.lp, options);
      if (out.status != LpStatus::kOptimal || std::fabs(out.objective - inst.optimum) > 1e-9) {
        ++cycling_failures;
      }
    }
  }
  v.Check(cycling_failures == 0,
          "degenerate cycling instances, " + std::to_string(cycling_failures) + " failures");
}

// 9. Model laws on every solve: flow balance, pool capacity with theta 1.2,
// budget. The library audits each returned result; this runs a batch of
// solves and reads the tally.
void Criterion9(Verdict& v) {
  ResetAudit();
  const Scenario s = testing::LoadBundled();
  v.Check(s.globals.dispatch_unbalance == 1.2,
          "bundled theta = " + Num(s.globals.dispatch_unbalance, 2));
  const SolveReport r = SolveMblap(s);
  int budget_violations = 0;
  if (r.optimal() && TotalInvestment(s, r.decision) > s.globals.budget * (1.0 + 1e-9)) {
    ++budget_violations;
  }
  std::mt19937_64 rng(9);
  for (int k = 0; k < 40; ++k) {
    Scenario rs = testing::RandomScenario(rng, testing::MediumLimits());
    rs.globals.dispatch_unbalance = 1.2;
    const SolveReport x = SolveMblap(rs);
    if (x.optimal() && TotalInvestment(rs, x.decision) > rs.globals.budget * (1.0 + 1e-9)) {
      ++budget_violations;
    }
  }
  const AuditSnapshot audit = GetAudit();
  const AuditLaw laws[] = {AuditLaw::kFlowBalance, AuditLaw::kPoolCapacity, AuditLaw::kWorkload,
                           AuditLaw::kCost, AuditLaw::kBudget};
  for (AuditLaw law : laws) {
    const int i = static_cast<int>(law);
    v.Check(audit.checks[i] > 0 && audit.violations[i] == 0,
            std::string(AuditLawName(law)) + ": " + std::to_string(audit.violations[i]) +
                " violations in " + std::to_string(audit.checks[i]) + " checks");
  }
  v.Check(budget_violations == 0, "emitted decisions over budget: " +
                                      std::to_string(budget_violations));
  for (const std::string& f : audit.first_failures) v.Note("audit: " + f);
}

// 10. Sensitivity trends on the bundled scenario.
void Criterion10(Verdict& v) {
  const Scenario s = testing::LoadBundled();
  const auto start = Clock::now();
  auto sweep = [&](SweepFactor f) {
    SweepSpec spec;
    spec.factor = f;
    return RunSweep(s, spec);
  };
  const std::vector<SweepRow> fleet = sweep(SweepFactor::kFleetSize);
  const std::vector<SweepRow> mileage = sweep(SweepFactor::kMileageCycle);
  const std::vector<SweepRow> duration = sweep(SweepFactor::kMaintDuration);
  const double t = Seconds(start);

  auto describe = [](const std::vector<SweepRow>& rows) {
    std::string text;
    for (const SweepRow& r : rows) text += (text.empty() ? "" : " ") + Num(r.z_upper);
    return text;
  };
  auto all_optimal = [](const std::vector<SweepRow>& rows) {
    return std::all_of(rows.begin(), rows.end(),
                       [](const SweepRow& r) { return r.status == SolveStatus::kOptimal; });
  };
  auto trend = [](const std::vector<SweepRow>& rows, auto ok) {
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (!ok(rows[k - 1].z_upper, rows[k].z_upper)) return false;
    }
    return true;
  };
  const double tol = 1e-9;
  v.Check(all_optimal(fleet) && trend(fleet, [](double a, double b) { return b > a; }),
          "fleet strictly increasing: " + describe(fleet));
  v.Check(all_optimal(mileage) &&
              trend(mileage, [&](double a, double b) { return b <= a + tol * a; }),
          "mileage nonincreasing: " + describe(mileage));
  v.Check(all_optimal(duration) &&
              trend(duration, [&](double a, double b) { return b >= a - tol * a; }),
          "duration nondecreasing: " + describe(duration));
  auto relative_range = [](const std::vector<SweepRow>& rows) {
    double lo = rows.front().z_upper;
    double hi = lo;
    double mid = lo;
    for (const SweepRow& r : rows) {
      lo = std::min(lo, r.z_upper);
      hi = std::max(hi, r.z_upper);
      if (std::fabs(r.multiplier - 1.0) < 1e-12) mid = r.z_upper;
    }
    return (hi - lo) / mid;
  };
  const double range_duration = relative_range(duration);
  const double range_mileage = relative_range(mileage);
  v.Check(range_duration < range_mileage, "duration range " + Num(range_duration, 4) +
                                              " < mileage range " + Num(range_mileage, 4));
  v.Check(t < 1200.0, "27 solves in " + Num(t) + " s < 20 min");
  std::string shares;
  for (const SweepRow& r : fleet) shares += " " + Num(r.construction_share, 3);
  v.Note("fleet construction shares (reported):" + shares);
}

// 11. Construction share at multiplier 1.00.
void Criterion11(Verdict& v) {
  const Scenario s = testing::LoadBundled();
  const SolveReport r = SolveMblap(s);
  v.Check(r.optimal(), std::string("status ") + SolveStatusName(r.status));
  if (!r.optimal()) return;
  const double share = r.annualized_investment / r.z_upper;
  v.Check(share >= 0.10 && share <= 0.20, "share " + Num(share, 4) + " in [0.10, 0.20]");
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Verdict&)> run;
};

const std::vector<Criterion>& Criteria() {
  static const std::vector<Criterion> all = {
      {1, "capital recovery factor", Criterion1},
      {2, "investment arithmetic", Criterion2},
      {3, "capacity tables", Criterion3},
      {4, "optimal plan reproduction", Criterion4},
      {5, "expansion-only comparison", Criterion5},
      {6, "oracle equivalence", Criterion6},
      {7, "pruning soundness", Criterion7},
      {8, "LP core", Criterion8},
      {9, "model-law properties", Criterion9},
      {10, "sensitivity trends", Criterion10},
      {11, "construction-share band", Criterion11},
  };
  return all;
}

}  // namespace
}  // namespace mblap

int main(int argc, char** argv) {
  CLI::App app{"MBLAP acceptance suite", "acceptance_test"};
  int only = 0;
  bool verbose = false;
  app.add_option("--criterion", only, "Run a single criterion (1-11)")->check(CLI::Range(1, 11));
  app.add_flag("-v,--verbose", verbose, "Print every check");
  CLI11_PARSE(app, argc, argv);

  bool all_passed = true;
  for (const mblap::Criterion& c : mblap::Criteria()) {
    if (only != 0 && c.id != only) continue;
    mblap::Verdict verdict;
    const auto start = mblap::Clock::now();
    try {
      c.run(verdict);
    } catch (const std::exception& e) {
      verdict.Check(false, std::string("exception: ") + e.what());
    }
    const double t = mblap::Seconds(start);
    all_passed = all_passed && verdict.passed();
    std::string summary;
    for (const std::string& f : verdict.failures()) summary += (summary.empty() ? "" : "; ") + f;
    if (verdict.passed()) {
      for (const std::string& n : verdict.notes()) summary += (summary.empty() ? "" : "; ") + n;
    }
    std::cout << (verdict.passed() ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title
              << ", " << mblap::Num(t) << " s): " << summary << "\n";
    if (verbose || !verdict.passed()) {
      for (const std::string& n : verdict.notes()) std::cout << "    " << n << "\n";
    }
  }
  return all_passed ? 0 : 1;
}
