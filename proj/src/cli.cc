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

#include "mblap/cli.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mblap/derivation.h"
#include "mblap/report.h"
#include "mblap/scenario.h"
#include "mblap/scenario_io.h"
#include "mblap/search.h"
#include "mblap/sensitivity.h"

namespace mblap {

namespace {

struct Args {
  std::string scenario;
  std::string scenario_flag;
  std::string out_dir = "out";
  double budget = 0.0;
  double theta = 0.0;
  std::string rounding;
  double budget_relax = 0.0;
  int workers = 0;
  long node_limit = 1000000;
  double time_limit = 0.0;
  std::vector<std::string> plans;
  std::string factor;
};

struct Flags {
  CLI::Option* budget = nullptr;
  CLI::Option* theta = nullptr;
  CLI::Option* rounding = nullptr;
  CLI::Option* budget_relax = nullptr;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void AddCommon(CLI::App* cmd, Args& args, Flags& flags, bool solver) {
  cmd->add_option("file", args.scenario, "Scenario file");
  cmd->add_option("--scenario", args.scenario_flag, "Scenario file");
  cmd->add_option("--out", args.out_dir, "Output directory")->capture_default_str();
  flags.budget = cmd->add_option("--budget", args.budget, "Budget override (million RMB)")
                     ->check(CLI::NonNegativeNumber);
  flags.theta = cmd->add_option("--theta", args.theta, "Dispatch unbalance override");
  flags.rounding = cmd->add_option("--rounding", args.rounding, "Demand rounding mode")
                       ->check(CLI::IsMember({"halfUp", "ceil", "floor"}));
  flags.budget_relax =
      cmd->add_option("--budget-relax", args.budget_relax, "Sweep budget multiplier");
  if (solver) {
    cmd->add_option("--workers", args.workers, "Worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--node-limit", args.node_limit, "Branch-and-bound nodes per solve")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--time-limit", args.time_limit, "Seconds for the whole search")
        ->check(CLI::NonNegativeNumber);
  }
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

std::filesystem::path OutDir(const Args& args) {
  std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

InvestmentDecision ParsePlans(const Scenario& s, const std::vector<std::string>& specs) {
  InvestmentDecision d = InvestmentDecision::None(s);
  std::vector<bool> seen(s.bases.size(), false);
  for (const std::string& spec : specs) {
    const auto eq = spec.rfind('=');
    if (eq == std::string::npos) throw UsageError("--plan expects base=id, got '" + spec + "'");
    const std::string key = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    const int j = s.FindBase(key);
    if (j < 0) throw UsageError("unknown base '" + key + "'");
    int plan = 0;
    try {
      std::size_t used = 0;
      plan = std::stoi(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw UsageError("plan id must be an integer, got '" + value + "'");
    }
    if (plan != 0 && s.FindPlan(j, plan) == nullptr) {
      throw UsageError("base '" + s.bases[j].name + "' has no plan " + value);
    }
    if (seen[j]) throw UsageError("base '" + s.bases[j].name + "' given twice");
    seen[j] = true;
    d.plan[j] = plan;
  }
  return d;
}

int ExitFor(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return kExitOk;
    case SolveStatus::kInfeasible:
      return kExitInfeasible;
    case SolveStatus::kUnproven:
      return kExitUnproven;
  }
  return kExitUnproven;
}

void WriteSolveOutputs(const Scenario& s, const SolveReport& report,
                       const ReportSettings& settings, const Args& args, std::ostream& out) {
  const std::filesystem::path dir = OutDir(args);
  WriteFile(dir / "report.json", SolveReportJson(s, report, settings));
  WriteFile(dir / "allocation.csv", AllocationCsv(s, report.allocation.flows));
  const std::string summary = SummaryText(s, report);
  WriteFile(dir / "summary.txt", summary);
  out << summary;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maintenance-base location-allocation solver", "mblap"};
  app.require_subcommand(1);
  Args args;
  std::map<std::string, Flags> flags;

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
  AddCommon(validate, args, flags["validate"], false);
  CLI::App* derive = app.add_subcommand("derive", "Write demand.csv and capacity.csv");
  AddCommon(derive, args, flags["derive"], false);
  CLI::App* solve = app.add_subcommand("solve", "Find the optimal investment decision");
  AddCommon(solve, args, flags["solve"], true);
  CLI::App* evaluate = app.add_subcommand("evaluate", "Cost one fixed investment decision");
  AddCommon(evaluate, args, flags["evaluate"], true);
  evaluate->add_option("--plan", args.plans, "base=planId (repeatable; others build nothing)");
  CLI::App* sweep = app.add_subcommand("sweep", "One-factor sensitivity sweep");
  AddCommon(sweep, args, flags["sweep"], true);
  sweep->add_option("--factor", args.factor, "fleetSize, mileageCycle or maintDuration")
      ->required()
      ->check(CLI::IsMember({"fleetSize", "mileageCycle", "maintDuration"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string command = cmd->get_name();
  const Flags& f = flags[command];
  if (!args.scenario.empty() && !args.scenario_flag.empty() &&
      args.scenario != args.scenario_flag) {
    err << "error: scenario given twice\n";
    return kExitUsage;
  }
  const std::string path = args.scenario.empty() ? args.scenario_flag : args.scenario;
  if (path.empty()) {
    err << "error: no scenario file given\n";
    return kExitUsage;
  }

  Scenario s;
  try {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioParseError(path + ": cannot open file");
    std::ostringstream text;
    text << in.rdbuf();
    s = ParseScenario(text.str());
  } catch (const ScenarioParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  ReportSettings settings;
  settings.command = command;
  settings.scenario_path = path;
  if (f.budget->count()) {
    s.globals.budget = args.budget;
    settings.overrides["budget"] = FormatNumber(args.budget);
  }
  if (f.theta->count()) {
    s.globals.dispatch_unbalance = args.theta;
    settings.overrides["theta"] = FormatNumber(args.theta);
  }
  if (f.rounding->count()) {
    s.globals.demand_rounding = *ParseRoundingMode(args.rounding);
    settings.overrides["rounding"] = args.rounding;
  }
  if (f.budget_relax->count()) {
    s.globals.sweep_budget_relax = args.budget_relax;
    settings.overrides["budget_relax"] = FormatNumber(args.budget_relax);
  }

  const std::vector<Violation> violations = Validate(s);
  if (!violations.empty()) {
    for (const Violation& v : violations) err << FormatViolation(v) << "\n";
    return kExitViolations;
  }

  try {
    if (command == "validate") {
      out << "ok: " << s.depots.size() << " depots, " << s.bases.size() << " bases, "
          << s.emu_types.size() << " EMU types, " << s.TotalTrains() << " trains\n";
      return kExitOk;
    }
    if (command == "derive") {
      const DemandTable demand = DeriveDemand(s);
      const std::filesystem::path dir = OutDir(args);
      WriteFile(dir / "demand.csv", DemandCsv(s, demand));
      WriteFile(dir / "capacity.csv", CapacityCsv(s));
      out << "demand: raw " << FormatNumber(demand.TotalRaw()) << ", rounded "
          << demand.Total() << " standard sets/year\n";
      out << "wrote " << (dir / "demand.csv").string() << " and "
          << (dir / "capacity.csv").string() << "\n";
      return kExitOk;
    }

    SearchOptions search;
    search.workers = args.workers;
    search.time_limit_seconds = args.time_limit;
    search.allocation.node_limit = args.node_limit;

    if (command == "solve") {
      const SolveReport report = SolveMblap(s, search);
      WriteSolveOutputs(s, report, settings, args, out);
      return ExitFor(report.status);
    }
    if (command == "evaluate") {
      InvestmentDecision d;
      try {
        d = ParsePlans(s, args.plans);
      } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
      }
      EvaluateOptions eval;
      eval.allocation = search.allocation;
      const SolveReport report = EvaluateDecision(s, d, eval);
      WriteSolveOutputs(s, report, settings, args, out);
      return ExitFor(report.status);
    }
    if (command == "sweep") {
      SweepSpec spec;
      spec.factor = *ParseSweepFactor(args.factor);
      const std::vector<SweepRow> rows = RunSweep(s, spec, search);
      const std::filesystem::path dir = OutDir(args);
      const std::string name = std::string("sweep_") + SweepFactorName(spec.factor);
      const std::string table = SweepCsv(s, spec.factor, rows);
      WriteFile(dir / (name + ".csv"), table);
      WriteFile(dir / (name + "_long.csv"), SweepLongCsv(spec.factor, rows));
      out << table;
      for (const SweepRow& r : rows) {
        if (r.status == SolveStatus::kUnproven) return kExitUnproven;
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mblap
