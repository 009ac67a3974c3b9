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

// Text renderings of results: report.json, CSV tables and summary.txt.
//
// report.json keeps everything that can vary between identical runs (clock
// time, and search counters that depend on thread scheduling) under the
// top-level "metadata" key. The rest of the document is a pure function of
// the inputs.

#ifndef MBLAP_REPORT_H_
#define MBLAP_REPORT_H_

#include <map>
#include <string>
#include <vector>

#include "mblap/allocation.h"
#include "mblap/derivation.h"
#include "mblap/scenario.h"
#include "mblap/search.h"
#include "mblap/sensitivity.h"

namespace mblap {

// Run settings echoed into reports.
struct ReportSettings {
  std::string command;
  std::string scenario_path;
  std::map<std::string, std::string> overrides;
};

std::string SolveReportJson(const Scenario& s, const SolveReport& report,
                            const ReportSettings& settings);

// Same document without the "metadata" key (for comparisons).
std::string StripMetadata(const std::string& report_json);

std::string SummaryText(const Scenario& s, const SolveReport& report);

// depot,base,type,level,f (names, one row per nonzero flow).
std::string AllocationCsv(const Scenario& s, const std::vector<Flow>& flows);
// Inverse of AllocationCsv. Throws std::runtime_error on unknown names or
// malformed rows.
std::vector<Flow> ParseAllocationCsv(const Scenario& s, const std::string& text);

// depot,type,level,raw,N for every cell.
std::string DemandCsv(const Scenario& s, const DemandTable& demand);
// base,plan,pool,positions,capacity for every base, option and pool.
std::string CapacityCsv(const Scenario& s);

// factor,multiplier,feasible,status,z_upper,annualized_investment,
// construction_share,total_demand,decision
std::string SweepCsv(const Scenario& s, SweepFactor factor,
                     const std::vector<SweepRow>& rows);
// factor,multiplier,metric,value
std::string SweepLongCsv(SweepFactor factor, const std::vector<SweepRow>& rows);

// Full precision, locale independent number text.
std::string FormatNumber(double value);

}  // namespace mblap

#endif  // MBLAP_REPORT_H_
