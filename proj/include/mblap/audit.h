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

// Process-wide tally of model-law checks (flow balance, pool capacity,
// workload aggregation, cost recomputation, budget). The solvers record a
// check after every result they return; test binaries assert at exit that no
// check ever failed.

#ifndef MBLAP_AUDIT_H_
#define MBLAP_AUDIT_H_

#include <cstdint>
#include <string>
#include <vector>

namespace mblap {

enum class AuditLaw { kFlowBalance, kPoolCapacity, kWorkload, kCost, kBudget };
inline constexpr int kNumAuditLaws = 5;

const char* AuditLawName(AuditLaw law);

struct AuditSnapshot {
  std::int64_t checks[kNumAuditLaws] = {};
  std::int64_t violations[kNumAuditLaws] = {};
  std::vector<std::string> first_failures;  // capped sample

  std::int64_t TotalChecks() const;
  std::int64_t TotalViolations() const;
};

void RecordAudit(AuditLaw law, bool ok, const std::string& detail = "");
AuditSnapshot GetAudit();
void ResetAudit();

}  // namespace mblap

#endif  // MBLAP_AUDIT_H_
