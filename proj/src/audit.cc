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

#include "mblap/audit.h"

#include <atomic>
#include <mutex>

namespace mblap {

namespace {

constexpr std::size_t kMaxSamples = 16;

std::atomic<std::int64_t> g_checks[kNumAuditLaws];
std::atomic<std::int64_t> g_violations[kNumAuditLaws];
std::mutex g_sample_mutex;
std::vector<std::string> g_samples;

}  // namespace

const char* AuditLawName(AuditLaw law) {
  switch (law) {
    case AuditLaw::kFlowBalance:
      return "flow-balance";
    case AuditLaw::kPoolCapacity:
      return "pool-capacity";
    case AuditLaw::kWorkload:
      return "workload-aggregation";
    case AuditLaw::kCost:
      return "cost-recompute";
    case AuditLaw::kBudget:
      return "budget";
  }
  return "unknown";
}

std::int64_t AuditSnapshot::TotalChecks() const {
  std::int64_t total = 0;
  for (std::int64_t c : checks) total += c;
  return total;
}

std::int64_t AuditSnapshot::TotalViolations() const {
  std::int64_t total = 0;
  for (std::int64_t v : violations) total += v;
  return total;
}

void RecordAudit(AuditLaw law, bool ok, const std::string& detail) {
  const int k = static_cast<int>(law);
  g_checks[k].fetch_add(1, std::memory_order_relaxed);
  if (ok) return;
  g_violations[k].fetch_add(1, std::memory_order_relaxed);
  std::lock_guard<std::mutex> lock(g_sample_mutex);
  if (g_samples.size() < kMaxSamples) {
    g_samples.push_back(std::string(AuditLawName(law)) + ": " + detail);
  }
}

AuditSnapshot GetAudit() {
  AuditSnapshot snap;
  for (int k = 0; k < kNumAuditLaws; ++k) {
    snap.checks[k] = g_checks[k].load();
    snap.violations[k] = g_violations[k].load();
  }
  std::lock_guard<std::mutex> lock(g_sample_mutex);
  snap.first_failures = g_samples;
  return snap;
}

void ResetAudit() {
  for (int k = 0; k < kNumAuditLaws; ++k) {
    g_checks[k].store(0);
    g_violations[k].store(0);
  }
  std::lock_guard<std::mutex> lock(g_sample_mutex);
  g_samples.clear();
}

}  // namespace mblap
