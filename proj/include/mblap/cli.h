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

// The `mblap` command line: validate, derive, solve, evaluate, sweep.
//
// Exit codes:
//   0  success (proven optimum for solve/evaluate)
//   1  scenario violates invariants
//   2  parse or usage error, unknown base or plan
//   3  infeasible
//   4  optimality unproven (a node or time limit was hit)

#ifndef MBLAP_CLI_H_
#define MBLAP_CLI_H_

#include <ostream>

namespace mblap {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitUnproven = 4;

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mblap

#endif  // MBLAP_CLI_H_
