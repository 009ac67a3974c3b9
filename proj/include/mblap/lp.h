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

// Dense two-phase primal simplex for small linear programs with bounded
// variables. It is the relaxation engine behind the allocation
// branch-and-bound and is not meant for large or sparse models.
//
// Dantzig pricing is used until 50 consecutive degenerate pivots, then
// Bland's rule until the objective strictly improves again. All ties are
// broken by the lowest index, so identical inputs give bit-identical output.
// Every optimal answer is checked against the original rows before it is
// returned; a failed check is reported as kNumericFailure.

#ifndef MBLAP_LP_H_
#define MBLAP_LP_H_

#include <limits>
#include <string>
#include <vector>

namespace mblap {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerances shared by the LP engine and the integer layer above it.
struct Tolerances {
  static constexpr double kPivot = 1e-9;
  static constexpr double kFeasibility = 1e-7;
  static constexpr double kIntegrality = 1e-6;
};

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

struct LpRow {
  std::vector<double> coefficients;  // dense, length num_vars
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
};

// minimize objective . x  subject to rows and lower <= x <= upper.
// Bounds may be infinite (lower = -kInf, upper = kInf).
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::vector<double> lower;  // empty means all zero
  std::vector<double> upper;  // empty means all +inf

  explicit LinearProgram(int n = 0)
      : num_vars(n), objective(n, 0.0), lower(n, 0.0), upper(n, kInf) {}

  void AddRow(std::vector<double> coefficients, RowSense sense, double rhs) {
    rows.push_back({std::move(coefficients), sense, rhs});
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericFailure };

const char* LpStatusName(LpStatus status);

struct LpOutcome {
  LpStatus status = LpStatus::kNumericFailure;
  std::vector<double> x;  // filled when optimal
  double objective = 0.0;
  int iterations = 0;
  std::string detail;  // reason for kNumericFailure
};

struct LpOptions {
  double pivot_tolerance = Tolerances::kPivot;
  double feasibility_tolerance = Tolerances::kFeasibility;
  // Dantzig -> Bland switch after this many consecutive degenerate pivots.
  int stall_threshold = 50;
  // 0 picks 50 * (rows + columns) + 1000.
  int max_iterations = 0;
};

// Throws std::invalid_argument on structurally invalid input (wrong vector
// lengths, non-finite coefficients, lower > upper).
LpOutcome SolveLp(const LinearProgram& lp, const LpOptions& options = {});

// Largest violation of any row or bound by `x` (0 when feasible).
double MaxViolation(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace mblap

#endif  // MBLAP_LP_H_
