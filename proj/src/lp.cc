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

#include "mblap/lp.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace mblap {

namespace {

// Step lengths below this count as degenerate; ratio ties are resolved
// within the same window.
constexpr double kStepEpsilon = 1e-12;

enum class VarState { kBasic, kAtLower, kAtUpper };

// Internal column j stands for `sign * x'` added to original variable
// `source`, with x' in [0, upper].
struct ColumnMap {
  int source = -1;  // -1 for slacks and artificials
  double sign = 1.0;
};

class Tableau {
 public:
  Tableau(int rows, int cols)
      : m_(rows), n_(cols), t_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * n_ + c]; }
  double at(int r, int c) const { return t_[static_cast<std::size_t>(r) * n_ + c]; }
  int rows() const { return m_; }
  int cols() const { return n_; }

 private:
  int m_;
  int n_;
  std::vector<double> t_;
};

class BoundedSimplex {
 public:
  BoundedSimplex(Tableau a, std::vector<double> b, std::vector<double> upper,
                 std::vector<int> initial_basis, const LpOptions& options,
                 int max_iterations)
      : a0_(a),
        t_(std::move(a)),
        b0_(b),
        beta_(std::move(b)),
        upper_(std::move(upper)),
        basis_(initial_basis),
        initial_basis_(std::move(initial_basis)),
        state_(upper_.size(), VarState::kAtLower),
        options_(options),
        max_iterations_(max_iterations) {
    for (int r = 0; r < t_.rows(); ++r) state_[basis_[r]] = VarState::kBasic;
  }

  enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

  PhaseResult Run(const std::vector<double>& cost) {
    cost_ = cost;
    PriceFromScratch();
    bool bland = false;
    int degenerate_run = 0;
    while (true) {
      if (iterations_ >= max_iterations_) return PhaseResult::kIterationLimit;
      const int q = ChooseEntering(bland);
      if (q < 0) {
        RecomputeBasicValues();
        return PhaseResult::kOptimal;
      }
      const double dir = state_[q] == VarState::kAtLower ? 1.0 : -1.0;
      double step = upper_[q];
      int leave = -1;
      bool leave_to_upper = false;
      double best_pivot = 0.0;
      for (int r = 0; r < t_.rows(); ++r) {
        const double a = dir * t_.at(r, q);
        double limit;
        bool to_upper;
        if (a > options_.pivot_tolerance) {
          limit = std::max(0.0, beta_[r]) / a;
          to_upper = false;
        } else if (a < -options_.pivot_tolerance && std::isfinite(upper_[basis_[r]])) {
          limit = std::max(0.0, upper_[basis_[r]] - beta_[r]) / -a;
          to_upper = true;
        } else {
          continue;
        }
        bool take = false;
        if (limit < step - kStepEpsilon) {
          take = true;
        } else if (leave >= 0 && limit <= step + kStepEpsilon) {
          // Tie between rows: Bland wants the lowest variable index; otherwise
          // prefer the larger pivot, then the lower index.
          if (bland) {
            take = basis_[r] < basis_[leave];
          } else if (std::fabs(a) > best_pivot * (1.0 + 1e-9)) {
            take = true;
          } else if (std::fabs(a) >= best_pivot * (1.0 - 1e-9)) {
            take = basis_[r] < basis_[leave];
          }
        }
        if (take) {
          step = limit;
          leave = r;
          leave_to_upper = to_upper;
          best_pivot = std::fabs(a);
        }
      }
      if (leave < 0 && !std::isfinite(step)) return PhaseResult::kUnbounded;
      ++iterations_;

      const double gain = std::fabs(reduced_[q]) * step;
      if (step <= kStepEpsilon || gain <= kStepEpsilon) {
        if (++degenerate_run >= options_.stall_threshold) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      for (int r = 0; r < t_.rows(); ++r) beta_[r] -= dir * step * t_.at(r, q);
      if (leave < 0) {
        state_[q] = state_[q] == VarState::kAtLower ? VarState::kAtUpper
                                                    : VarState::kAtLower;
        continue;
      }
      const double entering_value =
          (state_[q] == VarState::kAtLower ? 0.0 : upper_[q]) + dir * step;
      const int out = basis_[leave];
      state_[out] = leave_to_upper ? VarState::kAtUpper : VarState::kAtLower;
      Pivot(leave, q);
      basis_[leave] = q;
      state_[q] = VarState::kBasic;
      beta_[leave] = entering_value;
    }
  }

  // Fixes a column at zero and keeps it out of the basis from now on.
  void Freeze(int col) { upper_[col] = 0.0; }

  double Value(int col) const {
    switch (state_[col]) {
      case VarState::kAtLower:
        return 0.0;
      case VarState::kAtUpper:
        return upper_[col];
      case VarState::kBasic:
        break;
    }
    for (int r = 0; r < t_.rows(); ++r) {
      if (basis_[r] == col) return beta_[r];
    }
    return 0.0;
  }

  int iterations() const { return iterations_; }

 private:
  void PriceFromScratch() {
    reduced_.assign(t_.cols(), 0.0);
    for (int c = 0; c < t_.cols(); ++c) {
      double z = cost_[c];
      for (int r = 0; r < t_.rows(); ++r) z -= cost_[basis_[r]] * t_.at(r, c);
      reduced_[c] = z;
    }
  }

  int ChooseEntering(bool bland) const {
    const double tol = options_.pivot_tolerance;
    int best = -1;
    double best_score = 0.0;
    for (int c = 0; c < t_.cols(); ++c) {
      if (state_[c] == VarState::kBasic || upper_[c] == 0.0) continue;
      const double d = reduced_[c];
      double score = 0.0;
      if (state_[c] == VarState::kAtLower && d < -tol) score = -d;
      if (state_[c] == VarState::kAtUpper && d > tol) score = d;
      if (score == 0.0) continue;
      if (bland) return c;
      if (score > best_score) {
        best = c;
        best_score = score;
      }
    }
    return best;
  }

  void Pivot(int r, int q) {
    const int n = t_.cols();
    const double p = t_.at(r, q);
    for (int c = 0; c < n; ++c) t_.at(r, c) /= p;
    t_.at(r, q) = 1.0;
    for (int i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_.at(i, q);
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) t_.at(i, c) -= f * t_.at(r, c);
      t_.at(i, q) = 0.0;
    }
    const double f = reduced_[q];
    if (f != 0.0) {
      for (int c = 0; c < n; ++c) reduced_[c] -= f * t_.at(r, c);
      reduced_[q] = 0.0;
    }
  }

  // beta = B^-1 (b - sum over columns at upper of A_j u_j). The columns of
  // the initial identity basis hold B^-1 inside the tableau.
  void RecomputeBasicValues() {
    std::vector<double> rhs = b0_;
    for (int c = 0; c < t_.cols(); ++c) {
      if (state_[c] != VarState::kAtUpper) continue;
      for (int r = 0; r < t_.rows(); ++r) rhs[r] -= a0_.at(r, c) * upper_[c];
    }
    for (int r = 0; r < t_.rows(); ++r) {
      double v = 0.0;
      for (int k = 0; k < t_.rows(); ++k) v += t_.at(r, initial_basis_[k]) * rhs[k];
      beta_[r] = v;
    }
  }

  Tableau a0_;
  Tableau t_;
  std::vector<double> b0_;
  std::vector<double> beta_;
  std::vector<double> upper_;
  std::vector<int> basis_;
  std::vector<int> initial_basis_;
  std::vector<VarState> state_;
  std::vector<double> cost_;
  std::vector<double> reduced_;
  LpOptions options_;
  int max_iterations_;
  int iterations_ = 0;
};

void CheckStructure(const LinearProgram& lp) {
  const std::size_t n = static_cast<std::size_t>(lp.num_vars);
  if (lp.num_vars < 0) throw std::invalid_argument("negative variable count");
  if (lp.objective.size() != n) throw std::invalid_argument("objective length mismatch");
  if (!lp.lower.empty() && lp.lower.size() != n) {
    throw std::invalid_argument("lower bound length mismatch");
  }
  if (!lp.upper.empty() && lp.upper.size() != n) {
    throw std::invalid_argument("upper bound length mismatch");
  }
  for (double c : lp.objective) {
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite objective coefficient");
  }
  for (std::size_t k = 0; k < lp.rows.size(); ++k) {
    const LpRow& row = lp.rows[k];
    if (row.coefficients.size() != n) {
      throw std::invalid_argument("row " + std::to_string(k) + " length mismatch");
    }
    if (!std::isfinite(row.rhs)) throw std::invalid_argument("non-finite right-hand side");
    for (double a : row.coefficients) {
      if (!std::isfinite(a)) throw std::invalid_argument("non-finite row coefficient");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower.empty() ? 0.0 : lp.lower[j];
    const double hi = lp.upper.empty() ? kInf : lp.upper[j];
    if (std::isnan(lo) || std::isnan(hi) || lo == kInf || hi == -kInf || lo > hi) {
      throw std::invalid_argument("invalid bounds on variable " + std::to_string(j));
    }
  }
}

}  // namespace

const char* LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kNumericFailure:
      return "numeric-failure";
  }
  return "numeric-failure";
}

double MaxViolation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (int j = 0; j < lp.num_vars; ++j) {
    const double lo = lp.lower.empty() ? 0.0 : lp.lower[j];
    const double hi = lp.upper.empty() ? kInf : lp.upper[j];
    worst = std::max(worst, lo - x[j]);
    worst = std::max(worst, x[j] - hi);
  }
  for (const LpRow& row : lp.rows) {
    double lhs = 0.0;
    for (int j = 0; j < lp.num_vars; ++j) lhs += row.coefficients[j] * x[j];
    switch (row.sense) {
      case RowSense::kLessEqual:
        worst = std::max(worst, lhs - row.rhs);
        break;
      case RowSense::kGreaterEqual:
        worst = std::max(worst, row.rhs - lhs);
        break;
      case RowSense::kEqual:
        worst = std::max(worst, std::fabs(lhs - row.rhs));
        break;
    }
  }
  return worst;
}

LpOutcome SolveLp(const LinearProgram& lp, const LpOptions& options) {
  CheckStructure(lp);
  const int n = lp.num_vars;
  const double ftol = options.feasibility_tolerance;
  LpOutcome outcome;

  auto lower = [&](int j) { return lp.lower.empty() ? 0.0 : lp.lower[j]; };
  auto upper = [&](int j) { return lp.upper.empty() ? kInf : lp.upper[j]; };

  // Presolve: fixed variables become constants, empty rows are checked and
  // dropped.
  std::vector<double> offset(n, 0.0);
  std::vector<ColumnMap> columns;
  std::vector<double> col_upper;
  for (int j = 0; j < n; ++j) {
    const double lo = lower(j);
    const double hi = upper(j);
    if (lo == hi) {
      offset[j] = lo;
    } else if (std::isfinite(lo)) {
      offset[j] = lo;
      columns.push_back({j, 1.0});
      col_upper.push_back(hi - lo);
    } else if (std::isfinite(hi)) {
      offset[j] = hi;
      columns.push_back({j, -1.0});
      col_upper.push_back(kInf);
    } else {
      columns.push_back({j, 1.0});
      col_upper.push_back(kInf);
      columns.push_back({j, -1.0});
      col_upper.push_back(kInf);
    }
  }
  const int structural = static_cast<int>(columns.size());

  struct WorkRow {
    std::vector<double> a;  // over structural columns
    RowSense sense;
    double rhs;
  };
  std::vector<WorkRow> work;
  for (const LpRow& row : lp.rows) {
    WorkRow w{std::vector<double>(structural, 0.0), row.sense, row.rhs};
    bool empty = true;
    for (int j = 0; j < n; ++j) {
      if (row.coefficients[j] != 0.0) w.rhs -= row.coefficients[j] * offset[j];
    }
    for (int c = 0; c < structural; ++c) {
      const double a = row.coefficients[columns[c].source] * columns[c].sign;
      w.a[c] = a;
      empty = empty && a == 0.0;
    }
    if (empty) {
      const bool ok = (row.sense == RowSense::kLessEqual && w.rhs >= -ftol) ||
                      (row.sense == RowSense::kGreaterEqual && w.rhs <= ftol) ||
                      (row.sense == RowSense::kEqual && std::fabs(w.rhs) <= ftol);
      if (!ok) {
        outcome.status = LpStatus::kInfeasible;
        return outcome;
      }
      continue;
    }
    work.push_back(std::move(w));
  }
  const int m = static_cast<int>(work.size());

  // Slack per inequality, then an artificial for every row whose slack
  // cannot start basic at a nonnegative value.
  std::vector<int> slack_of(m, -1);
  int total = structural;
  for (int r = 0; r < m; ++r) {
    if (work[r].sense != RowSense::kEqual) slack_of[r] = total++;
  }
  std::vector<double> sign(m, 1.0);
  std::vector<int> artificial_of(m, -1);
  for (int r = 0; r < m; ++r) {
    double slack_coef = 0.0;
    if (work[r].sense == RowSense::kLessEqual) slack_coef = 1.0;
    if (work[r].sense == RowSense::kGreaterEqual) slack_coef = -1.0;
    if (work[r].rhs < 0.0) sign[r] = -1.0;
    if (slack_coef * sign[r] <= 0.0) artificial_of[r] = total++;
  }

  Tableau a(m, total);
  std::vector<double> b(m);
  std::vector<double> ub(total, kInf);
  std::vector<int> initial(m);
  for (int c = 0; c < structural; ++c) ub[c] = col_upper[c];
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < structural; ++c) a.at(r, c) = sign[r] * work[r].a[c];
    if (slack_of[r] >= 0) {
      const double coef = work[r].sense == RowSense::kLessEqual ? 1.0 : -1.0;
      a.at(r, slack_of[r]) = sign[r] * coef;
    }
    if (artificial_of[r] >= 0) {
      a.at(r, artificial_of[r]) = 1.0;
      initial[r] = artificial_of[r];
    } else {
      initial[r] = slack_of[r];
    }
    b[r] = sign[r] * work[r].rhs;
  }

  const int max_iterations =
      options.max_iterations > 0 ? options.max_iterations : 50 * (m + total) + 1000;
  BoundedSimplex simplex(a, b, ub, initial, options, max_iterations);

  bool has_artificials = false;
  std::vector<double> phase1(total, 0.0);
  for (int r = 0; r < m; ++r) {
    if (artificial_of[r] >= 0) {
      phase1[artificial_of[r]] = 1.0;
      has_artificials = true;
    }
  }
  if (has_artificials) {
    const auto result = simplex.Run(phase1);
    if (result != BoundedSimplex::PhaseResult::kOptimal) {
      outcome.status = LpStatus::kNumericFailure;
      outcome.iterations = simplex.iterations();
      outcome.detail = "phase 1 did not terminate";
      return outcome;
    }
    double infeasibility = 0.0;
    for (int r = 0; r < m; ++r) {
      if (artificial_of[r] >= 0) infeasibility += simplex.Value(artificial_of[r]);
    }
    if (infeasibility > ftol) {
      outcome.status = LpStatus::kInfeasible;
      outcome.iterations = simplex.iterations();
      return outcome;
    }
    for (int r = 0; r < m; ++r) {
      if (artificial_of[r] >= 0) simplex.Freeze(artificial_of[r]);
    }
  }

  std::vector<double> phase2(total, 0.0);
  for (int c = 0; c < structural; ++c) {
    phase2[c] = lp.objective[columns[c].source] * columns[c].sign;
  }
  const auto result = simplex.Run(phase2);
  outcome.iterations = simplex.iterations();
  if (result == BoundedSimplex::PhaseResult::kUnbounded) {
    outcome.status = LpStatus::kUnbounded;
    return outcome;
  }
  if (result == BoundedSimplex::PhaseResult::kIterationLimit) {
    outcome.status = LpStatus::kNumericFailure;
    outcome.detail = "iteration limit reached";
    return outcome;
  }

  std::vector<double> x = offset;
  for (int c = 0; c < structural; ++c) {
    x[columns[c].source] += columns[c].sign * simplex.Value(c);
  }
  // Snap values within tolerance of a finite bound onto it.
  for (int j = 0; j < n; ++j) {
    const double lo = lower(j);
    const double hi = upper(j);
    if (x[j] < lo && x[j] > lo - ftol) x[j] = lo;
    if (x[j] > hi && x[j] < hi + ftol) x[j] = hi;
  }
  const double violation = MaxViolation(lp, x);
  if (!(violation <= ftol)) {
    outcome.status = LpStatus::kNumericFailure;
    outcome.detail = "solution violates constraints by " + std::to_string(violation);
    return outcome;
  }
  outcome.status = LpStatus::kOptimal;
  outcome.objective = 0.0;
  for (int j = 0; j < n; ++j) outcome.objective += lp.objective[j] * x[j];
  outcome.x = std::move(x);
  return outcome;
}

}  // namespace mblap
