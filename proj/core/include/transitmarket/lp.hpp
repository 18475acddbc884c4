// Copyright 2026 The transitmarket Authors
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

#ifndef TRANSITMARKET_LP_HPP_
#define TRANSITMARKET_LP_HPP_

#include <string>
#include <vector>

#include "transitmarket/types.hpp"

namespace transitmarket {

enum class Relation { kLessEqual, kEqual, kGreaterEqual };
enum class Sense { kMinimize, kMaximize };

// Sparse linear program in triplet form with per-variable bounds.
//
//   optimize  c'x   subject to   a_i'x (<=,=,>=) b_i,   l <= x <= u.
//
// Rows and columns are created through add_row/add_variable; coefficients may
// be added in any order and duplicate (row, col) entries are summed.
struct LinearProgram {
  Sense sense = Sense::kMaximize;

  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> col_names;

  std::vector<Relation> relations;
  std::vector<double> rhs;
  std::vector<std::string> row_names;

  struct Entry {
    int row = 0;
    int col = 0;
    double value = 0.0;
  };
  std::vector<Entry> entries;

  int num_cols() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }

  int add_variable(double lb, double ub, double obj, std::string name = "");
  int add_row(Relation rel, double b, std::string name = "");
  void add_entry(int row, int col, double value);
};

enum class LPStatus { kOptimal, kInfeasible, kUnbounded };

// Result of a simplex solve. Sign conventions, stated for the user's sense:
//
//  * duals: one value per row. For a maximization problem the dual of a <=
//    row is >= 0 and of a >= row is <= 0; signs flip for minimization.
//    Strong duality holds: objective == duals'b + sum_j reduced_costs[j]*x[j]
//    up to roundoff.
//  * reduced_costs: one value per column, zero for basic columns.
//  * ray: for kUnbounded, a per-column improving feasible direction.
//    For kInfeasible, a per-row Farkas certificate y with y_i <= 0 on <=
//    rows, y_i >= 0 on >= rows, and
//      y'b - sum_j sup_{l_j<=t<=u_j} (y'A_j) t > 0,
//    which proves that no x within bounds satisfies all rows.
//  * basis: the basic column index per row, structural columns first, then
//    slack column (num_cols + row) ids. Two solves of the same program yield
//    bit-identical bases and solutions.
struct LPSolution {
  LPStatus status = LPStatus::kOptimal;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  std::vector<double> ray;
  std::vector<int> basis;
  int iterations = 0;
};

struct SimplexOptions {
  double optimality_tol = 1e-9;
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 64;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degeneracy_limit = 400;
  // Hard cap on simplex iterations; 0 derives one from the program size.
  int max_iterations = 0;
  // Wall-clock budget in seconds; 0 disables. Exceeding it raises LPTimeout.
  double time_limit_seconds = 0;
};

// Raised when a solve runs past options.time_limit_seconds.
class LPTimeout : public SolverError {
 public:
  using SolverError::SolverError;
};

// Two-phase bounded-variable revised simplex. Deterministic: entering
// variables are chosen by most negative reduced cost with lowest-index
// tie-breaks, the ratio test prefers the largest pivot among ties, and
// Bland's rule takes over after options.degeneracy_limit consecutive
// degenerate steps. Throws SolverError on numerical breakdown.
LPSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

// Renders the program in CPLEX LP text format for external cross-checks.
std::string write_lp_format(const LinearProgram& lp);

}  // namespace transitmarket

#endif  // TRANSITMARKET_LP_HPP_
