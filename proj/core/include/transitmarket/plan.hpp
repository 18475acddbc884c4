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

#ifndef TRANSITMARKET_PLAN_HPP_
#define TRANSITMARKET_PLAN_HPP_

#include <vector>

namespace transitmarket {

// A committed service design: the number of open frequency levels per line.
// Level indicators form prefixes (opening level f opens all levels below),
// so one integer per line describes the whole 0/1 matrix.
struct FrequencyPlan {
  std::vector<int> levels;

  // Whether level f (1-based) of `line` is open.
  bool open(int line, int f) const { return f <= levels[line]; }
  bool operator==(const FrequencyPlan& o) const { return levels == o.levels; }
};

struct SolveLimits {
  long max_iterations = 0;   // nodes or outer iterations; 0 means unlimited
  double time_limit = 0;     // seconds; 0 means unlimited
  double gap_target = 1e-6;  // relative optimality gap to stop at
};

enum class SolveStatus {
  kOptimal,
  kIterationLimit,
  kTimeLimit,
  kNoFeasibleDesign,
};

struct IterationRecord {
  long iteration = 0;
  double bound = 0;
  double lower = 0;
  int cuts_added = 0;
  double subproblem_seconds = 0;
};

// A valid inequality over the level indicators and the welfare surrogate,
// stored as tau_coef*tau + sum z_coef[l*F + f-1]*z_{l,f} <= rhs.
struct Cut {
  enum class Kind { kBendersOptimality, kBendersFeasibility, kLiftProject };
  Kind kind = Kind::kBendersOptimality;
  double tau_coef = 0;
  std::vector<double> z_coef;
  double rhs = 0;
  long iteration = 0;
};

// Common result of the exact baseline and the decomposition: the plan, its
// certified bounds, and the routed flows. mode_rates[trip][type][mode] is the
// traveler rate on each menu option, summed over frequency variants.
struct SolveReport {
  SolveStatus status = SolveStatus::kOptimal;
  FrequencyPlan plan;
  double welfare = 0;
  double bound = 0;
  double gap = 0;
  long nodes = 0;
  double runtime_seconds = 0;
  // Wall clock seconds from solve start until the reported welfare was
  // first attained; equals runtime_seconds when no design was found.
  double incumbent_seconds = 0;
  std::vector<double> edge_passenger_flow;
  std::vector<double> edge_rebalance_flow;
  std::vector<std::vector<std::vector<double>>> mode_rates;
  std::vector<IterationRecord> trace;
};

}  // namespace transitmarket

#endif  // TRANSITMARKET_PLAN_HPP_
