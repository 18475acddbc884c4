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

#ifndef TRANSITMARKET_MASTER_HPP_
#define TRANSITMARKET_MASTER_HPP_

#include <optional>
#include <vector>

#include "transitmarket/choice.hpp"
#include "transitmarket/instance.hpp"
#include "transitmarket/modes.hpp"
#include "transitmarket/plan.hpp"

namespace transitmarket {

// Optimum of the planning relaxation: level indicators in [0,1] under the
// ranking and fleet rows, a welfare surrogate capped by every stored cut,
// and the setup spending charged against the objective.
struct MasterSolution {
  bool feasible = true;
  double objective = 0;
  double tau = 0;
  // Level indicator per (line, level), flattened as line * max_frequency +
  // (level - 1).
  std::vector<double> z;
};

// A ceiling on the assignment surplus any design can reach: each traveler
// at their best menu option over every frequency variant, costs ignored
// only where they would help. Caps the welfare surrogate in the relaxation.
double assignment_value_cap(const ValidatedInstance& vinst,
                            const ModeSet& modes);

// Solves the planning relaxation. `value_cap` bounds the welfare surrogate
// from above; pass assignment_value_cap for the instance. When lo/hi are
// given they clamp each line's level interval: indicator (l, f) is fixed
// to one for f <= lo[l] and to zero for f > hi[l].
MasterSolution solve_master_relaxation(const ValidatedInstance& vinst,
                                       const std::vector<Cut>& cuts,
                                       double value_cap,
                                       const std::vector<int>* lo = nullptr,
                                       const std::vector<int>* hi = nullptr);

// A disjunctive cut separated from a fractional planning point, kept in
// both its plain and integrality-strengthened forms so callers can compare
// them coefficient by coefficient.
struct LiftProjectCut {
  Cut cut;        // strengthened form
  Cut raw;        // same multipliers without the integrality strengthening
  double violation = 0;  // cut slack at the separated point, positive
  int pivot = 0;         // flattened indicator column the disjunction split
};

// Separates a cut from the 0/1 disjunction on one indicator column at a
// fractional planning solution. Returns nothing when no inequality valid
// for every integral design cuts the point off by more than a tolerance.
std::optional<LiftProjectCut> generate_lift_project_cut(
    const ValidatedInstance& vinst, const std::vector<Cut>& cuts,
    double value_cap, const MasterSolution& frac, int pivot);

// Certified two-stage solve: an outer loop alternating the planning
// relaxation, disjunctive tightening at fractional points, a rounded
// candidate design evaluated by the assignment subproblem, and a fresh
// planning cut; then, while a gap remains, best-bound branch-and-bound
// over per-line level intervals with every accumulated cut in force.
//
// Designs too large for the certified assignment program are handled by a
// bound-free local search instead: candidate designs are scored by the
// approximate assignment plus an exact repositioning solve, climbing one
// frequency level at a time. A warm design seeds the search and is always
// evaluated first, so the returned welfare never falls below it.
SolveReport run_decomposition(const ValidatedInstance& vinst,
                              const ModeSet& modes,
                              const SolveLimits& limits = {},
                              const FrequencyPlan* warm = nullptr);

// Side-by-side relaxation and exact optimum on the two-vertex family,
// showing the relaxation overshoot grow with the frequency ceiling.
struct GapDemo {
  int max_frequency = 0;
  double relaxed = 0;
  double integral = 0;
  double ratio = 0;
};

GapDemo integrality_gap_demo(int max_frequency);

}  // namespace transitmarket

#endif  // TRANSITMARKET_MASTER_HPP_
