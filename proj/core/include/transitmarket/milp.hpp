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

#ifndef TRANSITMARKET_MILP_HPP_
#define TRANSITMARKET_MILP_HPP_

#include <vector>

#include "transitmarket/instance.hpp"
#include "transitmarket/lp.hpp"
#include "transitmarket/modes.hpp"
#include "transitmarket/plan.hpp"

namespace transitmarket {

// The flat welfare program over every decision at once, with the level
// indicators relaxed to [0,1] (or pinned to a committed plan): level columns,
// bundle activation columns, one routing column per traveler type and
// frequency variant of each menu option, and rebalancing columns.
//
// Routing columns are in type-share units: the demand row for (trip, type)
// caps their sum by the type's share, and rate-scaled coefficients carry them
// into the capacity and conservation rows and into the welfare objective.
struct MonolithicLP {
  LinearProgram lp;
  int z_begin = 0;           // L*F level columns
  int activation_begin = 0;  // bundle activation columns
  int x_begin = 0;           // routing columns
  int r_begin = 0;           // per-edge rebalancing columns

  struct XColumn {
    int trip = 0;
    int type = 0;
    int mode = 0;     // index into the trip's menu
    int variant = 0;  // index into level_grid over the mode's lines
  };
  std::vector<XColumn> x_columns;

  int z_col(int line, int f, int max_f) const {
    return z_begin + line * max_f + (f - 1);
  }
};

MonolithicLP build_monolithic_lp(const ValidatedInstance& vinst,
                                 const ModeSet& modes,
                                 const FrequencyPlan* z_fixed = nullptr);

// Provably optimal frequency plan by best-bound branch-and-bound over the
// per-line level intervals, with the relaxation solved at every node.
// Branches on the line whose fractional level is nearest one half; equal-value
// incumbents keep the lexicographically smallest plan.
SolveReport solve_exact(const ValidatedInstance& vinst, const ModeSet& modes,
                        const SolveLimits& limits = {});

}  // namespace transitmarket

#endif  // TRANSITMARKET_MILP_HPP_
