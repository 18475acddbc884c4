// Copyright 2026 The transitmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef TRANSITMARKET_CHOICE_HPP_
#define TRANSITMARKET_CHOICE_HPP_

#include <optional>
#include <vector>

#include "transitmarket/instance.hpp"
#include "transitmarket/mcf.hpp"
#include "transitmarket/modes.hpp"
#include "transitmarket/plan.hpp"

namespace transitmarket {

// One stored dual vector for the repositioning program. Optimal duals bound
// the surrogate from below via phi + sum_i imb_i(y) * gamma_i <= 0; rays
// exclude traveler patterns whose vehicle imbalance cannot be repaired.
struct RebalanceCut {
  bool from_ray = false;
  std::vector<double> gamma;
};

// Traveler assignment for a fixed frequency plan, with the dual prices that
// support it. Rates are absolute traveler volumes per unit time; entries for
// menu modes that the plan leaves closed are zero.
struct ChoiceSolution {
  double objective = 0;
  double phi = 0;
  // Indexed [trip][type][menu position].
  std::vector<std::vector<std::vector<double>>> y;
  std::vector<std::vector<std::vector<VariantChoice>>> variant;
  // Dual price per edge; zero on edges no line covers.
  std::vector<double> edge_price;
  // Indexed [trip][type].
  std::vector<std::vector<double>> demand_dual;
  // Indexed [trip][type][menu position]; dual of the per-mode rate cap.
  std::vector<std::vector<std::vector<double>>> bound_dual;
  // One multiplier per stored rebalance cut row.
  std::vector<double> cut_dual;
  // Repositioning response to the assignment above.
  std::vector<double> imbalance;
  std::vector<double> rebalance_flows;
  std::vector<double> rebalance_dual;
  double rebalance_cost = 0;
};

// Solves the traveler assignment program for a fixed plan against the given
// pool of rebalance cuts. The surrogate phi underestimates repositioning cost
// until the pool contains the binding dual vector.
ChoiceSolution solve_choice_exact(const ValidatedInstance& vinst,
                                  const ModeSet& modes,
                                  const FrequencyPlan& plan,
                                  const std::vector<RebalanceCut>& pool);

// Alternates the assignment program with the repositioning solve, growing
// `pool`, until the surrogate matches the true repositioning cost. The pool
// does not depend on the plan, so callers may share it across plans.
ChoiceSolution solve_subproblem(const ValidatedInstance& vinst,
                                const ModeSet& modes,
                                const FrequencyPlan& plan,
                                std::vector<RebalanceCut>& pool);

// Fully polynomial approximation of the assignment program without cut rows.
struct FGKResult {
  // Indexed [trip][type][menu position]; a feasible assignment.
  std::vector<std::vector<std::vector<double>>> y;
  // Value achieved by y; at least (1 - epsilon) times the optimum.
  double lower_bound = 0;
  // Final multiplicative edge lengths, usable as approximate prices.
  std::vector<double> edge_length;
};

FGKResult solve_choice_fgk(const ValidatedInstance& vinst,
                           const ModeSet& modes,
                           const FrequencyPlan& plan,
                           double epsilon);

// Builds the planning cut induced by the dual prices of a converged
// subproblem solve; `pool` must be the cut pool that solve produced its
// multipliers against. Returns nothing when every coefficient vanishes.
std::optional<Cut> emit_benders_cut(const ValidatedInstance& vinst,
                                    const ModeSet& modes,
                                    const FrequencyPlan& plan,
                                    const ChoiceSolution& sol,
                                    const RebalanceResult& reb,
                                    const std::vector<RebalanceCut>& pool);

}  // namespace transitmarket

#endif  // TRANSITMARKET_CHOICE_HPP_
