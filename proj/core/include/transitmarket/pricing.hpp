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

#ifndef TRANSITMARKET_PRICING_HPP_
#define TRANSITMARKET_PRICING_HPP_

#include <string>
#include <vector>

#include "transitmarket/choice.hpp"
#include "transitmarket/instance.hpp"
#include "transitmarket/modes.hpp"
#include "transitmarket/plan.hpp"

namespace transitmarket {

// Posted terms for one menu mode of one traveler group. `value` nets the
// fare and operating cost out of the perceived valuation, so `value - price`
// is the surplus a traveler keeps by buying the mode.
struct ModeQuote {
  bool open = false;
  double price = 0;
  double value = 0;
  double rate = 0;
};

// Anonymous prices that support a traveler assignment: a congestion price
// per transit edge, a repositioning potential per vertex, and a uniform
// access fee that spreads the opened setup costs over every served
// traveler. A mode's price adds the edge prices along its transit legs, the
// potential rise along its on-demand legs, and the access fee.
struct PriceSystem {
  std::vector<double> edge_price;
  std::vector<double> station_potential;
  double access_fee = 0;
  double rebalance_cost = 0;
  // Indexed [trip][type][menu position].
  std::vector<std::vector<std::vector<ModeQuote>>> quotes;
};

// Builds the price system supporting a converged assignment. The vertex
// potentials blend the stored repositioning duals with the multipliers the
// assignment solve put on them, so an on-demand leg is charged its marginal
// repositioning burden even when the supported assignment avoids it. `pool`
// must be the cut pool the solve converged against.
PriceSystem assemble_prices(const ValidatedInstance& vinst,
                            const ModeSet& modes, const FrequencyPlan& plan,
                            const ChoiceSolution& sol,
                            const std::vector<RebalanceCut>& pool);

// Solves the assignment for a fixed plan and prices it in one step.
PriceSystem price_design(const ValidatedInstance& vinst, const ModeSet& modes,
                         const FrequencyPlan& plan);

// Outcome of auditing a price system against its assignment. `worst` is the
// largest violation found across all checks; `issues` describes each
// failure in one line.
struct EquilibriumCheck {
  bool ok = true;
  double worst = 0;
  std::vector<std::string> issues;
};

// Verifies that the prices support the assignment as a market equilibrium:
// every posted price equals its published parts, no traveler can gain more
// than `tol` by switching modes, capacity prices only appear on full edges,
// travelers stay home only when no mode offers positive fee-free surplus,
// repositioning charges cover the repositioning bill, and access fees cover
// the setup bill.
EquilibriumCheck check_equilibrium(const ValidatedInstance& vinst,
                                   const ModeSet& modes,
                                   const FrequencyPlan& plan,
                                   const PriceSystem& prices,
                                   double tol = 1e-6);

// Splits `total` seats over options proportional to `weights` using largest
// remainders, so every count is within one seat of its exact share. Equal
// remainders cede the leftover seats in an order shuffled by `seed`.
std::vector<long> largest_remainder_counts(const std::vector<double>& weights,
                                           long total, unsigned long seed);

// Whole-traveler realization of the fractional assignment.
struct DiscreteLoads {
  // Indexed [trip][type][menu position].
  std::vector<std::vector<std::vector<long>>> riders;
  // Indexed [trip][type].
  std::vector<std::vector<long>> stay_home;
};

// Draws `travelers` individuals, spreads them over the traveler groups
// proportional to demand, and within each group over its modes and the
// stay-home option proportional to the assigned rates.
DiscreteLoads randomized_assignment(const ValidatedInstance& vinst,
                                    const PriceSystem& prices, long travelers,
                                    unsigned long seed);

}  // namespace transitmarket

#endif  // TRANSITMARKET_PRICING_HPP_
