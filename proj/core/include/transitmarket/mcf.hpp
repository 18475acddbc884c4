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

#ifndef TRANSITMARKET_MCF_HPP_
#define TRANSITMARKET_MCF_HPP_

#include <vector>

#include "transitmarket/instance.hpp"

namespace transitmarket {

// Outcome of routing empty vehicles so that every vertex's net vehicle
// surplus is carried to the vertices that run a deficit.
//
// When feasible, `flows` is the cheapest circulation, `potentials` holds dual
// values gamma with gamma_i - gamma_j <= rebalance cost on every edge (i,j),
// tight wherever flow is positive, and gamma anchored to 0 at the
// lowest-numbered vertex of each weakly connected component.
//
// When infeasible, `ray` is a 0/1 vertex indicator gamma^u with
// gamma^u_i - gamma^u_j <= 0 on every edge and a positive inner product with
// the imbalance vector, certifying that no feasible circulation exists.
struct RebalanceResult {
  bool feasible = false;
  std::vector<double> flows;       // per edge
  double cost = 0;
  std::vector<double> potentials;  // per vertex, index 0 unused
  std::vector<double> ray;         // per vertex, index 0 unused
};

// Solves the rebalancing problem for a per-vertex imbalance vector, where
// imbalance_i > 0 means MoD passenger arrivals left surplus vehicles at i
// that must flow out. The vector uses indices 1..n; entries must sum to 0
// per weakly connected component for feasibility.
RebalanceResult solve_rebalance(const ValidatedInstance& vinst,
                                const std::vector<double>& imbalance);

}  // namespace transitmarket

#endif  // TRANSITMARKET_MCF_HPP_
