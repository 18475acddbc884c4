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

#include "transitmarket/mcf.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "transitmarket/gen.hpp"
#include "transitmarket/instance.hpp"
#include "transitmarket/lp.hpp"
#include "transitmarket/types.hpp"

namespace mkt = transitmarket;

namespace {

// Reference solve of the same circulation as an explicit linear program:
// minimize rebalancing cost subject to per-vertex conservation.
mkt::LPSolution rebalance_by_lp(const mkt::ValidatedInstance& vinst,
                                const std::vector<double>& imbalance) {
  mkt::LinearProgram lp;
  lp.sense = mkt::Sense::kMinimize;
  for (int e = 0; e < vinst.num_edges(); ++e) {
    lp.add_variable(0.0, mkt::kInfinity, vinst.inst.edges[e].rebalance_cost);
  }
  for (int v = 1; v <= vinst.inst.num_vertices; ++v) {
    int row = lp.add_row(mkt::Relation::kEqual, imbalance[v]);
    for (int e : vinst.out_edges[v]) lp.add_entry(row, e, 1.0);
    for (int e : vinst.in_edges[v]) lp.add_entry(row, e, -1.0);
  }
  return mkt::solve_lp(lp);
}

void check_against_lp(const mkt::ValidatedInstance& vinst,
                      const std::vector<double>& imbalance) {
  mkt::RebalanceResult res = mkt::solve_rebalance(vinst, imbalance);
  mkt::LPSolution ref = rebalance_by_lp(vinst, imbalance);
  if (!res.feasible) {
    REQUIRE(ref.status == mkt::LPStatus::kInfeasible);
    double inner = 0;
    for (int v = 1; v <= vinst.inst.num_vertices; ++v) {
      inner += res.ray[v] * imbalance[v];
    }
    CHECK(inner > 1e-9);
    for (const mkt::Edge& e : vinst.inst.edges) {
      CHECK(res.ray[e.from] - res.ray[e.to] <= 1e-12);
    }
    return;
  }
  REQUIRE(ref.status == mkt::LPStatus::kOptimal);
  CHECK(std::abs(res.cost - ref.objective) <=
        1e-9 * (1.0 + std::abs(ref.objective)));
  // Conservation at every vertex.
  for (int v = 1; v <= vinst.inst.num_vertices; ++v) {
    double net = 0;
    for (int e : vinst.out_edges[v]) net += res.flows[e];
    for (int e : vinst.in_edges[v]) net -= res.flows[e];
    CHECK(std::abs(net - imbalance[v]) <= 1e-7);
  }
  // Dual feasibility, complementary slackness, and strong duality.
  double dual_obj = 0;
  for (int v = 1; v <= vinst.inst.num_vertices; ++v) {
    dual_obj += res.potentials[v] * imbalance[v];
  }
  CHECK(std::abs(dual_obj - res.cost) <= 1e-7 * (1.0 + std::abs(res.cost)));
  for (int e = 0; e < vinst.num_edges(); ++e) {
    const mkt::Edge& edge = vinst.inst.edges[e];
    double slack = edge.rebalance_cost - res.potentials[edge.from] +
                   res.potentials[edge.to];
    CHECK(slack >= -1e-7);
    if (res.flows[e] > 1e-7) CHECK(std::abs(slack) <= 1e-7);
  }
}

}  // namespace

TEST_CASE("single surplus rides the cheap return edge") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  std::vector<double> imbalance = {0, -4.0, 0, 4.0};
  mkt::RebalanceResult res = mkt::solve_rebalance(vinst, imbalance);
  REQUIRE(res.feasible);
  CHECK(res.flows[2] == doctest::Approx(4.0));  // edge (3,1)
  CHECK(res.flows[0] == doctest::Approx(0.0));
  CHECK(res.flows[1] == doctest::Approx(0.0));
  CHECK(res.cost == doctest::Approx(4.0 * 1.5));
  CHECK(res.potentials[1] == doctest::Approx(0.0));
  CHECK(res.potentials[3] == doctest::Approx(1.5));
  check_against_lp(vinst, imbalance);
}

TEST_CASE("balanced vertices need no repositioning") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  std::vector<double> imbalance(4, 0.0);
  mkt::RebalanceResult res = mkt::solve_rebalance(vinst, imbalance);
  REQUIRE(res.feasible);
  CHECK(res.cost == doctest::Approx(0.0));
  for (double f : res.flows) CHECK(f == doctest::Approx(0.0));
  for (int v = 1; v <= 3; ++v) CHECK(res.potentials[v] == doctest::Approx(0.0));
}

TEST_CASE("stranded surplus yields a separating certificate") {
  mkt::Instance inst = mkt::make_fig1();
  inst.edges.pop_back();  // drop (3,1), leaving vertex 3 with no way out
  mkt::ValidatedInstance vinst = mkt::validate(inst);
  std::vector<double> imbalance = {0, -2.0, 0, 2.0};
  mkt::RebalanceResult res = mkt::solve_rebalance(vinst, imbalance);
  REQUIRE(!res.feasible);
  CHECK(res.ray[3] == doctest::Approx(1.0));
  CHECK(res.ray[1] == doctest::Approx(0.0));
  CHECK(res.ray[2] == doctest::Approx(0.0));
  check_against_lp(vinst, imbalance);
}

TEST_CASE("component with net deficit is certified infeasible") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  std::vector<double> imbalance = {0, -5.0, 1.0, 0.0};
  mkt::RebalanceResult res = mkt::solve_rebalance(vinst, imbalance);
  REQUIRE(!res.feasible);
  double inner = 0;
  for (int v = 1; v <= 3; ++v) inner += res.ray[v] * imbalance[v];
  CHECK(inner > 1e-9);
  check_against_lp(vinst, imbalance);
}

TEST_CASE("random circulations match the reference solver") {
  int infeasible_seen = 0;
  for (int seed = 0; seed < 100; ++seed) {
    int n = 3 + seed % 6;
    mkt::Instance inst = mkt::make_random_grid(n, 2, 2, 1000 + seed);
    if (seed % 4 == 0) {
      // Break strong connectivity so some surpluses get stranded.
      inst.edges.erase(inst.edges.begin());
      inst.lines.clear();
      inst.trips.clear();
    }
    mkt::ValidatedInstance vinst = mkt::validate(std::move(inst));
    std::mt19937_64 rng(seed * 77 + 5);
    auto uniform = [&](double lo, double hi) {
      return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    std::vector<double> imbalance(n + 1, 0.0);
    double sum = 0;
    for (int v = 1; v <= n; ++v) {
      imbalance[v] = uniform(-5.0, 5.0);
      sum += imbalance[v];
    }
    if (seed % 3 != 1) {
      // Rebalance to an exactly matched total; otherwise leave the residue.
      for (int v = 1; v <= n; ++v) imbalance[v] -= sum / n;
    }
    mkt::RebalanceResult res = mkt::solve_rebalance(vinst, imbalance);
    if (!res.feasible) ++infeasible_seen;
    check_against_lp(vinst, imbalance);
  }
  CHECK(infeasible_seen > 10);
}
