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

#include "transitmarket/milp.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "transitmarket/gen.hpp"
#include "transitmarket/instance.hpp"
#include "transitmarket/lp.hpp"
#include "transitmarket/modes.hpp"
#include "transitmarket/types.hpp"

namespace mkt = transitmarket;

namespace {

// Reference optimum by trying every per-line level vector within budget and
// solving the pinned program for each.
struct OracleResult {
  double welfare = -mkt::kInfinity;
  mkt::FrequencyPlan plan;
  double second_best = -mkt::kInfinity;
};

OracleResult enumerate_plans(const mkt::ValidatedInstance& vinst,
                             const mkt::ModeSet& modes) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  OracleResult out;
  std::vector<int> levels(L, 0);
  while (true) {
    double used = 0;
    for (int l = 0; l < L; ++l) {
      used += vinst.inst.lines[l].cycle_time * levels[l];
    }
    if (used <= vinst.inst.params.fleet_budget + 1e-9) {
      mkt::FrequencyPlan plan{levels};
      mkt::MonolithicLP fixed = mkt::build_monolithic_lp(vinst, modes, &plan);
      mkt::LPSolution sol = mkt::solve_lp(fixed.lp);
      REQUIRE(sol.status == mkt::LPStatus::kOptimal);
      if (sol.objective > out.welfare + 1e-12) {
        out.second_best = out.welfare;
        out.welfare = sol.objective;
        out.plan = plan;
      } else {
        out.second_best = std::max(out.second_best, sol.objective);
      }
    }
    int pos = L - 1;
    while (pos >= 0 && levels[pos] == F) {
      levels[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++levels[pos];
  }
  return out;
}

void check_exact_matches_oracle(const mkt::ValidatedInstance& vinst) {
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  OracleResult oracle = enumerate_plans(vinst, modes);
  mkt::SolveReport report = mkt::solve_exact(vinst, modes);
  CHECK(report.status == mkt::SolveStatus::kOptimal);
  CHECK(std::abs(report.welfare - oracle.welfare) <=
        1e-9 * (1.0 + std::abs(oracle.welfare)));
  CHECK(std::abs(report.bound - report.welfare) <=
        1e-6 * (1.0 + std::abs(report.welfare)));
  if (oracle.welfare - oracle.second_best > 1e-7) {
    CHECK(report.plan.levels == oracle.plan.levels);
  }
}

}  // namespace

TEST_CASE("city sized program matches the pinned column counts") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_nashville_like(7));
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  mkt::MonolithicLP built = mkt::build_monolithic_lp(vinst, modes);
  CHECK(built.activation_begin - built.z_begin == 240);
  CHECK(built.lp.num_cols() - built.r_begin == 664);
  CHECK(built.x_begin - built.activation_begin ==
        vinst.num_bundle_activations());
  CHECK(vinst.num_bundle_activations() == 320);

  long long expected_x = 0;
  for (const mkt::ModeMenu& menu : modes.menus) {
    for (const mkt::HybridMode& mode : menu.modes) {
      long long variants = 1;
      for (size_t i = 0; i < mode.lines.size(); ++i) {
        variants *= vinst.max_frequency();
      }
      expected_x += variants * vinst.num_types();
    }
  }
  CHECK(static_cast<long long>(built.x_columns.size()) == expected_x);
  CHECK(built.r_begin - built.x_begin == expected_x);
}

TEST_CASE("no demand means an empty design") {
  mkt::Instance inst = mkt::make_fig1();
  inst.trips.clear();
  mkt::ValidatedInstance vinst = mkt::validate(std::move(inst));
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  mkt::SolveReport report = mkt::solve_exact(vinst, modes);
  CHECK(report.status == mkt::SolveStatus::kOptimal);
  CHECK(report.welfare == doctest::Approx(0.0));
  CHECK(report.plan.levels == std::vector<int>{0, 0});
  CHECK(report.gap == doctest::Approx(0.0));
}

TEST_CASE("tight budget falls back to on demand only") {
  mkt::Instance inst = mkt::make_fig1();
  inst.params.fleet_budget = 0.3;  // below every line's vehicle time
  mkt::ValidatedInstance vinst = mkt::validate(std::move(inst));
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  mkt::SolveReport report = mkt::solve_exact(vinst, modes);
  CHECK(report.plan.levels == std::vector<int>{0, 0});
  // Only the quality-sensitive half of the demand rides: 6 travelers at net
  // value 3 each, minus 6 vehicles repositioned at 1.5.
  CHECK(report.welfare == doctest::Approx(9.0));
  CHECK(report.edge_rebalance_flow[2] == doctest::Approx(6.0));
  CHECK(report.edge_passenger_flow[0] == doctest::Approx(0.0));
  CHECK(report.mode_rates[0][1][2] == doctest::Approx(6.0));
  CHECK(report.mode_rates[0][0][2] == doctest::Approx(0.0));
}

TEST_CASE("single line opens exactly the affordable prefix") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_two_vertex_gap(3));
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  mkt::SolveReport report = mkt::solve_exact(vinst, modes);
  CHECK(report.plan.levels == std::vector<int>{2});
  // 10 riders at value 3 minus fare 0.1, minus two setup payments of 0.1.
  CHECK(report.welfare == doctest::Approx(28.8));
  check_exact_matches_oracle(vinst);
}

TEST_CASE("branch and bound equals full plan enumeration") {
  check_exact_matches_oracle(mkt::validate(mkt::make_fig1()));
  for (int seed = 0; seed < 6; ++seed) {
    mkt::Instance inst = mkt::make_random_grid(5, 2, 2, 3100 + seed);
    check_exact_matches_oracle(mkt::validate(std::move(inst)));
  }
}

TEST_CASE("fixing the winning plan reproduces the welfare") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  mkt::SolveReport report = mkt::solve_exact(vinst, modes);
  mkt::MonolithicLP fixed = mkt::build_monolithic_lp(vinst, modes, &report.plan);
  mkt::LPSolution sol = mkt::solve_lp(fixed.lp);
  REQUIRE(sol.status == mkt::LPStatus::kOptimal);
  CHECK(std::abs(sol.objective - report.welfare) <=
        1e-9 * (1.0 + std::abs(report.welfare)));

  mkt::MonolithicLP relaxed = mkt::build_monolithic_lp(vinst, modes);
  mkt::LPSolution root = mkt::solve_lp(relaxed.lp);
  REQUIRE(root.status == mkt::LPStatus::kOptimal);
  CHECK(root.objective >= report.welfare - 1e-9 * (1.0 + std::abs(report.welfare)));
}

TEST_CASE("node limit reports a partial solve") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  mkt::SolveLimits limits;
  limits.max_iterations = 1;
  mkt::SolveReport report = mkt::solve_exact(vinst, modes, limits);
  mkt::SolveReport full = mkt::solve_exact(vinst, modes);
  double tol = 1e-9 * (1.0 + std::abs(full.welfare));
  if (report.status == mkt::SolveStatus::kIterationLimit) {
    CHECK(report.bound >= full.welfare - tol);
    CHECK(report.welfare <= full.welfare + tol);
  } else {
    CHECK(report.welfare == doctest::Approx(full.welfare));
  }
}
