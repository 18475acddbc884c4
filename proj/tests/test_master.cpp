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

#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "transitmarket/choice.hpp"
#include "transitmarket/gen.hpp"
#include "transitmarket/instance.hpp"
#include "transitmarket/master.hpp"
#include "transitmarket/mcf.hpp"
#include "transitmarket/milp.hpp"
#include "transitmarket/modes.hpp"

namespace mkt = transitmarket;

namespace {

double fleet_cost(const mkt::ValidatedInstance& vinst,
                  const std::vector<int>& levels) {
  double total = 0;
  for (size_t l = 0; l < levels.size(); ++l) {
    total += vinst.inst.lines[l].cycle_time * levels[l];
  }
  return total;
}

// Every design within the fleet budget, by full enumeration of the level
// vectors.
std::vector<std::vector<int>> affordable_plans(
    const mkt::ValidatedInstance& vinst) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  std::vector<std::vector<int>> out;
  std::vector<int> levels(L, 0);
  while (true) {
    if (fleet_cost(vinst, levels) <=
        vinst.inst.params.fleet_budget + 1e-9) {
      out.push_back(levels);
    }
    int k = L - 1;
    while (k >= 0 && levels[k] == F) levels[k--] = 0;
    if (k < 0) break;
    ++levels[k];
  }
  return out;
}

double cut_lhs(const mkt::Cut& cut, const mkt::ValidatedInstance& vinst,
               const std::vector<int>& levels, double tau) {
  const int F = vinst.max_frequency();
  double lhs = cut.tau_coef * tau;
  for (size_t l = 0; l < levels.size(); ++l) {
    for (int f = 1; f <= levels[l]; ++f) {
      lhs += cut.z_coef[l * F + (f - 1)];
    }
  }
  return lhs;
}

void check_matches_exact(const mkt::Instance& inst) {
  mkt::ValidatedInstance vinst = mkt::validate(inst);
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  mkt::SolveReport exact = mkt::solve_exact(vinst, modes);
  mkt::SolveReport decomp = mkt::run_decomposition(vinst, modes);
  CHECK(decomp.status == mkt::SolveStatus::kOptimal);
  double tol = 1e-6 * std::max(1.0, std::abs(exact.welfare));
  CHECK(decomp.welfare == doctest::Approx(exact.welfare).epsilon(1e-6));
  CHECK(decomp.bound >= decomp.welfare - tol);
  CHECK(decomp.bound <= exact.welfare + tol);
  if (!(decomp.plan == exact.plan)) {
    // A different design is only acceptable at an exact welfare tie.
    CHECK(std::abs(decomp.welfare - exact.welfare) <= tol);
  }
}

}  // namespace

TEST_CASE("planning relaxation spends nothing without evidence of value") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  double cap = mkt::assignment_value_cap(vinst, modes);
  CHECK(cap > 0);
  mkt::MasterSolution ms = mkt::solve_master_relaxation(vinst, {}, cap);
  REQUIRE(ms.feasible);
  CHECK(ms.tau == doctest::Approx(cap));
  CHECK(ms.objective == doctest::Approx(cap));
  for (double z : ms.z) CHECK(z == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("planning relaxation prices a level against its setup cost") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  const int F = vinst.max_frequency();
  double cap = mkt::assignment_value_cap(vinst, modes);
  double setup = vinst.inst.lines[0].setup_cost;
  REQUIRE(setup > 0);

  // One cut caps the surrogate at a low floor plus a reward on the first
  // level of line one: tau <= floor + reward * z.
  auto priced = [&](double reward) {
    mkt::Cut cut;
    cut.tau_coef = 1.0;
    cut.z_coef.assign(vinst.num_lines() * F, 0.0);
    cut.z_coef[0] = -reward;
    cut.rhs = 1.0;
    mkt::MasterSolution ms =
        mkt::solve_master_relaxation(vinst, {cut}, cap);
    REQUIRE(ms.feasible);
    return ms;
  };

  mkt::MasterSolution worth = priced(setup + 1.0);
  CHECK(worth.z[0] == doctest::Approx(1.0));
  CHECK(worth.objective == doctest::Approx(1.0 + (setup + 1.0) - setup));

  mkt::MasterSolution worthless = priced(setup * 0.5);
  CHECK(worthless.z[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(worthless.objective == doctest::Approx(1.0));
}

TEST_CASE("planning relaxation honors level interval clamps") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  const int F = vinst.max_frequency();
  double cap = mkt::assignment_value_cap(vinst, modes);
  std::vector<int> lo = {1, 0};
  std::vector<int> hi = {2, 0};
  mkt::MasterSolution ms =
      mkt::solve_master_relaxation(vinst, {}, cap, &lo, &hi);
  REQUIRE(ms.feasible);
  CHECK(ms.z[0] == doctest::Approx(1.0));
  for (int f = 3; f <= F; ++f) {
    CHECK(ms.z[f - 1] == doctest::Approx(0.0));
  }
  for (int f = 1; f <= F; ++f) {
    CHECK(ms.z[F + f - 1] == doctest::Approx(0.0));
  }
}

TEST_CASE("decomposition matches the exact optimum on the triangle") {
  check_matches_exact(mkt::make_fig1());
  mkt::Instance wide = mkt::make_fig1();
  wide.params.menu_cap = 5;
  check_matches_exact(wide);
}

TEST_CASE("decomposition matches the exact optimum on random networks") {
  for (unsigned long seed = 8600; seed < 8612; ++seed) {
    int n = 3 + static_cast<int>(seed % 3);
    int lines = 1 + static_cast<int>(seed % 2);
    int fmax = 1 + static_cast<int>(seed % 3);
    CAPTURE(seed);
    check_matches_exact(
        mkt::make_random_grid(n, lines, fmax, seed));
  }
}

TEST_CASE("disjunctive cuts hold for every affordable design") {
  int produced = 0;
  for (int variant = 0; variant < 4; ++variant) {
    mkt::Instance inst;
    switch (variant) {
      case 0: inst = mkt::make_two_vertex_gap(3); break;
      case 1: inst = mkt::make_two_vertex_gap(6); break;
      case 2: inst = mkt::make_fig1(); break;
      default: inst = mkt::make_random_grid(4, 2, 3, 777); break;
    }
    mkt::ValidatedInstance vinst = mkt::validate(inst);
    mkt::ModeSet modes = mkt::enumerate_modes(vinst);
    const int L = vinst.num_lines();
    const int F = vinst.max_frequency();
    double cap = mkt::assignment_value_cap(vinst, modes);

    std::vector<mkt::Cut> cuts;
    std::vector<mkt::RebalanceCut> pool;
    for (int half : {0, 1}) {
      mkt::FrequencyPlan plan;
      plan.levels.assign(L, half ? F / 2 : 0);
      while (fleet_cost(vinst, plan.levels) >
             vinst.inst.params.fleet_budget + 1e-9) {
        for (int& lvl : plan.levels) {
          if (lvl > 0) {
            --lvl;
            break;
          }
        }
      }
      mkt::ChoiceSolution sol =
          mkt::solve_subproblem(vinst, modes, plan, pool);
      mkt::RebalanceResult reb = mkt::solve_rebalance(vinst, sol.imbalance);
      auto cut = mkt::emit_benders_cut(vinst, modes, plan, sol, reb, pool);
      if (cut) cuts.push_back(*cut);
    }
    mkt::MasterSolution ms = mkt::solve_master_relaxation(vinst, cuts, cap);
    REQUIRE(ms.feasible);

    std::vector<std::vector<int>> plans = affordable_plans(vinst);
    REQUIRE(plans.size() <= 256);
    for (int j = 0; j < L * F; ++j) {
      if (ms.z[j] <= 1e-6 || ms.z[j] >= 1 - 1e-6) continue;
      auto lpc = mkt::generate_lift_project_cut(vinst, cuts, cap, ms, j);
      if (!lpc) continue;
      ++produced;
      CHECK(lpc->violation > 1e-7);
      // The separated point itself violates the stored inequality.
      double at_point = 0;
      for (int k = 0; k < L * F; ++k) {
        at_point += lpc->cut.z_coef[k] * ms.z[k];
      }
      at_point += lpc->cut.tau_coef * ms.tau;
      CHECK(at_point > lpc->cut.rhs + 1e-7);
      // Strengthening may only shrink coefficients, never grow them.
      for (int k = 0; k < L * F; ++k) {
        CHECK(-lpc->cut.z_coef[k] <= -lpc->raw.z_coef[k] + 1e-9);
      }
      for (const std::vector<int>& levels : plans) {
        mkt::FrequencyPlan plan;
        plan.levels = levels;
        mkt::ChoiceSolution sol =
            mkt::solve_subproblem(vinst, modes, plan, pool);
        double tau = sol.objective;
        CAPTURE(variant);
        CAPTURE(j);
        CHECK(cut_lhs(lpc->cut, vinst, levels, tau) <=
              lpc->cut.rhs + 1e-6);
        CHECK(cut_lhs(lpc->raw, vinst, levels, tau) <=
              lpc->raw.rhs + 1e-6);
      }
    }
  }
  CHECK(produced >= 4);
}

TEST_CASE("frequency ceilings widen the relaxation overshoot") {
  mkt::GapDemo four = mkt::integrality_gap_demo(4);
  mkt::GapDemo eight = mkt::integrality_gap_demo(8);
  mkt::GapDemo sixteen = mkt::integrality_gap_demo(16);
  CHECK(four.integral == doctest::Approx(28.8));
  CHECK(eight.integral == doctest::Approx(28.8));
  CHECK(sixteen.integral == doctest::Approx(28.8));
  CHECK(four.ratio == doctest::Approx(1.6944).epsilon(1e-3));
  CHECK(eight.ratio == doctest::Approx(3.0833).epsilon(1e-3));
  CHECK(sixteen.ratio == doctest::Approx(5.7309).epsilon(1e-3));
  CHECK(four.ratio <= eight.ratio + 1e-9);
  CHECK(eight.ratio <= sixteen.ratio + 1e-9);
  CHECK(sixteen.ratio > 2.0);
}

TEST_CASE("iteration and time limits leave a coherent partial answer") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);

  mkt::SolveLimits iter_limits;
  iter_limits.max_iterations = 1;
  mkt::SolveReport brief =
      mkt::run_decomposition(vinst, modes, iter_limits);
  CHECK(brief.status == mkt::SolveStatus::kIterationLimit);
  CHECK(brief.welfare >= 0);
  CHECK(brief.bound >= brief.welfare - 1e-9);
  CHECK(fleet_cost(vinst, brief.plan.levels) <=
        vinst.inst.params.fleet_budget + 1e-9);

  mkt::SolveLimits time_limits;
  time_limits.time_limit = 1e-9;
  mkt::SolveReport instant =
      mkt::run_decomposition(vinst, modes, time_limits);
  CHECK(instant.status == mkt::SolveStatus::kTimeLimit);
  CHECK(instant.bound >= instant.welfare - 1e-9);
}

TEST_CASE("reported flows reproduce the certified assignment") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  mkt::SolveReport exact = mkt::solve_exact(vinst, modes);
  mkt::SolveReport decomp = mkt::run_decomposition(vinst, modes);
  REQUIRE(decomp.plan == exact.plan);
  REQUIRE(decomp.edge_passenger_flow.size() ==
          exact.edge_passenger_flow.size());
  for (size_t e = 0; e < exact.edge_passenger_flow.size(); ++e) {
    CHECK(decomp.edge_passenger_flow[e] ==
          doctest::Approx(exact.edge_passenger_flow[e]).epsilon(1e-6));
    CHECK(decomp.edge_rebalance_flow[e] ==
          doctest::Approx(exact.edge_rebalance_flow[e]).epsilon(1e-6));
  }
  double total_exact = 0, total_decomp = 0;
  for (size_t ti = 0; ti < exact.mode_rates.size(); ++ti) {
    for (size_t ty = 0; ty < exact.mode_rates[ti].size(); ++ty) {
      for (size_t mi = 0; mi < exact.mode_rates[ti][ty].size(); ++mi) {
        total_exact += exact.mode_rates[ti][ty][mi];
        total_decomp += decomp.mode_rates[ti][ty][mi];
      }
    }
  }
  CHECK(total_decomp == doctest::Approx(total_exact).epsilon(1e-6));
}

TEST_CASE("large designs fall back to local search and honor warm starts") {
  // 25 lines at five levels puts the design over the certified threshold.
  mkt::Instance inst = mkt::make_random_grid(12, 25, 5, 424242);
  mkt::ValidatedInstance vinst = mkt::validate(inst);
  mkt::ModeSet modes = mkt::enumerate_modes(vinst);
  REQUIRE(vinst.num_lines() * vinst.max_frequency() > 120);

  mkt::SolveReport first = mkt::run_decomposition(vinst, modes);
  CHECK(first.welfare >= 0);
  CHECK(first.bound >= first.welfare - 1e-9);
  CHECK(fleet_cost(vinst, first.plan.levels) <=
        vinst.inst.params.fleet_budget + 1e-9);

  mkt::SolveReport rerun =
      mkt::run_decomposition(vinst, modes, {}, &first.plan);
  CHECK(rerun.welfare >= first.welfare - 1e-9);
}
