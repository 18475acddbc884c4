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

#include "transitmarket/master.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "transitmarket/gen.hpp"
#include "transitmarket/log.hpp"
#include "transitmarket/lp.hpp"
#include "transitmarket/mcf.hpp"
#include "transitmarket/milp.hpp"
#include "transitmarket/types.hpp"

namespace transitmarket {

namespace {

constexpr double kIntegralityTol = 1e-6;
constexpr double kCutViolationTol = 1e-7;
constexpr int kPhase1Rounds = 12;
constexpr int kNodeRefineRounds = 400;
constexpr int kCutPoolCap = 200;
constexpr int kSplitCutsPerRound = 8;
constexpr double kSearchEpsilon = 0.25;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

double setup_cost_of(const ValidatedInstance& vinst,
                     const FrequencyPlan& plan) {
  double total = 0;
  for (size_t l = 0; l < plan.levels.size(); ++l) {
    total += vinst.inst.lines[l].setup_cost * plan.levels[l];
  }
  return total;
}

double fleet_cost_of(const ValidatedInstance& vinst,
                     const FrequencyPlan& plan) {
  double total = 0;
  for (size_t l = 0; l < plan.levels.size(); ++l) {
    total += vinst.inst.lines[l].cycle_time * plan.levels[l];
  }
  return total;
}

// The planning feasible region as a list of >= rows over the indicator
// columns and the welfare surrogate, shared by the relaxation and the cut
// separator so the two never drift apart.
struct PlanningRow {
  std::vector<double> z;  // coefficient per flattened indicator
  double tau = 0;
  double rhs = 0;
};

std::vector<PlanningRow> planning_rows(const ValidatedInstance& vinst,
                                       const std::vector<Cut>& cuts,
                                       double value_cap) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  const int N = L * F;
  std::vector<PlanningRow> rows;
  for (int j = 0; j < N; ++j) {
    PlanningRow lo;
    lo.z.assign(N, 0.0);
    lo.z[j] = 1.0;
    rows.push_back(std::move(lo));
    PlanningRow hi;
    hi.z.assign(N, 0.0);
    hi.z[j] = -1.0;
    hi.rhs = -1.0;
    rows.push_back(std::move(hi));
  }
  for (int l = 0; l < L; ++l) {
    for (int f = 2; f <= F; ++f) {
      PlanningRow rank;
      rank.z.assign(N, 0.0);
      rank.z[l * F + (f - 2)] = 1.0;
      rank.z[l * F + (f - 1)] = -1.0;
      rows.push_back(std::move(rank));
    }
  }
  PlanningRow fleet;
  fleet.z.assign(N, 0.0);
  for (int l = 0; l < L; ++l) {
    for (int f = 1; f <= F; ++f) {
      fleet.z[l * F + (f - 1)] = -vinst.inst.lines[l].cycle_time;
    }
  }
  fleet.rhs = -vinst.inst.params.fleet_budget;
  rows.push_back(std::move(fleet));
  for (const Cut& cut : cuts) {
    PlanningRow row;
    row.z.assign(N, 0.0);
    for (int j = 0; j < N && j < static_cast<int>(cut.z_coef.size()); ++j) {
      row.z[j] = -cut.z_coef[j];
    }
    row.tau = -cut.tau_coef;
    row.rhs = -cut.rhs;
    rows.push_back(std::move(row));
  }
  PlanningRow cap;
  cap.z.assign(N, 0.0);
  cap.tau = -1.0;
  cap.rhs = -value_cap;
  rows.push_back(std::move(cap));
  return rows;
}

// A valid ceiling on the welfare surrogate as a function of the level
// indicators: every traveler is worth at most their best fully on-demand
// option plus the best upgrade any open line level unlocks for them. The
// upgrade terms ignore that a variant may need several lines at once, so
// the ceiling only overestimates.
Cut service_ceiling_cut(const ValidatedInstance& vinst,
                        const ModeSet& modes) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  std::vector<std::vector<double>> upgrade(L, std::vector<double>(F + 1, 0));
  double base_total = 0;
  std::vector<std::vector<double>> best(L, std::vector<double>(F + 1, 0));
  for (size_t ti = 0; ti < modes.menus.size(); ++ti) {
    const Trip& trip = vinst.inst.trips[ti];
    for (int ty = 0; ty < vinst.num_types(); ++ty) {
      double rate = vinst.typed_rate(static_cast<int>(ti), ty);
      if (rate <= 0) continue;
      double on_demand = 0;
      for (const HybridMode& mode : modes.menus[ti].modes) {
        if (!mode.lines.empty()) continue;
        std::vector<int> full(L, 0);
        on_demand = std::max(on_demand,
                             mode_valuation(vinst, mode, ty, full, trip) -
                                 mode_cost(vinst, mode, full));
      }
      base_total += rate * on_demand;
      for (auto& row : best) std::fill(row.begin(), row.end(), 0.0);
      for (const HybridMode& mode : modes.menus[ti].modes) {
        if (mode.lines.empty()) continue;
        for (const std::vector<int>& variant :
             level_grid(static_cast<int>(mode.lines.size()), F)) {
          std::vector<int> full = expand_levels(mode, variant, L);
          double gain = mode_valuation(vinst, mode, ty, full, trip) -
                        mode_cost(vinst, mode, full) - on_demand;
          if (gain <= 0) continue;
          for (size_t pos = 0; pos < mode.lines.size(); ++pos) {
            int l = mode.lines[pos];
            for (int f = variant[pos]; f <= F; ++f) {
              best[l][f] = std::max(best[l][f], gain);
            }
          }
        }
      }
      for (int l = 0; l < L; ++l) {
        for (int f = 1; f <= F; ++f) {
          upgrade[l][f] += rate * best[l][f];
        }
      }
    }
  }
  Cut cut;
  cut.kind = Cut::Kind::kBendersOptimality;
  cut.tau_coef = 1.0;
  cut.z_coef.assign(L * F, 0.0);
  for (int l = 0; l < L; ++l) {
    for (int f = 1; f <= F; ++f) {
      cut.z_coef[l * F + (f - 1)] = -(upgrade[l][f] - upgrade[l][f - 1]);
    }
  }
  cut.rhs = base_total;
  return cut;
}

FrequencyPlan plan_from_indicators(const ValidatedInstance& vinst,
                                   const std::vector<double>& z) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  FrequencyPlan plan;
  plan.levels.assign(L, 0);
  for (int l = 0; l < L; ++l) {
    double level = 0;
    for (int f = 1; f <= F; ++f) level += z[l * F + (f - 1)];
    plan.levels[l] = static_cast<int>(std::lround(level));
  }
  return plan;
}

// Rounds a fractional planning point to a design: each line keeps the
// levels committed at half or more, then levels are peeled off the weakest
// commitments until the fleet fits.
FrequencyPlan round_repair(const ValidatedInstance& vinst,
                           const std::vector<double>& z) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  FrequencyPlan plan;
  plan.levels.assign(L, 0);
  for (int l = 0; l < L; ++l) {
    int level = 0;
    for (int f = 1; f <= F; ++f) {
      if (z[l * F + (f - 1)] >= 0.5) {
        level = f;
      } else {
        break;
      }
    }
    plan.levels[l] = level;
  }
  double budget = vinst.inst.params.fleet_budget;
  while (fleet_cost_of(vinst, plan) > budget + 1e-9) {
    int weakest = -1;
    double weakest_z = kInfinity;
    for (int l = 0; l < L; ++l) {
      if (plan.levels[l] == 0) continue;
      double commit = z[l * F + (plan.levels[l] - 1)];
      if (commit < weakest_z - 1e-15) {
        weakest_z = commit;
        weakest = l;
      }
    }
    if (weakest < 0) break;
    --plan.levels[weakest];
  }
  return plan;
}

struct Node {
  double priority = 0;
  long seq = 0;
  std::vector<int> lo, hi;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.seq > b.seq;
  }
};

}  // namespace

double assignment_value_cap(const ValidatedInstance& vinst,
                            const ModeSet& modes) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  double cap = 0;
  for (size_t ti = 0; ti < modes.menus.size(); ++ti) {
    const Trip& trip = vinst.inst.trips[ti];
    for (int ty = 0; ty < vinst.num_types(); ++ty) {
      double best = 0;
      for (const HybridMode& mode : modes.menus[ti].modes) {
        for (const std::vector<int>& variant :
             level_grid(static_cast<int>(mode.lines.size()), F)) {
          std::vector<int> full = expand_levels(mode, variant, L);
          double value = mode_valuation(vinst, mode, ty, full, trip);
          double cost = mode_cost(vinst, mode, full);
          best = std::max(best, value - cost);
        }
      }
      cap += vinst.typed_rate(static_cast<int>(ti), ty) * best;
    }
  }
  return cap;
}

MasterSolution solve_master_relaxation(const ValidatedInstance& vinst,
                                       const std::vector<Cut>& cuts,
                                       double value_cap,
                                       const std::vector<int>* lo,
                                       const std::vector<int>* hi) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  LinearProgram lp;
  lp.sense = Sense::kMaximize;
  for (int l = 0; l < L; ++l) {
    for (int f = 1; f <= F; ++f) {
      double zlo = 0, zhi = 1;
      if (lo != nullptr && f <= (*lo)[l]) zlo = 1;
      if (hi != nullptr && f > (*hi)[l]) zhi = 0;
      lp.add_variable(zlo, zhi, -vinst.inst.lines[l].setup_cost);
    }
  }
  int tau_col = lp.add_variable(-kInfinity, value_cap, 1.0, "tau");
  for (int l = 0; l < L; ++l) {
    for (int f = 2; f <= F; ++f) {
      int row = lp.add_row(Relation::kLessEqual, 0);
      lp.add_entry(row, l * F + (f - 1), 1.0);
      lp.add_entry(row, l * F + (f - 2), -1.0);
    }
  }
  int fleet = lp.add_row(Relation::kLessEqual, vinst.inst.params.fleet_budget);
  for (int l = 0; l < L; ++l) {
    for (int f = 1; f <= F; ++f) {
      lp.add_entry(fleet, l * F + (f - 1), vinst.inst.lines[l].cycle_time);
    }
  }
  for (const Cut& cut : cuts) {
    int row = lp.add_row(Relation::kLessEqual, cut.rhs);
    if (cut.tau_coef != 0) lp.add_entry(row, tau_col, cut.tau_coef);
    for (size_t j = 0; j < cut.z_coef.size(); ++j) {
      if (cut.z_coef[j] != 0) {
        lp.add_entry(row, static_cast<int>(j), cut.z_coef[j]);
      }
    }
  }

  LPSolution sol = solve_lp(lp);
  MasterSolution out;
  if (sol.status == LPStatus::kInfeasible) {
    out.feasible = false;
    return out;
  }
  if (sol.status != LPStatus::kOptimal) {
    throw SolverError("planning relaxation failed to solve");
  }
  out.objective = sol.objective;
  out.tau = sol.x[tau_col];
  out.z.assign(sol.x.begin(), sol.x.begin() + L * F);
  return out;
}

std::optional<LiftProjectCut> generate_lift_project_cut(
    const ValidatedInstance& vinst, const std::vector<Cut>& cuts,
    double value_cap, const MasterSolution& frac, int pivot) {
  const int N = vinst.num_lines() * vinst.max_frequency();
  std::vector<PlanningRow> rows = planning_rows(vinst, cuts, value_cap);
  const int R = static_cast<int>(rows.size());

  LinearProgram cglp;
  cglp.sense = Sense::kMaximize;
  int u_begin = cglp.num_cols();
  for (int i = 0; i < R; ++i) cglp.add_variable(0, 1, 0);
  int u_split = cglp.add_variable(0, 1, 0, "u_split");
  int v_begin = cglp.num_cols();
  for (int i = 0; i < R; ++i) cglp.add_variable(0, 1, 0);
  int v_split = cglp.add_variable(0, 1, 0, "v_split");
  int alpha_begin = cglp.num_cols();
  for (int j = 0; j < N; ++j) {
    cglp.add_variable(-kInfinity, kInfinity, -frac.z[j]);
  }
  int alpha_tau = cglp.add_variable(-kInfinity, kInfinity, -frac.tau);
  int beta = cglp.add_variable(-kInfinity, kInfinity, 1.0, "beta");

  for (int j = 0; j < N; ++j) {
    int left = cglp.add_row(Relation::kGreaterEqual, 0);
    cglp.add_entry(left, alpha_begin + j, 1.0);
    for (int i = 0; i < R; ++i) {
      if (rows[i].z[j] != 0) cglp.add_entry(left, u_begin + i, -rows[i].z[j]);
    }
    if (j == pivot) cglp.add_entry(left, u_split, 1.0);
    int right = cglp.add_row(Relation::kGreaterEqual, 0);
    cglp.add_entry(right, alpha_begin + j, 1.0);
    for (int i = 0; i < R; ++i) {
      if (rows[i].z[j] != 0) cglp.add_entry(right, v_begin + i, -rows[i].z[j]);
    }
    if (j == pivot) cglp.add_entry(right, v_split, -1.0);
  }
  int tau_left = cglp.add_row(Relation::kEqual, 0);
  cglp.add_entry(tau_left, alpha_tau, 1.0);
  int tau_right = cglp.add_row(Relation::kEqual, 0);
  cglp.add_entry(tau_right, alpha_tau, 1.0);
  for (int i = 0; i < R; ++i) {
    if (rows[i].tau != 0) {
      cglp.add_entry(tau_left, u_begin + i, -rows[i].tau);
      cglp.add_entry(tau_right, v_begin + i, -rows[i].tau);
    }
  }
  int beta_left = cglp.add_row(Relation::kLessEqual, 0);
  cglp.add_entry(beta_left, beta, 1.0);
  int beta_right = cglp.add_row(Relation::kLessEqual, 0);
  cglp.add_entry(beta_right, beta, 1.0);
  for (int i = 0; i < R; ++i) {
    if (rows[i].rhs != 0) {
      cglp.add_entry(beta_left, u_begin + i, -rows[i].rhs);
      cglp.add_entry(beta_right, v_begin + i, -rows[i].rhs);
    }
  }
  cglp.add_entry(beta_right, v_split, -1.0);
  int norm = cglp.add_row(Relation::kEqual, 1.0);
  for (int i = 0; i < R; ++i) {
    cglp.add_entry(norm, u_begin + i, 1.0);
    cglp.add_entry(norm, v_begin + i, 1.0);
  }
  cglp.add_entry(norm, u_split, 1.0);
  cglp.add_entry(norm, v_split, 1.0);

  LPSolution sol;
  try {
    sol = solve_lp(cglp);
  } catch (const SolverError&) {
    return std::nullopt;
  }
  if (sol.status != LPStatus::kOptimal) return std::nullopt;

  double w_split = sol.x[u_split];
  double y_split = sol.x[v_split];
  std::vector<double> s1(N, 0.0), s2(N, 0.0);
  double s1_tau = 0, s2_tau = 0, r1 = 0, r2 = 0;
  for (int i = 0; i < R; ++i) {
    double ui = sol.x[u_begin + i];
    double vi = sol.x[v_begin + i];
    if (ui != 0) {
      for (int j = 0; j < N; ++j) s1[j] += ui * rows[i].z[j];
      s1_tau += ui * rows[i].tau;
      r1 += ui * rows[i].rhs;
    }
    if (vi != 0) {
      for (int j = 0; j < N; ++j) s2[j] += vi * rows[i].z[j];
      s2_tau += vi * rows[i].tau;
      r2 += vi * rows[i].rhs;
    }
  }
  r2 += y_split;
  if (std::abs(s1_tau - s2_tau) > 1e-7 * (1 + std::abs(s1_tau))) {
    return std::nullopt;
  }

  LiftProjectCut out;
  out.pivot = pivot;
  out.raw.kind = Cut::Kind::kLiftProject;
  out.raw.z_coef.assign(N, 0.0);
  out.cut.kind = Cut::Kind::kLiftProject;
  out.cut.z_coef.assign(N, 0.0);
  double beta_val = std::min(r1, r2);
  double split_weight = w_split + y_split;
  for (int j = 0; j < N; ++j) {
    double raw_alpha;
    double strong_alpha;
    if (j == pivot) {
      raw_alpha = std::max(s1[j] - w_split, s2[j] + y_split);
      strong_alpha = raw_alpha;
    } else {
      raw_alpha = std::max(s1[j], s2[j]);
      strong_alpha = raw_alpha;
      if (split_weight > 1e-9) {
        double cross = (s1[j] - s2[j]) / split_weight;
        double down = s1[j] - w_split * std::floor(cross);
        double up = s2[j] + y_split * std::ceil(cross);
        strong_alpha = std::min(down, up);
      }
    }
    out.raw.z_coef[j] = -raw_alpha;
    out.cut.z_coef[j] = -strong_alpha;
  }
  out.raw.tau_coef = -s1_tau;
  out.cut.tau_coef = -s1_tau;
  out.raw.rhs = -beta_val;
  out.cut.rhs = -beta_val;

  double lhs = 0;
  for (int j = 0; j < N; ++j) lhs += -out.cut.z_coef[j] * frac.z[j];
  lhs += -out.cut.tau_coef * frac.tau;
  out.violation = beta_val - lhs;
  double widest = std::abs(beta_val);
  for (int j = 0; j < N; ++j) {
    widest = std::max(widest, std::abs(out.cut.z_coef[j]));
  }
  if (!(out.violation > kCutViolationTol) || widest > 1e8) {
    return std::nullopt;
  }
  return out;
}

namespace {

// Shared state of the certified two-stage solve.
struct CertifiedSearch {
  CertifiedSearch(const ValidatedInstance& vi, const ModeSet& mo,
                  const SolveLimits& li,
                  std::chrono::steady_clock::time_point st)
      : vinst(vi), modes(mo), limits(li), start(st) {}

  const ValidatedInstance& vinst;
  const ModeSet& modes;
  const SolveLimits& limits;
  std::chrono::steady_clock::time_point start;
  double value_cap = 0;
  std::vector<Cut> cuts;
  std::vector<RebalanceCut> pool;
  std::set<std::vector<int>> certified;
  bool have_inc = false;
  double inc_welfare = 0;
  FrequencyPlan inc_plan;
  ChoiceSolution inc_sol;
  RebalanceResult inc_reb;
  long iterations = 0;
  SolveReport report;

  double scale() const { return std::max(1.0, std::abs(inc_welfare)); }
  bool out_of_time() const {
    return limits.time_limit > 0 &&
           seconds_since(start) > limits.time_limit;
  }
  bool out_of_iterations() const {
    return limits.max_iterations > 0 && iterations >= limits.max_iterations;
  }

  double certify(const FrequencyPlan& plan) {
    ChoiceSolution sol = solve_subproblem(vinst, modes, plan, pool);
    double welfare = sol.objective - setup_cost_of(vinst, plan);
    RebalanceResult reb = solve_rebalance(vinst, sol.imbalance);
    std::optional<Cut> cut =
        emit_benders_cut(vinst, modes, plan, sol, reb, pool);
    if (cut) {
      cut->iteration = iterations;
      cuts.push_back(std::move(*cut));
    }
    bool better = !have_inc || welfare > inc_welfare + 1e-12 * scale();
    bool tie = have_inc &&
               std::abs(welfare - inc_welfare) <= 1e-12 * scale() &&
               plan.levels < inc_plan.levels;
    if (better || tie) {
      inc_welfare = std::max(have_inc ? inc_welfare : welfare, welfare);
      inc_plan = plan;
      inc_sol = std::move(sol);
      inc_reb = std::move(reb);
      if (better) report.incumbent_seconds = seconds_since(start);
      have_inc = true;
    }
    certified.insert(plan.levels);
    return welfare;
  }
};

void fill_certified_flows(CertifiedSearch& s) {
  const int E = s.vinst.num_edges();
  s.report.edge_passenger_flow.assign(E, 0.0);
  s.report.edge_rebalance_flow.assign(E, 0.0);
  s.report.mode_rates.assign(s.modes.menus.size(), {});
  for (size_t ti = 0; ti < s.modes.menus.size(); ++ti) {
    s.report.mode_rates[ti].assign(
        s.vinst.num_types(),
        std::vector<double>(s.modes.menus[ti].modes.size(), 0.0));
  }
  if (!s.have_inc) return;
  s.report.edge_rebalance_flow = s.inc_reb.flows;
  for (size_t ti = 0; ti < s.modes.menus.size(); ++ti) {
    for (int ty = 0; ty < s.vinst.num_types(); ++ty) {
      for (size_t mi = 0; mi < s.modes.menus[ti].modes.size(); ++mi) {
        double flow = s.inc_sol.y[ti][ty][mi];
        if (flow <= 0) continue;
        s.report.mode_rates[ti][ty][mi] = flow;
        for (const Leg& leg : s.modes.menus[ti].modes[mi].legs) {
          if (leg.transit) s.report.edge_passenger_flow[leg.edge] += flow;
        }
      }
    }
  }
}

SolveReport run_certified(const ValidatedInstance& vinst, const ModeSet& modes,
                          const SolveLimits& limits, const FrequencyPlan* warm,
                          std::chrono::steady_clock::time_point start) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  CertifiedSearch s(vinst, modes, limits, start);
  s.value_cap = assignment_value_cap(vinst, modes);
  s.inc_plan.levels.assign(L, 0);
  s.report.plan.levels.assign(L, 0);
  s.cuts.push_back(service_ceiling_cut(vinst, modes));

  FrequencyPlan zeros;
  zeros.levels.assign(L, 0);
  s.certify(zeros);
  if (warm != nullptr &&
      static_cast<int>(warm->levels.size()) == L &&
      !s.certified.count(warm->levels)) {
    bool valid = true;
    for (int lvl : warm->levels) {
      if (lvl < 0 || lvl > F) valid = false;
    }
    if (valid &&
        fleet_cost_of(vinst, *warm) <=
            vinst.inst.params.fleet_budget + 1e-9) {
      s.certify(*warm);
    }
  }

  double upper = s.value_cap;
  double final_bound = upper;
  bool limit_hit = false;
  bool closed = false;
  int stall = 0;
  bool split_active = true;
  int split_stall = 0;
  int prev_added = 0;
  double prev_upper = upper;
  try {
  for (int round = 0; round < kPhase1Rounds; ++round) {
    if (s.out_of_time()) {
      s.report.status = SolveStatus::kTimeLimit;
      limit_hit = true;
      break;
    }
    if (s.out_of_iterations()) {
      s.report.status = SolveStatus::kIterationLimit;
      limit_hit = true;
      break;
    }
    ++s.iterations;
    auto t0 = std::chrono::steady_clock::now();
    MasterSolution ms = solve_master_relaxation(vinst, s.cuts, s.value_cap);
    if (!ms.feasible) {
      throw SolverError("planning relaxation infeasible");
    }
    upper = std::min(upper, ms.objective);
    if (prev_added > 0) {
      if (prev_upper - upper < 1e-7 * (1 + std::abs(prev_upper))) {
        ++split_stall;
      } else {
        split_stall = 0;
      }
      if (split_stall >= 2) split_active = false;
    }
    prev_upper = upper;

    int added = 0;
    if (split_active && static_cast<int>(s.cuts.size()) < kCutPoolCap) {
      std::vector<std::pair<double, int>> frac_cols;
      for (int j = 0; j < L * F; ++j) {
        if (ms.z[j] <= kIntegralityTol || ms.z[j] >= 1 - kIntegralityTol) {
          continue;
        }
        frac_cols.push_back({std::abs(ms.z[j] - 0.5), j});
      }
      std::sort(frac_cols.begin(), frac_cols.end());
      if (static_cast<int>(frac_cols.size()) > kSplitCutsPerRound) {
        frac_cols.resize(kSplitCutsPerRound);
      }
      for (const auto& [dist, j] : frac_cols) {
        std::optional<LiftProjectCut> lpc =
            generate_lift_project_cut(vinst, s.cuts, s.value_cap, ms, j);
        if (lpc) {
          lpc->cut.iteration = s.iterations;
          s.cuts.push_back(lpc->cut);
          ++added;
        }
      }
    }
    prev_added = added;

    FrequencyPlan cand = round_repair(vinst, ms.z);
    bool fresh = !s.certified.count(cand.levels);
    if (fresh) s.certify(cand);
    s.report.trace.push_back({s.iterations, upper,
                              s.have_inc ? s.inc_welfare : 0.0,
                              added + (fresh ? 1 : 0),
                              seconds_since(t0)});
    if (s.have_inc &&
        upper - s.inc_welfare <= limits.gap_target * s.scale()) {
      closed = true;
      break;
    }
    if (!fresh && added == 0) {
      ++stall;
    } else {
      stall = 0;
    }
    if (stall >= 2) break;
  }

  final_bound = upper;
  if (!limit_hit && !closed) {
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long seq = 0;
    open.push({upper, seq++, std::vector<int>(L, 0), std::vector<int>(L, F)});
    double best_open_bound = upper;
    bool emptied = true;
    while (!open.empty()) {
      Node node = open.top();
      best_open_bound = std::min(best_open_bound, node.priority);
      if (s.have_inc &&
          best_open_bound - s.inc_welfare <=
              limits.gap_target * s.scale()) {
        emptied = false;
        break;
      }
      open.pop();
      if (s.out_of_time()) {
        s.report.status = SolveStatus::kTimeLimit;
        limit_hit = true;
        emptied = false;
        break;
      }
      if (s.out_of_iterations()) {
        s.report.status = SolveStatus::kIterationLimit;
        limit_hit = true;
        emptied = false;
        break;
      }
      ++s.iterations;

      for (int refine = 0; refine < kNodeRefineRounds; ++refine) {
        if (s.out_of_time()) {
          s.report.status = SolveStatus::kTimeLimit;
          limit_hit = true;
          break;
        }
        MasterSolution ms =
            solve_master_relaxation(vinst, s.cuts, s.value_cap, &node.lo,
                                    &node.hi);
        if (!ms.feasible) break;
        double bound = std::min(node.priority, ms.objective);
        node.priority = bound;
        if (s.have_inc && bound <= s.inc_welfare + 1e-9 * s.scale()) break;

        bool integral = true;
        int branch_line = -1;
        double branch_score = 2.0;
        double branch_level = 0;
        for (int l = 0; l < L; ++l) {
          double level = 0;
          bool line_integral = true;
          for (int f = 1; f <= F; ++f) {
            double zv = ms.z[l * F + (f - 1)];
            level += zv;
            if (zv > kIntegralityTol && zv < 1 - kIntegralityTol) {
              line_integral = false;
            }
          }
          if (!line_integral) {
            integral = false;
            double fracpart = level - std::floor(level);
            double score = std::abs(fracpart - 0.5);
            if (score < branch_score - 1e-12) {
              branch_score = score;
              branch_line = l;
              branch_level = level;
            }
          }
        }

        if (integral) {
          FrequencyPlan plan = plan_from_indicators(vinst, ms.z);
          if (!s.certified.count(plan.levels)) {
            s.certify(plan);
            s.report.trace.push_back({s.iterations, bound,
                                      s.have_inc ? s.inc_welfare : 0.0, 1,
                                      0.0});
            continue;
          }
          break;
        }

        FrequencyPlan cand = round_repair(vinst, ms.z);
        if (!s.certified.count(cand.levels)) {
          s.certify(cand);
          s.report.trace.push_back({s.iterations, bound,
                                    s.have_inc ? s.inc_welfare : 0.0, 1,
                                    0.0});
          continue;
        }

        int k = static_cast<int>(std::floor(branch_level)) + 1;
        k = std::max(k, node.lo[branch_line] + 1);
        k = std::min(k, node.hi[branch_line]);
        Node up = node;
        up.priority = bound;
        up.seq = seq++;
        up.lo[branch_line] = k;
        Node down = node;
        down.priority = bound;
        down.seq = seq++;
        down.hi[branch_line] = k - 1;
        open.push(std::move(up));
        open.push(std::move(down));
        break;
      }
      if (limit_hit) break;
    }
    if (emptied && !limit_hit) {
      final_bound = s.have_inc ? s.inc_welfare : 0.0;
    } else {
      final_bound = std::max(s.have_inc ? s.inc_welfare : 0.0,
                             best_open_bound);
    }
  } else if (closed) {
    final_bound = upper;
  }
  } catch (const LPTimeout&) {
    s.report.status = SolveStatus::kTimeLimit;
    final_bound = std::min(final_bound, upper);
  } catch (const SolverError&) {
    s.report.status = SolveStatus::kIterationLimit;
    final_bound = std::min(final_bound, upper);
    log::error("certified search degraded: " +
               std::string("a relaxation solve failed, keeping the "
                           "incumbent and the weakest proven bound"));
  }

  s.report.plan = s.inc_plan;
  s.report.welfare = s.have_inc ? s.inc_welfare : 0.0;
  s.report.bound = std::max(final_bound, s.report.welfare);
  s.report.nodes = s.iterations;
  fill_certified_flows(s);
  s.report.gap = std::max(0.0, s.report.bound - s.report.welfare) /
                 std::max(1.0, std::abs(s.report.welfare));
  s.report.runtime_seconds = seconds_since(start);
  if (log::enabled(log::Level::kDebug)) {
    log::debug("decomposition: welfare=" + std::to_string(s.report.welfare) +
               " bound=" + std::to_string(s.report.bound) +
               " iterations=" + std::to_string(s.iterations) +
               " cuts=" + std::to_string(s.cuts.size()));
  }
  return s.report;
}

// One scored candidate design on the large-instance path.
struct PlanScore {
  bool ok = false;
  double welfare = -kInfinity;
  FGKResult fgk;
  RebalanceResult reb;
};

PlanScore empty_score(const ValidatedInstance& vinst, const ModeSet& modes,
                      const FrequencyPlan& plan);

PlanScore score_design(const ValidatedInstance& vinst, const ModeSet& modes,
                       const FrequencyPlan& plan, double epsilon) {
  PlanScore out;
  out.fgk = solve_choice_fgk(vinst, modes, plan, epsilon);
  std::vector<double> imbalance(vinst.inst.num_vertices + 1, 0.0);
  for (size_t ti = 0; ti < modes.menus.size(); ++ti) {
    for (int ty = 0; ty < vinst.num_types(); ++ty) {
      for (size_t mi = 0; mi < modes.menus[ti].modes.size(); ++mi) {
        double amount = out.fgk.y[ti][ty][mi];
        if (amount > 0) {
          add_mod_imbalance(vinst, modes.menus[ti].modes[mi], amount,
                            imbalance);
        }
      }
    }
  }
  out.reb = solve_rebalance(vinst, imbalance);
  if (!out.reb.feasible) return out;
  out.ok = true;
  out.welfare =
      out.fgk.lower_bound - out.reb.cost - setup_cost_of(vinst, plan);
  if (out.welfare < -setup_cost_of(vinst, plan)) {
    // Serving nobody dominates an assignment whose rebalancing bill
    // exceeds the value it delivers, so fall back to the idle design.
    FGKResult guide = out.fgk;
    out = empty_score(vinst, modes, plan);
    out.fgk.edge_length = guide.edge_length;
  }
  return out;
}

PlanScore empty_score(const ValidatedInstance& vinst, const ModeSet& modes,
                      const FrequencyPlan& plan) {
  PlanScore out;
  out.ok = true;
  out.welfare = -setup_cost_of(vinst, plan);
  out.fgk.y.assign(modes.menus.size(), {});
  for (size_t ti = 0; ti < modes.menus.size(); ++ti) {
    out.fgk.y[ti].assign(vinst.num_types(),
                         std::vector<double>(modes.menus[ti].modes.size(),
                                             0.0));
  }
  out.fgk.edge_length.assign(vinst.num_edges(), 0.0);
  out.reb.feasible = true;
  out.reb.flows.assign(vinst.num_edges(), 0.0);
  return out;
}

SolveReport run_heuristic(const ValidatedInstance& vinst, const ModeSet& modes,
                          const SolveLimits& limits, const FrequencyPlan* warm,
                          std::chrono::steady_clock::time_point start) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  const double budget = vinst.inst.params.fleet_budget;
  SolveReport report;
  report.status = SolveStatus::kIterationLimit;

  std::map<std::vector<int>, double> seen;
  long evals = 0;
  auto evaluate = [&](const FrequencyPlan& plan) {
    ++evals;
    PlanScore score;
    try {
      score = score_design(vinst, modes, plan, kSearchEpsilon);
    } catch (const SolverError&) {
      score.ok = false;
    }
    seen[plan.levels] = score.ok ? score.welfare : -kInfinity;
    return score;
  };

  FrequencyPlan plan;
  plan.levels.assign(L, 0);
  PlanScore best = evaluate(plan);
  if (!best.ok) best = empty_score(vinst, modes, plan);
  FrequencyPlan best_plan = plan;
  report.incumbent_seconds = seconds_since(start);

  if (warm != nullptr && static_cast<int>(warm->levels.size()) == L) {
    FrequencyPlan w = *warm;
    for (int& lvl : w.levels) lvl = std::min(std::max(lvl, 0), F);
    int guard = L * F + 1;
    while (fleet_cost_of(vinst, w) > budget + 1e-9 && guard-- > 0) {
      int deepest = 0;
      for (int l = 1; l < L; ++l) {
        if (w.levels[l] > w.levels[deepest]) deepest = l;
      }
      if (w.levels[deepest] == 0) break;
      --w.levels[deepest];
    }
    if (!seen.count(w.levels)) {
      PlanScore ws = evaluate(w);
      if (ws.ok && ws.welfare > best.welfare) {
        best = std::move(ws);
        best_plan = w;
        report.incumbent_seconds = seconds_since(start);
      }
    }
  }

  report.trace.push_back({0, 0.0, best.welfare, 0, 0.0});
  const double improve_tol = 1e-7;
  for (int round = 1; round <= L * F; ++round) {
    if (limits.time_limit > 0 &&
        seconds_since(start) > limits.time_limit) {
      report.status = SolveStatus::kTimeLimit;
      break;
    }
    if (limits.max_iterations > 0 && evals >= limits.max_iterations) break;

    // Rank closed-capacity pressure: lines whose edges carry high
    // congestion lengths are the ones more service can still help.
    std::vector<std::pair<double, int>> ranked;
    for (int l = 0; l < L; ++l) {
      if (best_plan.levels[l] >= F) continue;
      if (fleet_cost_of(vinst, best_plan) +
              vinst.inst.lines[l].cycle_time >
          budget + 1e-9) {
        continue;
      }
      double pressure = 0;
      for (int e : vinst.inst.lines[l].edges) {
        pressure += best.fgk.edge_length[e];
      }
      ranked.push_back({-pressure, l});
    }
    std::sort(ranked.begin(), ranked.end());
    if (ranked.size() > 6) ranked.resize(6);

    int taken_line = -1;
    PlanScore taken;
    for (const auto& [neg_pressure, l] : ranked) {
      FrequencyPlan next = best_plan;
      ++next.levels[l];
      if (seen.count(next.levels)) continue;
      PlanScore score = evaluate(next);
      if (score.ok &&
          score.welfare >
              best.welfare + improve_tol * (1 + std::abs(best.welfare))) {
        if (taken_line < 0 || score.welfare > taken.welfare) {
          taken_line = l;
          taken = std::move(score);
        }
      }
    }
    if (taken_line < 0) break;
    ++best_plan.levels[taken_line];
    best = std::move(taken);
    report.incumbent_seconds = seconds_since(start);
    report.trace.push_back({round, 0.0, best.welfare, 0, 0.0});
  }

  double value_cap = assignment_value_cap(vinst, modes);
  double relax_bound = value_cap;
  try {
    MasterSolution relax = solve_master_relaxation(
        vinst, {service_ceiling_cut(vinst, modes)}, value_cap);
    if (relax.feasible) relax_bound = std::min(relax_bound, relax.objective);
  } catch (const SolverError&) {
  }
  report.plan = best_plan;
  report.welfare = best.welfare;
  report.bound = std::max(relax_bound, report.welfare);
  for (IterationRecord& rec : report.trace) rec.bound = report.bound;
  report.nodes = evals;
  report.gap = std::max(0.0, report.bound - report.welfare) /
               std::max(1.0, std::abs(report.welfare));
  if (report.gap <= limits.gap_target) report.status = SolveStatus::kOptimal;

  const int E = vinst.num_edges();
  report.edge_passenger_flow.assign(E, 0.0);
  report.edge_rebalance_flow = best.reb.flows;
  report.edge_rebalance_flow.resize(E, 0.0);
  report.mode_rates = best.fgk.y;
  for (size_t ti = 0; ti < modes.menus.size(); ++ti) {
    for (int ty = 0; ty < vinst.num_types(); ++ty) {
      for (size_t mi = 0; mi < modes.menus[ti].modes.size(); ++mi) {
        double flow = best.fgk.y[ti][ty][mi];
        if (flow <= 0) continue;
        for (const Leg& leg : modes.menus[ti].modes[mi].legs) {
          if (leg.transit) report.edge_passenger_flow[leg.edge] += flow;
        }
      }
    }
  }
  report.runtime_seconds = seconds_since(start);
  if (log::enabled(log::Level::kInfo)) {
    log::info("large design solved by local search: welfare=" +
              std::to_string(report.welfare) +
              " evaluations=" + std::to_string(evals));
  }
  return report;
}

}  // namespace

SolveReport run_decomposition(const ValidatedInstance& vinst,
                              const ModeSet& modes, const SolveLimits& limits,
                              const FrequencyPlan* warm) {
  auto start = std::chrono::steady_clock::now();
  long assignment_cols = 0;
  for (const ModeMenu& menu : modes.menus) {
    assignment_cols +=
        static_cast<long>(vinst.num_types()) * menu.modes.size();
  }
  bool large = vinst.num_lines() * vinst.max_frequency() > 120 ||
               assignment_cols > 2500;
  if (large) return run_heuristic(vinst, modes, limits, warm, start);
  return run_certified(vinst, modes, limits, warm, start);
}

GapDemo integrality_gap_demo(int max_frequency) {
  GapDemo demo;
  demo.max_frequency = max_frequency;
  ValidatedInstance vinst = validate(make_two_vertex_gap(max_frequency));
  ModeSet modes = enumerate_modes(vinst);
  MonolithicLP root = build_monolithic_lp(vinst, modes);
  LPSolution relax = solve_lp(root.lp);
  if (relax.status != LPStatus::kOptimal) {
    throw SolverError("relaxation solve failed on the gap family");
  }
  demo.relaxed = relax.objective;
  SolveReport exact = solve_exact(vinst, modes);
  demo.integral = exact.welfare;
  demo.ratio = demo.relaxed / demo.integral;
  return demo;
}

}  // namespace transitmarket
