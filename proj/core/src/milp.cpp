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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "transitmarket/log.hpp"
#include "transitmarket/types.hpp"

namespace transitmarket {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

MonolithicLP build_monolithic_lp(const ValidatedInstance& vinst,
                                 const ModeSet& modes,
                                 const FrequencyPlan* z_fixed) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  const int E = vinst.num_edges();
  MonolithicLP out;
  LinearProgram& lp = out.lp;
  lp.sense = Sense::kMaximize;

  out.z_begin = 0;
  for (int l = 0; l < L; ++l) {
    for (int f = 1; f <= F; ++f) {
      double lo = 0, hi = 1;
      if (z_fixed != nullptr) lo = hi = z_fixed->open(l, f) ? 1.0 : 0.0;
      lp.add_variable(lo, hi, -vinst.inst.lines[l].setup_cost);
    }
  }

  out.activation_begin = lp.num_cols();
  for (int e = 0; e < E; ++e) {
    for (const Bundle& b : vinst.bundle_families[e]) {
      size_t count = 1;
      for (size_t i = 0; i < b.lines.size(); ++i) count *= F;
      for (size_t psi = 0; psi < count; ++psi) lp.add_variable(0, 1, 0);
    }
  }

  std::vector<std::vector<std::vector<std::vector<int>>>> grids(
      modes.menus.size());
  for (size_t ti = 0; ti < modes.menus.size(); ++ti) {
    for (const HybridMode& mode : modes.menus[ti].modes) {
      grids[ti].push_back(
          level_grid(static_cast<int>(mode.lines.size()), F));
    }
  }

  out.x_begin = lp.num_cols();
  for (size_t ti = 0; ti < modes.menus.size(); ++ti) {
    const ModeMenu& menu = modes.menus[ti];
    const Trip& trip = vinst.inst.trips[ti];
    for (int ty = 0; ty < vinst.num_types(); ++ty) {
      for (size_t mi = 0; mi < menu.modes.size(); ++mi) {
        const HybridMode& mode = menu.modes[mi];
        const std::vector<std::vector<int>>& grid = grids[ti][mi];
        for (size_t vi = 0; vi < grid.size(); ++vi) {
          std::vector<int> full = expand_levels(mode, grid[vi], L);
          double value = mode_valuation(vinst, mode, ty, full, trip);
          double cost = mode_cost(vinst, mode, full);
          lp.add_variable(0, kInfinity, trip.rate * (value - cost));
          out.x_columns.push_back({static_cast<int>(ti), ty,
                                   static_cast<int>(mi),
                                   static_cast<int>(vi)});
        }
      }
    }
  }

  out.r_begin = lp.num_cols();
  for (int e = 0; e < E; ++e) {
    lp.add_variable(0, kInfinity, -vinst.inst.edges[e].rebalance_cost);
  }

  // Level ranking: opening a level requires the one below it.
  for (int l = 0; l < L; ++l) {
    for (int f = 2; f <= F; ++f) {
      int row = lp.add_row(Relation::kLessEqual, 0);
      lp.add_entry(row, out.z_col(l, f, F), 1.0);
      lp.add_entry(row, out.z_col(l, f - 1, F), -1.0);
    }
  }

  int budget_row = lp.add_row(Relation::kLessEqual, vinst.inst.params.fleet_budget);
  for (int l = 0; l < L; ++l) {
    for (int f = 1; f <= F; ++f) {
      lp.add_entry(budget_row, out.z_col(l, f, F), vinst.inst.lines[l].cycle_time);
    }
  }

  // Bundle activations: each one needs every member level open, and the
  // variants of one family are mutually exclusive.
  int act = out.activation_begin;
  for (int e = 0; e < E; ++e) {
    for (const Bundle& b : vinst.bundle_families[e]) {
      std::vector<std::vector<int>> grid =
          level_grid(static_cast<int>(b.lines.size()), F);
      int sum_row = lp.add_row(Relation::kLessEqual, 1.0);
      for (const std::vector<int>& psi : grid) {
        for (size_t i = 0; i < b.lines.size(); ++i) {
          int row = lp.add_row(Relation::kLessEqual, 0);
          lp.add_entry(row, act, 1.0);
          lp.add_entry(row, out.z_col(b.lines[i], psi[i], F), -1.0);
        }
        lp.add_entry(sum_row, act, 1.0);
        ++act;
      }
    }
  }

  // Demand rows per (trip, type), in type-share units.
  std::vector<std::vector<int>> demand_row(modes.menus.size());
  for (size_t ti = 0; ti < modes.menus.size(); ++ti) {
    demand_row[ti].resize(vinst.num_types());
    for (int ty = 0; ty < vinst.num_types(); ++ty) {
      demand_row[ti][ty] = lp.add_row(Relation::kLessEqual,
                                      vinst.inst.trips[ti].type_shares[ty]);
    }
  }

  // Capacity rows for edges that carry transit.
  std::vector<int> capacity_row(E, -1);
  for (int e = 0; e < E; ++e) {
    if (vinst.lines_on_edge[e].empty()) continue;
    int row = lp.add_row(Relation::kLessEqual, 0);
    capacity_row[e] = row;
    for (LineId l : vinst.lines_on_edge[e]) {
      for (int f = 1; f <= F; ++f) {
        lp.add_entry(row, out.z_col(l, f, F),
                     -vinst.inst.lines[l].capacity_per_level);
      }
    }
  }

  // Conservation rows per vertex, coupling rebalancing with the vehicle
  // surplus the routed passenger flows create.
  std::vector<int> conservation_row(vinst.inst.num_vertices + 1);
  for (int v = 1; v <= vinst.inst.num_vertices; ++v) {
    conservation_row[v] = lp.add_row(Relation::kEqual, 0);
  }
  for (int e = 0; e < E; ++e) {
    lp.add_entry(conservation_row[vinst.inst.edges[e].from], out.r_begin + e, 1.0);
    lp.add_entry(conservation_row[vinst.inst.edges[e].to], out.r_begin + e, -1.0);
  }

  // Per-column rows and entries for the routing columns: demand membership,
  // capacity usage, linkage to the variant's levels, and vehicle balance.
  for (size_t xi = 0; xi < out.x_columns.size(); ++xi) {
    const MonolithicLP::XColumn& xc = out.x_columns[xi];
    int col = out.x_begin + static_cast<int>(xi);
    const Trip& trip = vinst.inst.trips[xc.trip];
    const HybridMode& mode = modes.menus[xc.trip].modes[xc.mode];
    double rate = trip.rate;
    lp.add_entry(demand_row[xc.trip][xc.type], col, 1.0);

    const std::vector<int>& psi = grids[xc.trip][xc.mode][xc.variant];
    double share = trip.type_shares[xc.type];
    for (size_t i = 0; i < mode.lines.size(); ++i) {
      int row = lp.add_row(Relation::kLessEqual, 0);
      lp.add_entry(row, col, 1.0);
      lp.add_entry(row, out.z_col(mode.lines[i], psi[i], F), -share);
    }

    for (const Leg& leg : mode.legs) {
      const Edge& edge = vinst.inst.edges[leg.edge];
      if (leg.transit) {
        lp.add_entry(capacity_row[leg.edge], col, rate);
      } else {
        lp.add_entry(conservation_row[edge.from], col, rate);
        lp.add_entry(conservation_row[edge.to], col, -rate);
      }
    }
  }
  return out;
}

namespace {

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

void apply_interval(LinearProgram& lp, const MonolithicLP& layout, int L,
                    int F, const std::vector<int>& lo,
                    const std::vector<int>& hi) {
  for (int l = 0; l < L; ++l) {
    for (int f = 1; f <= F; ++f) {
      int col = layout.z_col(l, f, F);
      if (f <= lo[l]) {
        lp.lower[col] = lp.upper[col] = 1.0;
      } else if (f > hi[l]) {
        lp.lower[col] = lp.upper[col] = 0.0;
      } else {
        lp.lower[col] = 0.0;
        lp.upper[col] = 1.0;
      }
    }
  }
}

void extract_flows(const ValidatedInstance& vinst, const ModeSet& modes,
                   const MonolithicLP& layout, const LPSolution& sol,
                   SolveReport& report) {
  report.edge_passenger_flow.assign(vinst.num_edges(), 0.0);
  report.edge_rebalance_flow.assign(vinst.num_edges(), 0.0);
  for (int e = 0; e < vinst.num_edges(); ++e) {
    report.edge_rebalance_flow[e] = sol.x[layout.r_begin + e];
  }
  report.mode_rates.assign(modes.menus.size(), {});
  for (size_t ti = 0; ti < modes.menus.size(); ++ti) {
    report.mode_rates[ti].assign(
        vinst.num_types(),
        std::vector<double>(modes.menus[ti].modes.size(), 0.0));
  }
  for (size_t xi = 0; xi < layout.x_columns.size(); ++xi) {
    const MonolithicLP::XColumn& xc = layout.x_columns[xi];
    double flow = vinst.inst.trips[xc.trip].rate *
                  sol.x[layout.x_begin + static_cast<int>(xi)];
    if (flow <= 0) continue;
    report.mode_rates[xc.trip][xc.type][xc.mode] += flow;
    const HybridMode& mode = modes.menus[xc.trip].modes[xc.mode];
    for (const Leg& leg : mode.legs) {
      if (leg.transit) report.edge_passenger_flow[leg.edge] += flow;
    }
  }
}

}  // namespace

SolveReport solve_exact(const ValidatedInstance& vinst, const ModeSet& modes,
                        const SolveLimits& limits) {
  const int L = vinst.num_lines();
  const int F = vinst.max_frequency();
  auto start = std::chrono::steady_clock::now();
  MonolithicLP base = build_monolithic_lp(vinst, modes, nullptr);

  if (L * std::log(F + 1.0) > std::log(1e6)) {
    log::info("level search space exceeds 1e6 plans; expect a long solve");
  }

  SolveReport report;
  report.plan.levels.assign(L, 0);
  bool have_incumbent = false;
  double incumbent = -kInfinity;
  double inc_welfare = 0;
  FrequencyPlan inc_plan;
  inc_plan.levels.assign(L, 0);

  auto node_options = [&]() {
    SimplexOptions opts;
    if (limits.time_limit > 0) {
      opts.time_limit_seconds =
          std::max(0.05, limits.time_limit - seconds_since(start));
    }
    return opts;
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long seq = 0;
  open.push({kInfinity, seq++, std::vector<int>(L, 0), std::vector<int>(L, F)});

  auto scale = [&]() { return std::max(1.0, std::abs(incumbent)); };
  double best_open_bound = kInfinity;
  while (!open.empty()) {
    Node node = open.top();
    best_open_bound = node.priority;
    if (have_incumbent &&
        best_open_bound - incumbent <= limits.gap_target * scale()) {
      break;
    }
    open.pop();
    if (limits.max_iterations > 0 && report.nodes >= limits.max_iterations) {
      report.status = SolveStatus::kIterationLimit;
      break;
    }
    if (limits.time_limit > 0 && seconds_since(start) > limits.time_limit) {
      report.status = SolveStatus::kTimeLimit;
      break;
    }
    ++report.nodes;

    LinearProgram lp = base.lp;
    apply_interval(lp, base, L, F, node.lo, node.hi);
    LPSolution sol;
    try {
      sol = solve_lp(lp, node_options());
    } catch (const LPTimeout&) {
      report.status = SolveStatus::kTimeLimit;
      break;
    } catch (const SolverError&) {
      report.status = SolveStatus::kIterationLimit;
      break;
    }
    if (sol.status == LPStatus::kInfeasible) continue;
    if (sol.status != LPStatus::kOptimal) {
      throw SolverError("relaxation solve failed inside branch-and-bound");
    }
    double bound = sol.objective;
    report.trace.push_back({report.nodes,
                            std::min(best_open_bound, bound),
                            have_incumbent ? incumbent : 0.0, 0, 0.0});
    if (have_incumbent && bound <= incumbent + 1e-9 * scale()) continue;

    bool integral = true;
    int branch_line = -1;
    double branch_score = 2.0;
    double branch_level = 0;
    for (int l = 0; l < L; ++l) {
      double level = 0;
      bool line_integral = true;
      for (int f = 1; f <= F; ++f) {
        double z = sol.x[base.z_col(l, f, F)];
        level += z;
        if (z > 1e-6 && z < 1.0 - 1e-6) line_integral = false;
      }
      if (!line_integral) {
        integral = false;
        double frac = level - std::floor(level);
        double score = std::abs(frac - 0.5);
        if (score < branch_score - 1e-12) {
          branch_score = score;
          branch_line = l;
          branch_level = level;
        }
      }
    }

    if (integral) {
      FrequencyPlan plan;
      plan.levels.assign(L, 0);
      for (int l = 0; l < L; ++l) {
        double level = 0;
        for (int f = 1; f <= F; ++f) level += sol.x[base.z_col(l, f, F)];
        plan.levels[l] = static_cast<int>(std::lround(level));
      }
      bool better = !have_incumbent || bound > incumbent + 1e-12 * scale();
      bool tie = have_incumbent &&
                 std::abs(bound - incumbent) <= 1e-12 * scale() &&
                 plan.levels < inc_plan.levels;
      if (better || tie) {
        incumbent = std::max(incumbent, bound);
        inc_plan = plan;
        inc_welfare = bound;
        have_incumbent = true;
        if (better) report.incumbent_seconds = seconds_since(start);
        extract_flows(vinst, modes, base, sol, report);
      }
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
  }

  if (open.empty() && report.status == SolveStatus::kOptimal) {
    report.bound = incumbent;
  } else {
    report.bound = std::max(have_incumbent ? incumbent : -kInfinity,
                            best_open_bound);
  }
  report.plan = inc_plan;

  if (have_incumbent) {
    report.welfare = inc_welfare;
  } else {
    LinearProgram fixed = base.lp;
    apply_interval(fixed, base, L, F, inc_plan.levels, inc_plan.levels);
    try {
      LPSolution final_sol = solve_lp(fixed, node_options());
      if (final_sol.status != LPStatus::kOptimal) {
        throw SolverError("final plan evaluation failed");
      }
      report.welfare = final_sol.objective;
      report.bound = std::max(report.bound, report.welfare);
      extract_flows(vinst, modes, base, final_sol, report);
    } catch (const SolverError&) {
      report.edge_passenger_flow.assign(vinst.num_edges(), 0.0);
      report.edge_rebalance_flow.assign(vinst.num_edges(), 0.0);
      report.mode_rates.clear();
    }
    report.incumbent_seconds = seconds_since(start);
  }
  report.gap = std::max(0.0, report.bound - report.welfare) /
               std::max(1.0, std::abs(report.welfare));
  report.runtime_seconds = seconds_since(start);
  if (log::enabled(log::Level::kDebug)) {
    log::debug("exact solve: welfare=" + std::to_string(report.welfare) +
               " bound=" + std::to_string(report.bound) +
               " nodes=" + std::to_string(report.nodes));
  }
  return report;
}

}  // namespace transitmarket
