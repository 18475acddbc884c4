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

#include "transitmarket/choice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "transitmarket/log.hpp"
#include "transitmarket/lp.hpp"

namespace transitmarket {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDualTol = 1e-9;
constexpr int kSurrogateRounds = 400;

// Net effect of a gamma vector on one traveler using the mode: each
// on-demand leg moves a vehicle from the leg tail to the leg head.
double mod_coefficient(const ValidatedInstance& vinst, const HybridMode& mode,
                       const std::vector<double>& gamma) {
  double coef = 0;
  for (const Leg& leg : mode.legs) {
    if (leg.transit) continue;
    const Edge& edge = vinst.inst.edges[leg.edge];
    coef += gamma[edge.to] - gamma[edge.from];
  }
  return coef;
}

struct ChoiceProgram {
  LinearProgram lp;
  // Column per (trip, type, open menu position), -1 when closed.
  std::vector<std::vector<std::vector<int>>> y_col;
  int phi_col = -1;
  std::vector<int> capacity_row;  // per edge, -1 when no line covers it
  std::vector<std::vector<int>> demand_row;
  std::vector<int> cut_row;
};

ChoiceProgram build_choice_program(
    const ValidatedInstance& vinst, const ModeSet& modes,
    const FrequencyPlan& plan, const std::vector<RebalanceCut>& pool,
    std::vector<std::vector<std::vector<VariantChoice>>>* variants) {
  const Instance& inst = vinst.inst;
  const int num_trips = static_cast<int>(inst.trips.size());
  const int num_types = vinst.num_types();

  ChoiceProgram prog;
  prog.lp.sense = Sense::kMaximize;
  prog.y_col.assign(num_trips, {});
  variants->assign(num_trips, {});

  for (int ti = 0; ti < num_trips; ++ti) {
    const ModeMenu& menu = modes.menus[ti];
    const int num_modes = static_cast<int>(menu.modes.size());
    prog.y_col[ti].assign(num_types, std::vector<int>(num_modes, -1));
    (*variants)[ti].assign(num_types, std::vector<VariantChoice>(num_modes));
    for (int ty = 0; ty < num_types; ++ty) {
      const double rate = vinst.typed_rate(ti, ty);
      for (int mi = 0; mi < num_modes; ++mi) {
        VariantChoice choice = best_open_variant(vinst, menu.modes[mi],
                                                 inst.trips[ti], ty,
                                                 plan.levels);
        (*variants)[ti][ty][mi] = choice;
        if (!choice.open) continue;
        prog.y_col[ti][ty][mi] = prog.lp.add_variable(
            0.0, rate, choice.value - choice.cost,
            "y_" + std::to_string(ti) + "_" + std::to_string(ty) + "_" +
                std::to_string(mi));
      }
    }
  }
  prog.phi_col = prog.lp.add_variable(-kInf, 0.0, 1.0, "phi");

  prog.capacity_row.assign(vinst.num_edges(), -1);
  for (int e = 0; e < vinst.num_edges(); ++e) {
    if (vinst.lines_on_edge[e].empty()) continue;
    double cap = 0;
    for (int line : vinst.lines_on_edge[e]) {
      cap += inst.lines[line].capacity_per_level * plan.levels[line];
    }
    prog.capacity_row[e] =
        prog.lp.add_row(Relation::kLessEqual, cap, "cap_" + std::to_string(e));
  }
  prog.demand_row.assign(num_trips, std::vector<int>(num_types, -1));
  for (int ti = 0; ti < num_trips; ++ti) {
    for (int ty = 0; ty < num_types; ++ty) {
      prog.demand_row[ti][ty] = prog.lp.add_row(
          Relation::kLessEqual, vinst.typed_rate(ti, ty),
          "dem_" + std::to_string(ti) + "_" + std::to_string(ty));
    }
  }
  for (int k = 0; k < static_cast<int>(pool.size()); ++k) {
    prog.cut_row.push_back(
        prog.lp.add_row(Relation::kLessEqual, 0.0, "reb_" + std::to_string(k)));
    if (!pool[k].from_ray) prog.lp.add_entry(prog.cut_row[k], prog.phi_col, 1.0);
  }

  for (int ti = 0; ti < num_trips; ++ti) {
    const ModeMenu& menu = modes.menus[ti];
    for (int ty = 0; ty < num_types; ++ty) {
      for (int mi = 0; mi < static_cast<int>(menu.modes.size()); ++mi) {
        const int col = prog.y_col[ti][ty][mi];
        if (col < 0) continue;
        const HybridMode& mode = menu.modes[mi];
        for (const Leg& leg : mode.legs) {
          if (!leg.transit) continue;
          prog.lp.add_entry(prog.capacity_row[leg.edge], col, 1.0);
        }
        prog.lp.add_entry(prog.demand_row[ti][ty], col, 1.0);
        for (int k = 0; k < static_cast<int>(pool.size()); ++k) {
          const double coef = mod_coefficient(vinst, mode, pool[k].gamma);
          if (std::abs(coef) > 1e-14) {
            prog.lp.add_entry(prog.cut_row[k], col, coef);
          }
        }
      }
    }
  }
  return prog;
}

}  // namespace

ChoiceSolution solve_choice_exact(const ValidatedInstance& vinst,
                                  const ModeSet& modes,
                                  const FrequencyPlan& plan,
                                  const std::vector<RebalanceCut>& pool) {
  const Instance& inst = vinst.inst;
  const int num_trips = static_cast<int>(inst.trips.size());
  const int num_types = vinst.num_types();

  ChoiceSolution sol;
  ChoiceProgram prog =
      build_choice_program(vinst, modes, plan, pool, &sol.variant);
  LPSolution lps = solve_lp(prog.lp);
  if (lps.status != LPStatus::kOptimal) {
    throw SolverError("assignment program did not solve to optimality");
  }

  sol.objective = lps.objective;
  sol.phi = lps.x[prog.phi_col];
  sol.y.assign(num_trips, {});
  sol.bound_dual.assign(num_trips, {});
  sol.demand_dual.assign(num_trips, std::vector<double>(num_types, 0.0));
  for (int ti = 0; ti < num_trips; ++ti) {
    const int num_modes = static_cast<int>(modes.menus[ti].modes.size());
    sol.y[ti].assign(num_types, std::vector<double>(num_modes, 0.0));
    sol.bound_dual[ti].assign(num_types, std::vector<double>(num_modes, 0.0));
    for (int ty = 0; ty < num_types; ++ty) {
      sol.demand_dual[ti][ty] =
          std::max(0.0, lps.duals[prog.demand_row[ti][ty]]);
      for (int mi = 0; mi < num_modes; ++mi) {
        const int col = prog.y_col[ti][ty][mi];
        if (col < 0) continue;
        sol.y[ti][ty][mi] = lps.x[col];
        sol.bound_dual[ti][ty][mi] = std::max(0.0, lps.reduced_costs[col]);
      }
    }
  }
  sol.edge_price.assign(vinst.num_edges(), 0.0);
  for (int e = 0; e < vinst.num_edges(); ++e) {
    if (prog.capacity_row[e] >= 0) {
      sol.edge_price[e] = std::max(0.0, lps.duals[prog.capacity_row[e]]);
    }
  }
  sol.cut_dual.assign(pool.size(), 0.0);
  for (int k = 0; k < static_cast<int>(pool.size()); ++k) {
    sol.cut_dual[k] = std::max(0.0, lps.duals[prog.cut_row[k]]);
  }

  sol.imbalance.assign(inst.num_vertices + 1, 0.0);
  for (int ti = 0; ti < num_trips; ++ti) {
    for (int ty = 0; ty < num_types; ++ty) {
      for (int mi = 0; mi < static_cast<int>(modes.menus[ti].modes.size());
           ++mi) {
        if (sol.y[ti][ty][mi] > 0) {
          add_mod_imbalance(vinst, modes.menus[ti].modes[mi],
                            sol.y[ti][ty][mi], sol.imbalance);
        }
      }
    }
  }
  return sol;
}

ChoiceSolution solve_subproblem(const ValidatedInstance& vinst,
                                const ModeSet& modes,
                                const FrequencyPlan& plan,
                                std::vector<RebalanceCut>& pool) {
  double scale = 1.0;
  for (int ti = 0; ti < static_cast<int>(vinst.inst.trips.size()); ++ti) {
    for (int ty = 0; ty < vinst.num_types(); ++ty) {
      scale += vinst.typed_rate(ti, ty) *
               std::abs(vinst.inst.trips[ti].base_values[ty]);
    }
  }

  for (int round = 0; round < kSurrogateRounds; ++round) {
    ChoiceSolution sol = solve_choice_exact(vinst, modes, plan, pool);
    RebalanceResult reb = solve_rebalance(vinst, sol.imbalance);
    if (!reb.feasible) {
      pool.push_back(RebalanceCut{true, reb.ray});
      continue;
    }
    if (sol.phi + reb.cost <= kDualTol * scale) {
      sol.objective += -reb.cost - sol.phi;
      sol.phi = -reb.cost;
      sol.rebalance_flows = reb.flows;
      sol.rebalance_dual = reb.potentials;
      sol.rebalance_cost = reb.cost;
      return sol;
    }
    pool.push_back(RebalanceCut{false, reb.potentials});
  }
  throw SolverError("repositioning surrogate failed to converge");
}

FGKResult solve_choice_fgk(const ValidatedInstance& vinst, const ModeSet& modes,
                           const FrequencyPlan& plan, double epsilon) {
  if (!(epsilon > 0) || epsilon > 0.5) {
    throw SolverError("approximation tolerance must lie in (0, 0.5]");
  }
  const Instance& inst = vinst.inst;
  const int num_trips = static_cast<int>(inst.trips.size());
  const int num_types = vinst.num_types();
  const double eps = epsilon / 2.0;

  FGKResult out;
  out.y.assign(num_trips, {});
  for (int ti = 0; ti < num_trips; ++ti) {
    out.y[ti].assign(num_types,
                     std::vector<double>(modes.menus[ti].modes.size(), 0.0));
  }
  out.edge_length.assign(vinst.num_edges(), 0.0);

  // Capacity edges carry a multiplicative length; every commodity owns one
  // virtual supply edge capped at its rate.
  std::vector<int> edge_slot(vinst.num_edges(), -1);
  std::vector<double> caps;
  for (int e = 0; e < vinst.num_edges(); ++e) {
    if (vinst.lines_on_edge[e].empty()) continue;
    double cap = 0;
    for (int line : vinst.lines_on_edge[e]) {
      cap += inst.lines[line].capacity_per_level * plan.levels[line];
    }
    edge_slot[e] = static_cast<int>(caps.size());
    caps.push_back(cap);
  }
  const int num_capacity_slots = static_cast<int>(caps.size());

  struct Route {
    int trip = 0;
    int type = 0;
    int mode = 0;
    double weight = 0;
    std::vector<int> slots;
  };
  struct Commodity {
    double rate = 0;
    int supply_slot = -1;
    std::vector<Route> routes;
  };
  std::vector<Commodity> commodities;
  double max_weight = 0;
  for (int ti = 0; ti < num_trips; ++ti) {
    const ModeMenu& menu = modes.menus[ti];
    for (int ty = 0; ty < num_types; ++ty) {
      Commodity com;
      com.rate = vinst.typed_rate(ti, ty);
      if (com.rate <= 0) continue;
      for (int mi = 0; mi < static_cast<int>(menu.modes.size()); ++mi) {
        VariantChoice choice = best_open_variant(vinst, menu.modes[mi],
                                                 inst.trips[ti], ty,
                                                 plan.levels);
        if (!choice.open) continue;
        const double weight = choice.value - choice.cost;
        if (weight <= 0) continue;
        Route route;
        route.trip = ti;
        route.type = ty;
        route.mode = mi;
        route.weight = weight;
        bool usable = true;
        for (const Leg& leg : menu.modes[mi].legs) {
          if (!leg.transit) continue;
          const int slot = edge_slot[leg.edge];
          if (slot < 0 || caps[slot] <= 0) usable = false;
          route.slots.push_back(slot);
        }
        if (!usable) continue;
        max_weight = std::max(max_weight, weight);
        com.routes.push_back(std::move(route));
      }
      if (com.routes.empty()) continue;
      com.supply_slot =
          num_capacity_slots + static_cast<int>(commodities.size());
      caps.push_back(com.rate);
      commodities.push_back(std::move(com));
    }
  }
  if (commodities.empty() || max_weight <= 0) return out;

  const double m_bar =
      std::max(2.0, static_cast<double>(inst.num_vertices) *
                        inst.num_vertices * num_types * vinst.num_lines() *
                        vinst.max_frequency());
  const double delta = eps / (m_bar * m_bar);
  const long num_phases = static_cast<long>(
      std::ceil(std::log((1.0 + eps) / delta) / std::log1p(eps)));
  const double flow_scale = std::log(1.0 / delta) / std::log1p(eps);

  std::vector<double> length(caps.size(), delta);
  std::vector<std::vector<double>> raw(commodities.size());
  for (int c = 0; c < static_cast<int>(commodities.size()); ++c) {
    raw[c].assign(commodities[c].routes.size(), 0.0);
  }

  long steps = 0;
  const long step_limit = 4'000'000;
  for (long phase = 0; phase < num_phases; ++phase) {
    const double threshold =
        std::min(1.0, delta * std::pow(1.0 + eps, static_cast<double>(phase)));
    for (int c = 0; c < static_cast<int>(commodities.size()); ++c) {
      Commodity& com = commodities[c];
      while (true) {
        int best = -1;
        double best_price = kInf;
        for (int ri = 0; ri < static_cast<int>(com.routes.size()); ++ri) {
          double price = length[com.supply_slot];
          for (int slot : com.routes[ri].slots) price += length[slot];
          price /= com.routes[ri].weight / max_weight;
          if (price < best_price - 1e-15) {
            best_price = price;
            best = ri;
          }
        }
        if (best < 0 || best_price >= threshold) break;
        double grain = caps[com.supply_slot];
        for (int slot : com.routes[best].slots) {
          grain = std::min(grain, caps[slot]);
        }
        raw[c][best] += grain;
        length[com.supply_slot] *= 1.0 + eps * grain / caps[com.supply_slot];
        for (int slot : com.routes[best].slots) {
          length[slot] *= 1.0 + eps * grain / caps[slot];
        }
        if (++steps > step_limit) {
          throw SolverError("approximation routing exceeded its step budget");
        }
      }
    }
  }

  // Scale to feasibility: divide by the phase count bound, then remove any
  // residual violation exactly.
  std::vector<double> load(caps.size(), 0.0);
  for (int c = 0; c < static_cast<int>(commodities.size()); ++c) {
    for (int ri = 0; ri < static_cast<int>(commodities[c].routes.size());
         ++ri) {
      raw[c][ri] /= flow_scale;
      load[commodities[c].supply_slot] += raw[c][ri];
      for (int slot : commodities[c].routes[ri].slots) {
        load[slot] += raw[c][ri];
      }
    }
  }
  double violation = 1.0;
  for (int s = 0; s < static_cast<int>(caps.size()); ++s) {
    if (caps[s] > 0) violation = std::max(violation, load[s] / caps[s]);
  }
  for (auto& flows : raw) {
    for (double& f : flows) f /= violation;
  }
  for (int s = 0; s < static_cast<int>(caps.size()); ++s) load[s] /= violation;

  // Greedy top-up: spend leftover capacity on the heaviest routes first.
  struct Ranked {
    double weight;
    int commodity;
    int route;
  };
  std::vector<Ranked> ranked;
  for (int c = 0; c < static_cast<int>(commodities.size()); ++c) {
    for (int ri = 0; ri < static_cast<int>(commodities[c].routes.size());
         ++ri) {
      ranked.push_back({commodities[c].routes[ri].weight, c, ri});
    }
  }
  std::stable_sort(
      ranked.begin(), ranked.end(),
      [](const Ranked& a, const Ranked& b) { return a.weight > b.weight; });
  for (const Ranked& r : ranked) {
    const Commodity& com = commodities[r.commodity];
    double headroom = caps[com.supply_slot] - load[com.supply_slot];
    for (int slot : com.routes[r.route].slots) {
      headroom = std::min(headroom, caps[slot] - load[slot]);
    }
    if (headroom <= 0) continue;
    raw[r.commodity][r.route] += headroom;
    load[com.supply_slot] += headroom;
    for (int slot : com.routes[r.route].slots) load[slot] += headroom;
  }

  for (int c = 0; c < static_cast<int>(commodities.size()); ++c) {
    const Commodity& com = commodities[c];
    for (int ri = 0; ri < static_cast<int>(com.routes.size()); ++ri) {
      const Route& route = com.routes[ri];
      out.y[route.trip][route.type][route.mode] += raw[c][ri];
      out.lower_bound += route.weight * raw[c][ri];
    }
  }
  for (int e = 0; e < vinst.num_edges(); ++e) {
    if (edge_slot[e] >= 0) out.edge_length[e] = length[edge_slot[e]];
  }
  return out;
}

std::optional<Cut> emit_benders_cut(const ValidatedInstance& vinst,
                                    const ModeSet& modes,
                                    const FrequencyPlan& plan,
                                    const ChoiceSolution& sol,
                                    const RebalanceResult& reb,
                                    const std::vector<RebalanceCut>& pool) {
  const Instance& inst = vinst.inst;
  const int max_f = vinst.max_frequency();
  const int lf = vinst.num_lines() * max_f;

  if (!reb.feasible) {
    double violation = 0;
    for (int v = 1; v <= inst.num_vertices; ++v) {
      violation += sol.imbalance[v] * reb.ray[v];
    }
    if (violation <= kDualTol) {
      log::info("dropping a degenerate planning cut");
      return std::nullopt;
    }
    Cut cut;
    cut.kind = Cut::Kind::kBendersFeasibility;
    cut.z_coef.assign(lf, 0.0);
    cut.rhs = -violation;
    return cut;
  }

  Cut cut;
  cut.kind = Cut::Kind::kBendersOptimality;
  cut.tau_coef = 1.0;
  cut.z_coef.assign(lf, 0.0);

  for (int e = 0; e < vinst.num_edges(); ++e) {
    const double price = sol.edge_price[e];
    if (price == 0) continue;
    for (int line : vinst.lines_on_edge[e]) {
      const double coef = price * inst.lines[line].capacity_per_level;
      for (int f = 1; f <= max_f; ++f) {
        cut.z_coef[line * max_f + (f - 1)] -= coef;
      }
    }
  }

  double constant = 0;
  const int num_trips = static_cast<int>(inst.trips.size());
  for (int ti = 0; ti < num_trips; ++ti) {
    const ModeMenu& menu = modes.menus[ti];
    const Trip& trip = inst.trips[ti];
    for (int ty = 0; ty < vinst.num_types(); ++ty) {
      const double rate = vinst.typed_rate(ti, ty);
      constant += sol.demand_dual[ti][ty] * rate;
      for (int mi = 0; mi < static_cast<int>(menu.modes.size()); ++mi) {
        constant += sol.bound_dual[ti][ty][mi] * rate;
      }
      for (int mi = 0; mi < static_cast<int>(menu.modes.size()); ++mi) {
        const HybridMode& mode = menu.modes[mi];
        if (mode.lines.empty()) continue;
        double transit_price = 0;
        for (const Leg& leg : mode.legs) {
          if (leg.transit) transit_price += sol.edge_price[leg.edge];
        }
        double cut_terms = 0;
        for (int k = 0; k < static_cast<int>(sol.cut_dual.size()); ++k) {
          if (sol.cut_dual[k] == 0) continue;
          cut_terms +=
              sol.cut_dual[k] * mod_coefficient(vinst, mode, pool[k].gamma);
        }
        const std::vector<std::vector<int>> grid =
            level_grid(static_cast<int>(mode.lines.size()), max_f);
        for (const std::vector<int>& levels : grid) {
          bool open_here = true;
          int first_closed = -1;
          for (int li = 0; li < static_cast<int>(mode.lines.size()); ++li) {
            if (levels[li] > plan.levels[mode.lines[li]]) {
              open_here = false;
              first_closed = li;
              break;
            }
          }
          if (open_here) continue;
          const std::vector<int> full =
              expand_levels(mode, levels, vinst.num_lines());
          const double value = mode_valuation(vinst, mode, ty, full, trip);
          const double cost = mode_cost(vinst, mode, full);
          const double deficit = (value - cost) - transit_price -
                                 sol.demand_dual[ti][ty] - cut_terms;
          if (deficit <= kDualTol) continue;
          const int slot =
              mode.lines[first_closed] * max_f + (levels[first_closed] - 1);
          cut.z_coef[slot] -= deficit * rate;
        }
      }
    }
  }
  cut.rhs = constant;
  return cut;
}

}  // namespace transitmarket
