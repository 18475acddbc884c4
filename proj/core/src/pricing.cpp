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

#include "transitmarket/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "transitmarket/types.hpp"

namespace transitmarket {

namespace {

double mode_trip_price(const ValidatedInstance& vinst, const HybridMode& mode,
                       const PriceSystem& prices) {
  double p = 0;
  for (const Leg& leg : mode.legs) {
    const Edge& edge = vinst.inst.edges[leg.edge];
    if (leg.transit) {
      p += prices.edge_price[leg.edge];
    } else {
      p += prices.station_potential[edge.to] -
           prices.station_potential[edge.from];
    }
  }
  return p;
}

double setup_bill(const ValidatedInstance& vinst, const FrequencyPlan& plan) {
  double total = 0;
  for (size_t l = 0; l < plan.levels.size(); ++l) {
    total += vinst.inst.lines[l].setup_cost * plan.levels[l];
  }
  return total;
}

}  // namespace

PriceSystem assemble_prices(const ValidatedInstance& vinst,
                            const ModeSet& modes, const FrequencyPlan& plan,
                            const ChoiceSolution& sol,
                            const std::vector<RebalanceCut>& pool) {
  PriceSystem ps;
  ps.edge_price = sol.edge_price;
  ps.station_potential.assign(vinst.inst.num_vertices + 1, 0.0);
  for (size_t k = 0; k < pool.size() && k < sol.cut_dual.size(); ++k) {
    double weight = sol.cut_dual[k];
    if (weight == 0.0) continue;
    for (size_t v = 0; v < pool[k].gamma.size(); ++v) {
      ps.station_potential[v] += weight * pool[k].gamma[v];
    }
  }
  ps.rebalance_cost = sol.rebalance_cost;

  double served = 0;
  for (const auto& per_type : sol.y) {
    for (const auto& per_mode : per_type) {
      for (double rate : per_mode) served += rate;
    }
  }
  ps.access_fee = served > 1e-12 ? setup_bill(vinst, plan) / served : 0.0;

  ps.quotes.resize(modes.menus.size());
  for (size_t ti = 0; ti < modes.menus.size(); ++ti) {
    const ModeMenu& menu = modes.menus[ti];
    ps.quotes[ti].resize(sol.y[ti].size());
    for (size_t ty = 0; ty < sol.y[ti].size(); ++ty) {
      ps.quotes[ti][ty].resize(menu.modes.size());
      for (size_t mi = 0; mi < menu.modes.size(); ++mi) {
        const VariantChoice& vc = sol.variant[ti][ty][mi];
        ModeQuote& q = ps.quotes[ti][ty][mi];
        q.open = vc.open;
        if (!vc.open) continue;
        q.value = vc.value - vc.cost;
        q.price = mode_trip_price(vinst, menu.modes[mi], ps) + ps.access_fee;
        q.rate = sol.y[ti][ty][mi];
      }
    }
  }
  return ps;
}

PriceSystem price_design(const ValidatedInstance& vinst, const ModeSet& modes,
                         const FrequencyPlan& plan) {
  std::vector<RebalanceCut> pool;
  ChoiceSolution sol = solve_subproblem(vinst, modes, plan, pool);
  return assemble_prices(vinst, modes, plan, sol, pool);
}

EquilibriumCheck check_equilibrium(const ValidatedInstance& vinst,
                                   const ModeSet& modes,
                                   const FrequencyPlan& plan,
                                   const PriceSystem& prices, double tol) {
  EquilibriumCheck out;
  auto flag = [&out](double violation, const std::string& what) {
    out.ok = false;
    out.worst = std::max(out.worst, violation);
    out.issues.push_back(what);
  };

  // Honesty: every posted price equals the published edge prices plus the
  // potential rise plus the access fee.
  for (size_t ti = 0; ti < prices.quotes.size(); ++ti) {
    const ModeMenu& menu = modes.menus[ti];
    for (size_t ty = 0; ty < prices.quotes[ti].size(); ++ty) {
      for (size_t mi = 0; mi < prices.quotes[ti][ty].size(); ++mi) {
        const ModeQuote& q = prices.quotes[ti][ty][mi];
        if (!q.open) continue;
        double parts = mode_trip_price(vinst, menu.modes[mi], prices) +
                       prices.access_fee;
        double drift = std::abs(q.price - parts);
        if (drift > tol * (1.0 + std::abs(parts))) {
          flag(drift, "trip " + std::to_string(ti) + " type " +
                          std::to_string(ty) + " mode " + std::to_string(mi) +
                          " posts " + std::to_string(q.price) +
                          " against parts totalling " + std::to_string(parts));
        }
      }
    }
  }

  // Capacity: no transit edge runs over, and a positive congestion price
  // only appears where the edge is full.
  std::vector<double> load(vinst.num_edges(), 0.0);
  double served = 0;
  for (size_t ti = 0; ti < prices.quotes.size(); ++ti) {
    const ModeMenu& menu = modes.menus[ti];
    for (const auto& per_mode : prices.quotes[ti]) {
      for (size_t mi = 0; mi < per_mode.size(); ++mi) {
        const ModeQuote& q = per_mode[mi];
        if (!q.open || q.rate <= 0) continue;
        served += q.rate;
        for (const Leg& leg : menu.modes[mi].legs) {
          if (leg.transit) load[leg.edge] += q.rate;
        }
      }
    }
  }
  for (int e = 0; e < vinst.num_edges(); ++e) {
    if (vinst.lines_on_edge[e].empty()) continue;
    double cap = 0;
    for (int line : vinst.lines_on_edge[e]) {
      cap += vinst.inst.lines[line].capacity_per_level * plan.levels[line];
    }
    double slack = cap - load[e];
    double span = tol * (1.0 + cap);
    if (slack < -span) {
      flag(-slack, "edge " + std::to_string(e) + " carries " +
                       std::to_string(load[e]) + " over capacity " +
                       std::to_string(cap));
    }
    if (prices.edge_price[e] > tol && slack > span) {
      flag(slack, "edge " + std::to_string(e) + " is priced at " +
                      std::to_string(prices.edge_price[e]) +
                      " but has unsold capacity " + std::to_string(slack));
    }
  }

  // Travelers: every bought mode delivers the group's best surplus, and
  // travelers only stay home when no mode beats it fee-free.
  for (size_t ti = 0; ti < prices.quotes.size(); ++ti) {
    for (size_t ty = 0; ty < prices.quotes[ti].size(); ++ty) {
      const auto& row = prices.quotes[ti][ty];
      if (row.empty()) continue;
      double rate_scale = vinst.typed_rate(static_cast<int>(ti),
                                           static_cast<int>(ty));
      double best = -kInfinity;
      for (const ModeQuote& q : row) {
        if (q.open) best = std::max(best, q.value - q.price);
      }
      double total = 0;
      for (size_t mi = 0; mi < row.size(); ++mi) {
        const ModeQuote& q = row[mi];
        if (!q.open) continue;
        total += q.rate;
        if (q.rate > tol * (1.0 + rate_scale)) {
          double regret = best - (q.value - q.price);
          if (regret > tol) {
            flag(regret, "trip " + std::to_string(ti) + " type " +
                             std::to_string(ty) + " mode " +
                             std::to_string(mi) + " is bought despite " +
                             std::to_string(regret) + " regret");
          }
        }
      }
      if (total < rate_scale - tol * (1.0 + rate_scale)) {
        double best_free = best + prices.access_fee;
        if (best_free > tol) {
          flag(best_free, "trip " + std::to_string(ti) + " type " +
                              std::to_string(ty) +
                              " leaves travelers home while surplus " +
                              std::to_string(best_free) + " is available");
        }
      }
    }
  }

  // Books: repositioning charges collected along on-demand legs equal the
  // repositioning bill, and access fees collected equal the setup bill.
  double mod_revenue = 0;
  for (size_t ti = 0; ti < prices.quotes.size(); ++ti) {
    const ModeMenu& menu = modes.menus[ti];
    for (const auto& per_mode : prices.quotes[ti]) {
      for (size_t mi = 0; mi < per_mode.size(); ++mi) {
        const ModeQuote& q = per_mode[mi];
        if (!q.open || q.rate <= 0) continue;
        for (const Leg& leg : menu.modes[mi].legs) {
          if (leg.transit) continue;
          const Edge& edge = vinst.inst.edges[leg.edge];
          mod_revenue += q.rate * (prices.station_potential[edge.to] -
                                   prices.station_potential[edge.from]);
        }
      }
    }
  }
  double reb_slip = std::abs(mod_revenue - prices.rebalance_cost);
  if (reb_slip > tol * (1.0 + std::abs(prices.rebalance_cost))) {
    flag(reb_slip, "repositioning charges " + std::to_string(mod_revenue) +
                       " do not match the repositioning bill " +
                       std::to_string(prices.rebalance_cost));
  }
  double bill = setup_bill(vinst, plan);
  if (served > tol) {
    double fee_slip = std::abs(prices.access_fee * served - bill);
    if (fee_slip > tol * (1.0 + bill)) {
      flag(fee_slip, "access fees collect " +
                         std::to_string(prices.access_fee * served) +
                         " against a setup bill of " + std::to_string(bill));
    }
  }
  return out;
}

std::vector<long> largest_remainder_counts(const std::vector<double>& weights,
                                           long total, unsigned long seed) {
  const size_t n = weights.size();
  std::vector<long> counts(n, 0);
  if (n == 0 || total <= 0) return counts;
  double sum = 0;
  for (double w : weights) sum += std::max(0.0, w);
  if (sum <= 0) {
    counts[0] = total;
    return counts;
  }
  std::vector<double> remainder(n, 0.0);
  long assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    double share = std::max(0.0, weights[i]) / sum * total;
    counts[i] = static_cast<long>(std::floor(share));
    remainder[i] = share - counts[i];
    assigned += counts[i];
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainder[a] > remainder[b];
  });
  for (long k = 0; k < total - assigned; ++k) {
    ++counts[order[k % n]];
  }
  return counts;
}

DiscreteLoads randomized_assignment(const ValidatedInstance& vinst,
                                    const PriceSystem& prices, long travelers,
                                    unsigned long seed) {
  DiscreteLoads out;
  out.riders.resize(prices.quotes.size());
  out.stay_home.resize(prices.quotes.size());

  std::vector<double> group_weight;
  for (size_t ti = 0; ti < prices.quotes.size(); ++ti) {
    for (size_t ty = 0; ty < prices.quotes[ti].size(); ++ty) {
      group_weight.push_back(vinst.typed_rate(static_cast<int>(ti),
                                              static_cast<int>(ty)));
    }
  }
  std::vector<long> group_counts =
      largest_remainder_counts(group_weight, travelers, seed);

  size_t g = 0;
  for (size_t ti = 0; ti < prices.quotes.size(); ++ti) {
    out.riders[ti].resize(prices.quotes[ti].size());
    out.stay_home[ti].resize(prices.quotes[ti].size(), 0);
    for (size_t ty = 0; ty < prices.quotes[ti].size(); ++ty, ++g) {
      const auto& row = prices.quotes[ti][ty];
      std::vector<double> weights;
      double assigned = 0;
      for (const ModeQuote& q : row) {
        double r = q.open ? std::max(0.0, q.rate) : 0.0;
        weights.push_back(r);
        assigned += r;
      }
      double rate_scale = vinst.typed_rate(static_cast<int>(ti),
                                           static_cast<int>(ty));
      weights.push_back(std::max(0.0, rate_scale - assigned));
      std::vector<long> counts = largest_remainder_counts(
          weights, group_counts[g], seed + 0x9e3779b97f4a7c15UL * (g + 1));
      out.riders[ti][ty].assign(counts.begin(), counts.end() - 1);
      out.stay_home[ti][ty] = counts.back();
    }
  }
  return out;
}

}  // namespace transitmarket
