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

#include "transitmarket/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace transitmarket {

namespace {

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

void build_bundles(ValidatedInstance& out) {
  const int cap = out.inst.params.bundle_subset_cap;
  out.bundle_families.assign(out.num_edges(), {});
  for (EdgeId e = 0; e < out.num_edges(); ++e) {
    const auto& lines = out.lines_on_edge[e];
    const int k = static_cast<int>(lines.size());
    if (k == 0) continue;
    std::vector<Bundle> families;
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      Bundle b;
      b.edge = e;
      for (int i = 0; i < k; ++i) {
        if (mask & (1u << i)) b.lines.push_back(lines[i]);
      }
      families.push_back(std::move(b));
    }
    if (k > cap) {
      auto total_capacity = [&](const Bundle& b) {
        double s = 0;
        for (LineId l : b.lines) s += out.inst.lines[l].capacity_per_level;
        return s;
      };
      std::vector<Bundle> kept;
      for (int card = 1; card <= cap; ++card) {
        std::vector<Bundle> of_card;
        for (auto& b : families) {
          if (static_cast<int>(b.lines.size()) == card) of_card.push_back(b);
        }
        std::stable_sort(of_card.begin(), of_card.end(),
                         [&](const Bundle& a, const Bundle& b) {
                           double ca = total_capacity(a), cb = total_capacity(b);
                           if (ca != cb) return ca > cb;
                           return a.lines < b.lines;
                         });
        for (int i = 0; i < card && i < static_cast<int>(of_card.size()); ++i)
          kept.push_back(of_card[i]);
      }
      families = std::move(kept);
    }
    std::sort(families.begin(), families.end(), [](const Bundle& a, const Bundle& b) {
      if (a.lines.size() != b.lines.size()) return a.lines.size() < b.lines.size();
      return a.lines < b.lines;
    });
    out.bundle_families[e] = std::move(families);
  }
}

}  // namespace

long long ValidatedInstance::num_bundle_activations() const {
  long long total = 0;
  for (const auto& families : bundle_families) {
    for (const auto& b : families) {
      long long count = 1;
      for (size_t i = 0; i < b.lines.size(); ++i) count *= max_frequency();
      total += count;
    }
  }
  return total;
}

ValidatedInstance validate(Instance inst) {
  std::vector<std::string> issues;
  const int n = inst.num_vertices;
  if (n <= 0) issues.push_back("instance has no vertices");
  if (inst.params.max_frequency < 1) issues.push_back("maxFrequency must be at least 1");
  if (inst.params.fleet_budget < 0) issues.push_back("fleetBudget must be nonnegative");
  if (inst.params.max_transfers < 0) issues.push_back("maxTransfers must be nonnegative");
  if (inst.params.menu_cap < 1) issues.push_back("menuCap must be at least 1");
  if (inst.params.bundle_subset_cap < 1) issues.push_back("bundleSubsetCap must be at least 1");

  std::set<std::pair<VertexId, VertexId>> seen_pairs;
  for (size_t e = 0; e < inst.edges.size(); ++e) {
    Edge& edge = inst.edges[e];
    std::string tag = "edge " + std::to_string(e) + " (" + std::to_string(edge.from) + "->" +
                      std::to_string(edge.to) + ")";
    if (edge.from < 1 || edge.from > n || edge.to < 1 || edge.to > n)
      issues.push_back(tag + ": endpoint outside 1.." + std::to_string(n));
    if (edge.from == edge.to) issues.push_back(tag + ": self loop");
    if (edge.cost < 0) issues.push_back(tag + ": negative cost");
    if (edge.rebalance_cost < 0) issues.push_back(tag + ": negative rebalance cost");
    if (edge.length < 0) issues.push_back(tag + ": negative length");
    if (std::isnan(edge.rebalance_cost)) edge.rebalance_cost = edge.cost;
    if (std::isnan(edge.length)) edge.length = edge.cost;
    if (!seen_pairs.insert({edge.from, edge.to}).second)
      issues.push_back(tag + ": duplicate directed edge");
  }

  std::map<std::pair<VertexId, VertexId>, EdgeId> edge_index;
  for (size_t e = 0; e < inst.edges.size(); ++e)
    edge_index[{inst.edges[e].from, inst.edges[e].to}] = static_cast<EdgeId>(e);

  for (size_t l = 0; l < inst.lines.size(); ++l) {
    const TransitLine& line = inst.lines[l];
    std::string tag = "line " + (line.name.empty() ? std::to_string(l) : line.name);
    if (line.edges.empty()) issues.push_back(tag + ": empty edge sequence");
    if (line.capacity_per_level <= 0) issues.push_back(tag + ": capacity must be positive");
    if (line.cycle_time <= 0) issues.push_back(tag + ": vehicleTime must be positive");
    if (line.setup_cost < 0) issues.push_back(tag + ": negative setupCost");
    if (line.fare < 0) issues.push_back(tag + ": negative fare");
    std::set<VertexId> visited;
    VertexId prev_to = 0;
    for (size_t k = 0; k < line.edges.size(); ++k) {
      EdgeId e = line.edges[k];
      if (e < 0 || e >= static_cast<EdgeId>(inst.edges.size())) {
        issues.push_back(tag + ": references missing edge " + std::to_string(e));
        break;
      }
      const Edge& edge = inst.edges[e];
      if (k == 0) {
        visited.insert(edge.from);
      } else if (edge.from != prev_to) {
        issues.push_back(tag + ": edge sequence is not connected at position " +
                         std::to_string(k));
      }
      if (!visited.insert(edge.to).second)
        issues.push_back(tag + ": revisits vertex " + std::to_string(edge.to));
      prev_to = edge.to;
    }
  }

  const int num_types = static_cast<int>(inst.types.size());
  if (num_types == 0) issues.push_back("instance has no traveler types");
  for (const TravelerType& t : inst.types) {
    if (t.frequency_exponent != 1 && t.frequency_exponent != 2)
      issues.push_back("type " + t.name + ": frequencyExponent must be 1 or 2");
    if (!std::isfinite(t.frequency_weight) || !std::isfinite(t.length_weight))
      issues.push_back("type " + t.name + ": weights must be finite");
    if (t.frequency_weight < 0 || t.length_weight < 0)
      issues.push_back("type " + t.name + ": weights must be nonnegative");
  }

  for (size_t i = 0; i < inst.trips.size(); ++i) {
    const Trip& trip = inst.trips[i];
    std::string tag = "trip " + std::to_string(trip.from) + "->" + std::to_string(trip.to);
    if (trip.from < 1 || trip.from > n || trip.to < 1 || trip.to > n)
      issues.push_back(tag + ": endpoint outside 1.." + std::to_string(n));
    if (trip.from == trip.to) issues.push_back(tag + ": origin equals destination");
    if (trip.rate < 0) issues.push_back(tag + ": negative rate");
    if (static_cast<int>(trip.type_shares.size()) != num_types ||
        static_cast<int>(trip.base_values.size()) != num_types) {
      issues.push_back(tag + ": shares/baseValues must have one entry per traveler type");
      continue;
    }
    double sum = std::accumulate(trip.type_shares.begin(), trip.type_shares.end(), 0.0);
    if (std::fabs(sum - 1.0) > 1e-9) issues.push_back(tag + ": type shares sum to " +
                                                      std::to_string(sum) + ", expected 1");
    for (double s : trip.type_shares) {
      if (s < 0) issues.push_back(tag + ": negative type share");
    }
  }

  if (!issues.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& s : issues) msg += "\n  - " + s;
    throw UsageError(msg);
  }

  ValidatedInstance out;
  out.inst = std::move(inst);
  const Instance& ins = out.inst;

  out.lines_on_edge.assign(ins.edges.size(), {});
  for (size_t l = 0; l < ins.lines.size(); ++l) {
    for (EdgeId e : ins.lines[l].edges) out.lines_on_edge[e].push_back(static_cast<LineId>(l));
  }
  for (auto& v : out.lines_on_edge) std::sort(v.begin(), v.end());

  out.out_edges.assign(n + 1, {});
  out.in_edges.assign(n + 1, {});
  for (size_t e = 0; e < ins.edges.size(); ++e) {
    out.out_edges[ins.edges[e].from].push_back(static_cast<EdgeId>(e));
    out.in_edges[ins.edges[e].to].push_back(static_cast<EdgeId>(e));
  }
  out.edge_index = std::move(edge_index);

  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  for (const Edge& e : ins.edges) {
    int a = find_root(parent, e.from), b = find_root(parent, e.to);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  out.component.assign(n + 1, 0);
  for (int v = 1; v <= n; ++v) out.component[v] = find_root(parent, v);

  build_bundles(out);
  return out;
}

const std::vector<std::vector<Bundle>>& enumerate_bundles(const ValidatedInstance& vinst) {
  return vinst.bundle_families;
}

}  // namespace transitmarket
