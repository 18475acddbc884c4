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

#include "transitmarket/gen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

namespace transitmarket {

namespace {

// Uniform doubles derived from the raw engine stream; std distributions are
// avoided because their output is not pinned across standard libraries.
class Rand {
 public:
  explicit Rand(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
  }
  int below(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 rng_;
};

EdgeId add_edge(Instance& inst, VertexId from, VertexId to, double cost) {
  Edge e;
  e.from = from;
  e.to = to;
  e.cost = cost;
  inst.edges.push_back(e);
  return static_cast<EdgeId>(inst.edges.size() - 1);
}

}  // namespace

Instance make_fig1() {
  Instance inst;
  inst.name = "fig1";
  inst.num_vertices = 3;
  EdgeId e12 = add_edge(inst, 1, 2, 2.0);
  EdgeId e23 = add_edge(inst, 2, 3, 2.0);
  add_edge(inst, 3, 1, 1.5);

  TransitLine line_i;
  line_i.name = "I";
  line_i.edges = {e12, e23};
  line_i.capacity_per_level = 10.0;
  line_i.setup_cost = 2.0;
  line_i.cycle_time = 1.0;
  line_i.fare = 1.0;
  inst.lines.push_back(line_i);

  TransitLine line_ii;
  line_ii.name = "II";
  line_ii.edges = {e23};
  line_ii.capacity_per_level = 8.0;
  line_ii.setup_cost = 1.0;
  line_ii.cycle_time = 0.5;
  line_ii.fare = 0.5;
  inst.lines.push_back(line_ii);

  TravelerType value_type;
  value_type.name = "value";
  value_type.frequency_weight = 0.3;
  value_type.frequency_exponent = 1;
  value_type.length_weight = 0.2;
  inst.types.push_back(value_type);

  TravelerType qos_type;
  qos_type.name = "qos";
  qos_type.frequency_weight = 0.8;
  qos_type.frequency_exponent = 2;
  qos_type.length_weight = 0.5;
  inst.types.push_back(qos_type);

  Trip trip;
  trip.from = 1;
  trip.to = 3;
  trip.rate = 12.0;
  trip.type_shares = {0.5, 0.5};
  trip.base_values = {6.0, 9.0};
  inst.trips.push_back(trip);

  inst.params.max_frequency = 2;
  inst.params.fleet_budget = 2;
  inst.params.max_transfers = 1;
  inst.params.menu_cap = 3;
  inst.params.bundle_subset_cap = 4;
  return inst;
}

Instance make_two_vertex_gap(int max_frequency) {
  if (max_frequency < 2) throw UsageError("two vertex family needs maxFrequency >= 2");
  Instance inst;
  inst.name = "two-vertex-gap-" + std::to_string(max_frequency);
  inst.num_vertices = 2;
  EdgeId e12 = add_edge(inst, 1, 2, 100.0);
  add_edge(inst, 2, 1, 100.0);

  TransitLine line;
  line.name = "I";
  line.edges = {e12};
  line.capacity_per_level = 5.0;
  line.setup_cost = 0.1;
  line.cycle_time = 1.0;
  line.fare = 0.1;
  inst.lines.push_back(line);

  TravelerType type;
  type.name = "linear";
  type.frequency_weight = 1.0;
  type.frequency_exponent = 1;
  type.length_weight = 0.0;
  inst.types.push_back(type);

  Trip trip;
  trip.from = 1;
  trip.to = 2;
  trip.rate = 50.0;
  trip.type_shares = {1.0};
  trip.base_values = {1.0};
  inst.trips.push_back(trip);

  inst.params.max_frequency = max_frequency;
  inst.params.fleet_budget = 2;
  inst.params.max_transfers = 1;
  inst.params.menu_cap = 5;
  inst.params.bundle_subset_cap = 4;
  return inst;
}

Instance make_random_grid(int num_vertices, int num_lines, int max_frequency,
                          std::uint64_t seed) {
  if (num_vertices < 2) throw UsageError("random grid needs at least 2 vertices");
  if (num_lines < 0 || max_frequency < 1) throw UsageError("bad random grid parameters");
  Rand rand(seed * 0x9e3779b97f4a7c15ULL + 12345);
  Instance inst;
  inst.name = "grid-n" + std::to_string(num_vertices) + "-l" + std::to_string(num_lines) +
              "-f" + std::to_string(max_frequency) + "-s" + std::to_string(seed);
  inst.num_vertices = num_vertices;

  const int n = num_vertices;
  std::set<std::pair<VertexId, VertexId>> present;
  auto add_unique = [&](VertexId a, VertexId b, double cost) {
    if (a == b || !present.insert({a, b}).second) return;
    add_edge(inst, a, b, cost);
  };
  for (int v = 1; v <= n; ++v) {
    int next = v == n ? 1 : v + 1;
    add_unique(v, next, rand.uniform(1.0, 3.0));
    add_unique(next, v, rand.uniform(1.0, 3.0));
  }
  int chords = n / 2;
  for (int c = 0; c < chords; ++c) {
    VertexId a = 1 + rand.below(n), b = 1 + rand.below(n);
    add_unique(a, b, rand.uniform(1.5, 4.0));
  }

  auto find_edge = [&](VertexId a, VertexId b) -> EdgeId {
    for (size_t e = 0; e < inst.edges.size(); ++e) {
      if (inst.edges[e].from == a && inst.edges[e].to == b) return static_cast<EdgeId>(e);
    }
    return -1;
  };
  double total_cycle = 0;
  for (int l = 0; l < num_lines; ++l) {
    int len = 1 + rand.below(std::min(3, n - 1));
    int start = 1 + rand.below(n);
    TransitLine line;
    line.name = "L" + std::to_string(l + 1);
    for (int k = 0; k < len; ++k) {
      VertexId a = (start + k - 1) % n + 1;
      VertexId b = a == n ? 1 : a + 1;
      line.edges.push_back(find_edge(a, b));
    }
    line.capacity_per_level = rand.uniform(4.0, 10.0);
    line.setup_cost = rand.uniform(0.5, 2.0);
    line.cycle_time = rand.uniform(0.5, 1.5);
    line.fare = rand.uniform(0.2, 1.0);
    total_cycle += line.cycle_time;
    inst.lines.push_back(std::move(line));
  }

  int num_types = 1 + rand.below(2);
  for (int t = 0; t < num_types; ++t) {
    TravelerType type;
    type.name = t == 0 ? "value" : "qos";
    if (t == 0) {
      type.frequency_weight = rand.uniform(0.2, 0.5);
      type.frequency_exponent = 1;
      type.length_weight = rand.uniform(0.05, 0.2);
    } else {
      type.frequency_weight = rand.uniform(0.3, 0.7);
      type.frequency_exponent = 2;
      type.length_weight = rand.uniform(0.1, 0.3);
    }
    inst.types.push_back(type);
  }

  int want_trips = 3 + rand.below(2 * n);
  std::set<std::pair<VertexId, VertexId>> used;
  for (int i = 0; i < want_trips; ++i) {
    VertexId s = 1 + rand.below(n), t = 1 + rand.below(n);
    if (s == t || !used.insert({s, t}).second) continue;
    Trip trip;
    trip.from = s;
    trip.to = t;
    trip.rate = rand.uniform(2.0, 8.0);
    if (num_types == 1) {
      trip.type_shares = {1.0};
    } else {
      double a = rand.uniform(0.2, 0.8);
      trip.type_shares = {a, 1.0 - a};
    }
    for (int t2 = 0; t2 < num_types; ++t2) trip.base_values.push_back(rand.uniform(3.0, 8.0));
    inst.trips.push_back(std::move(trip));
  }

  inst.params.max_frequency = max_frequency;
  double budget = std::max(1.0, std::round(rand.uniform(0.3, 0.9) * total_cycle *
                                           max_frequency / 2.0));
  inst.params.fleet_budget = budget;
  inst.params.max_transfers = 1;
  inst.params.menu_cap = 5;
  inst.params.bundle_subset_cap = 4;
  return inst;
}

Instance make_nashville_like(std::uint64_t seed) {
  Rand rand(seed * 0x2545f4914f6cdd1dULL + 777);
  Instance inst;
  inst.name = "nashville-like-s" + std::to_string(seed);
  const int n = 47;
  inst.num_vertices = n;

  std::set<std::pair<VertexId, VertexId>> present;
  auto add_unique = [&](VertexId a, VertexId b, double cost) -> EdgeId {
    if (a == b) return -1;
    if (!present.insert({a, b}).second) return -1;
    return add_edge(inst, a, b, cost);
  };
  // Ring in both directions.
  for (int v = 1; v <= n; ++v) {
    int next = v == n ? 1 : v + 1;
    add_unique(v, next, rand.uniform(1.0, 4.0));
    add_unique(next, v, rand.uniform(1.0, 4.0));
  }
  // Hub spokes from vertex 1.
  for (int v = 2; v <= n; ++v) {
    add_unique(1, v, rand.uniform(0.5, 2.0));
    add_unique(v, 1, rand.uniform(0.5, 2.0));
  }
  // Chords up to the target edge count.
  const int target_edges = 664;
  while (static_cast<int>(inst.edges.size()) < target_edges) {
    VertexId a = 1 + rand.below(n), b = 1 + rand.below(n);
    add_unique(a, b, rand.uniform(1.0, 4.0));
  }

  auto find_edge = [&](VertexId a, VertexId b) -> EdgeId {
    for (size_t e = 0; e < inst.edges.size(); ++e) {
      if (inst.edges[e].from == a && inst.edges[e].to == b) return static_cast<EdgeId>(e);
    }
    throw SolverError("generator lost an edge");
  };

  auto add_line = [&](const std::string& name, std::vector<std::pair<VertexId, VertexId>> hops) {
    TransitLine line;
    line.name = name;
    for (auto [a, b] : hops) line.edges.push_back(find_edge(a, b));
    line.capacity_per_level = 75.0;
    line.setup_cost = rand.uniform(1.0, 4.0);
    line.cycle_time = rand.uniform(0.5, 2.0);
    line.fare = rand.uniform(0.5, 2.0);
    inst.lines.push_back(std::move(line));
  };

  // Two pairs of length-2 lines overlapping on a middle edge.
  add_line("P1a", {{2, 3}, {3, 4}});
  add_line("P1b", {{3, 4}, {4, 5}});
  add_line("P2a", {{6, 7}, {7, 8}});
  add_line("P2b", {{7, 8}, {8, 9}});
  // Two private length-2 lines.
  add_line("C1", {{10, 11}, {11, 12}});
  add_line("C2", {{13, 14}, {14, 15}});
  // Forty-two single-edge lines: forward ring segments then reverse segments.
  int made = 0;
  for (VertexId v = 16; v <= 47 && made < 32; ++v, ++made) {
    VertexId next = v == n ? 1 : v + 1;
    add_line("S" + std::to_string(made + 1), {{v, next}});
  }
  for (int k = 0; k < 10; ++k) {
    VertexId v = 17 + 2 * k;
    add_line("R" + std::to_string(k + 1), {{v, v - 1}});
  }

  TravelerType value_type;
  value_type.name = "value";
  value_type.frequency_weight = 0.25;
  value_type.frequency_exponent = 1;
  value_type.length_weight = 0.15;
  inst.types.push_back(value_type);
  TravelerType qos_type;
  qos_type.name = "qos";
  qos_type.frequency_weight = 0.12;
  qos_type.frequency_exponent = 2;
  qos_type.length_weight = 0.3;
  inst.types.push_back(qos_type);

  // Exactly 836 demanded od pairs, chosen by a seeded shuffle of all pairs.
  std::vector<std::pair<VertexId, VertexId>> all_pairs;
  for (VertexId s = 1; s <= n; ++s) {
    for (VertexId t = 1; t <= n; ++t) {
      if (s != t) all_pairs.push_back({s, t});
    }
  }
  for (size_t i = all_pairs.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rand.below(static_cast<int>(i)));
    std::swap(all_pairs[i - 1], all_pairs[j]);
  }
  const int target_trips = 836;
  for (int i = 0; i < target_trips; ++i) {
    auto [s, t] = all_pairs[i];
    Trip trip;
    trip.from = s;
    trip.to = t;
    double boost = (s == 1 || t == 1) ? 1.5 : 1.0;
    trip.rate = boost * rand.uniform(0.5, 3.0);
    double a = rand.uniform(0.2, 0.8);
    trip.type_shares = {a, 1.0 - a};
    trip.base_values = {rand.uniform(4.0, 10.0), rand.uniform(4.0, 10.0)};
    inst.trips.push_back(std::move(trip));
  }

  inst.params.max_frequency = 5;
  inst.params.fleet_budget = 20;
  inst.params.max_transfers = 1;
  inst.params.menu_cap = 5;
  inst.params.bundle_subset_cap = 4;
  return inst;
}

}  // namespace transitmarket
