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

#ifndef TRANSITMARKET_INSTANCE_HPP_
#define TRANSITMARKET_INSTANCE_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "transitmarket/types.hpp"

namespace transitmarket {

// Vertices are numbered 1..num_vertices throughout.
struct Edge {
  VertexId from = 0;
  VertexId to = 0;
  double cost = 0;  // MoD per-trip operating cost
  // Empty-vehicle repositioning cost and edge length; NaN inherits cost.
  double rebalance_cost = kUnsetField;
  double length = kUnsetField;
};

struct TransitLine {
  std::string name;
  std::vector<EdgeId> edges;  // ordered, consecutive
  double capacity_per_level = 0;
  double setup_cost = 0;  // per open frequency level
  double cycle_time = 0;  // vehicles consumed per frequency level
  double fare = 0;        // flat per-boarding fare
  std::map<std::pair<VertexId, VertexId>, double> fare_by_od;  // overrides per ride od
};

struct TravelerType {
  std::string name;
  double frequency_weight = 0;
  int frequency_exponent = 1;  // 1 or 2
  double length_weight = 0;
};

struct Trip {
  VertexId from = 0;
  VertexId to = 0;
  double rate = 0;                  // travelers per hour
  std::vector<double> type_shares;  // aligned with Instance::types, sums to 1
  std::vector<double> base_values;  // base utility per type
};

struct SolverParams {
  int max_frequency = 1;
  double fleet_budget = 0;
  int max_transfers = 1;
  int menu_cap = 5;
  int bundle_subset_cap = 4;
};

struct Instance {
  std::string name;
  int num_vertices = 0;
  std::vector<Edge> edges;
  std::vector<TransitLine> lines;
  std::vector<TravelerType> types;
  std::vector<Trip> trips;
  SolverParams params;
};

// A family of lines sharing one edge; travelers board whichever member
// arrives first, so the family acts as one service with summed frequency.
struct Bundle {
  EdgeId edge = 0;
  std::vector<LineId> lines;  // ascending
};

class ValidatedInstance {
 public:
  Instance inst;
  std::vector<std::vector<LineId>> lines_on_edge;       // per edge, ascending
  std::vector<std::vector<EdgeId>> out_edges, in_edges; // index 0 unused
  std::map<std::pair<VertexId, VertexId>, EdgeId> edge_index;
  std::vector<int> component;                           // weak component per vertex, index 0 unused
  std::vector<std::vector<Bundle>> bundle_families;     // per edge, capped

  int num_lines() const { return static_cast<int>(inst.lines.size()); }
  int num_edges() const { return static_cast<int>(inst.edges.size()); }
  int num_types() const { return static_cast<int>(inst.types.size()); }
  int max_frequency() const { return inst.params.max_frequency; }
  int num_frequency_vars() const { return num_lines() * max_frequency(); }
  long long num_bundle_activations() const;
  // Demand rate for one traveler type of one trip.
  double typed_rate(int trip, TypeId type) const {
    return inst.trips[trip].rate * inst.trips[trip].type_shares[type];
  }
};

// Checks all structural invariants and computes the derived indices.
// Throws UsageError listing every diagnostic when the instance is invalid.
ValidatedInstance validate(Instance inst);

// Per-edge bundle families: all nonempty subsets of the lines on the edge.
// Edges with more co-located lines than params.bundle_subset_cap keep, for
// each cardinality k, only the k subsets of highest total capacity.
const std::vector<std::vector<Bundle>>& enumerate_bundles(const ValidatedInstance& vinst);

}  // namespace transitmarket

#endif  // TRANSITMARKET_INSTANCE_HPP_
