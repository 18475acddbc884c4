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

#include "transitmarket/modes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "transitmarket/log.hpp"
#include "transitmarket/types.hpp"

namespace transitmarket {

namespace {

constexpr int kExhaustiveVertexLimit = 10;
constexpr size_t kEnumerationGuard = 500000;

void finalize_mode(HybridMode& mode) {
  mode.boardings = 0;
  mode.lines.clear();
  const Leg* prev = nullptr;
  for (const Leg& leg : mode.legs) {
    if (leg.transit) {
      if (prev == nullptr || !prev->transit || prev->family != leg.family) {
        ++mode.boardings;
      }
      mode.lines.insert(mode.lines.end(), leg.family.begin(),
                        leg.family.end());
    }
    prev = &leg;
  }
  std::sort(mode.lines.begin(), mode.lines.end());
  mode.lines.erase(std::unique(mode.lines.begin(), mode.lines.end()),
                   mode.lines.end());
}

std::string mode_key(const HybridMode& mode) {
  std::string key;
  for (const Leg& leg : mode.legs) {
    key += leg.transit ? 'T' : 'M';
    key += std::to_string(leg.edge);
    for (int l : leg.family) {
      key += ',';
      key += std::to_string(l);
    }
    key += ';';
  }
  return key;
}

bool legs_less(const HybridMode& a, const HybridMode& b) {
  if (a.legs.size() != b.legs.size()) return a.legs.size() < b.legs.size();
  for (size_t i = 0; i < a.legs.size(); ++i) {
    const Leg& x = a.legs[i];
    const Leg& y = b.legs[i];
    if (x.edge != y.edge) return x.edge < y.edge;
    if (x.transit != y.transit) return !x.transit;
    if (x.family != y.family) return x.family < y.family;
  }
  return false;
}

// Marks, per line, which edges its route covers.
std::vector<std::vector<char>> line_edge_cover(const ValidatedInstance& vinst) {
  std::vector<std::vector<char>> cover(
      vinst.num_lines(), std::vector<char>(vinst.num_edges(), 0));
  for (int l = 0; l < vinst.num_lines(); ++l) {
    for (EdgeId e : vinst.inst.lines[l].edges) cover[l][e] = 1;
  }
  return cover;
}

struct WalkEnumerator {
  const ValidatedInstance& vinst;
  std::vector<std::vector<char>> cover;
  int max_rides = 0;
  std::vector<char> visited;
  std::vector<Leg> legs;
  std::vector<HybridMode>* out = nullptr;
  VertexId target = 0;

  explicit WalkEnumerator(const ValidatedInstance& vi)
      : vinst(vi),
        cover(line_edge_cover(vi)),
        max_rides(vi.inst.params.max_transfers + 1),
        visited(vi.inst.num_vertices + 1, 0) {}

  // True when boarding a fresh family over `edge` is redundant: some member
  // of the family just ridden also serves `edge`, so the traveler could have
  // stayed aboard instead.
  bool redundant_reboard(const std::vector<int>& prev_family, int edge) const {
    for (int l : prev_family) {
      if (cover[l][edge]) return true;
    }
    return false;
  }

  void run(VertexId u, int rides, const std::vector<int>* prev_family) {
    if (u == target && !legs.empty()) {
      HybridMode mode;
      mode.legs = legs;
      finalize_mode(mode);
      out->push_back(std::move(mode));
      if (out->size() > kEnumerationGuard) {
        throw SolverError("mode enumeration exceeded the size guard");
      }
      return;
    }
    visited[u] = 1;
    for (EdgeId e : vinst.out_edges[u]) {
      VertexId w = vinst.inst.edges[e].to;
      if (visited[w]) continue;
      legs.push_back({false, e, {}});
      run(w, rides, nullptr);
      legs.pop_back();
      for (const Bundle& b : vinst.bundle_families[e]) {
        bool continuation = prev_family != nullptr && *prev_family == b.lines;
        if (!continuation) {
          if (rides + 1 > max_rides) continue;
          if (prev_family != nullptr && redundant_reboard(*prev_family, e)) {
            continue;
          }
        }
        legs.push_back({true, e, b.lines});
        run(w, rides + (continuation ? 0 : 1), &b.lines);
        legs.pop_back();
      }
    }
    visited[u] = 0;
  }
};

// Deterministic single-source shortest paths over MoD edge costs; ties
// prefer the lower-numbered predecessor.
struct ShortestPaths {
  std::vector<double> dist;
  std::vector<EdgeId> parent_edge;  // -1 at the source and unreachable
};

ShortestPaths mod_shortest_paths(const ValidatedInstance& vinst, VertexId s) {
  const int n = vinst.inst.num_vertices;
  ShortestPaths sp;
  sp.dist.assign(n + 1, kInfinity);
  sp.parent_edge.assign(n + 1, -1);
  std::vector<char> settled(n + 1, 0);
  sp.dist[s] = 0;
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.push({0.0, s});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    for (EdgeId e : vinst.out_edges[u]) {
      VertexId w = vinst.inst.edges[e].to;
      double nd = d + vinst.inst.edges[e].cost;
      if (nd < sp.dist[w] - 1e-12 ||
          (nd < sp.dist[w] + 1e-12 && !settled[w] && sp.parent_edge[w] >= 0 &&
           u < vinst.inst.edges[sp.parent_edge[w]].from)) {
        sp.dist[w] = nd;
        sp.parent_edge[w] = e;
        heap.push({nd, w});
      }
    }
  }
  return sp;
}

// Edge sequence of the tree path s -> t, or false when unreachable.
bool tree_path(const ValidatedInstance& vinst, const ShortestPaths& sp,
               VertexId s, VertexId t, std::vector<EdgeId>& edges_out) {
  edges_out.clear();
  if (s == t) return true;
  if (sp.dist[t] >= kInfinity) return false;
  for (VertexId v = t; v != s;) {
    EdgeId e = sp.parent_edge[v];
    edges_out.push_back(e);
    v = vinst.inst.edges[e].from;
  }
  std::reverse(edges_out.begin(), edges_out.end());
  return true;
}

bool vertex_simple(const ValidatedInstance& vinst,
                   const std::vector<Leg>& legs, std::vector<char>& scratch) {
  std::fill(scratch.begin(), scratch.end(), 0);
  VertexId v0 = vinst.inst.edges[legs.front().edge].from;
  scratch[v0] = 1;
  for (const Leg& leg : legs) {
    VertexId w = vinst.inst.edges[leg.edge].to;
    if (scratch[w]) return false;
    scratch[w] = 1;
  }
  return true;
}

// A candidate ride: consecutive transit legs sharing one family.
struct Ride {
  std::vector<Leg> legs;
  VertexId entry = 0;
  VertexId exit = 0;
  bool singleton = false;  // single-line family
  int line = -1;           // the member when singleton
};

std::vector<Ride> build_rides(const ValidatedInstance& vinst) {
  std::vector<Ride> rides;
  for (int l = 0; l < vinst.num_lines(); ++l) {
    const std::vector<EdgeId>& seq = vinst.inst.lines[l].edges;
    for (size_t i = 0; i < seq.size(); ++i) {
      Ride ride;
      ride.entry = vinst.inst.edges[seq[i]].from;
      ride.singleton = true;
      ride.line = l;
      for (size_t j = i; j < seq.size(); ++j) {
        ride.legs.push_back({true, seq[j], {l}});
        ride.exit = vinst.inst.edges[seq[j]].to;
        rides.push_back(ride);
      }
    }
  }
  for (int e = 0; e < vinst.num_edges(); ++e) {
    for (const Bundle& b : vinst.bundle_families[e]) {
      if (b.lines.size() < 2) continue;
      Ride ride;
      ride.legs.push_back({true, e, b.lines});
      ride.entry = vinst.inst.edges[e].from;
      ride.exit = vinst.inst.edges[e].to;
      rides.push_back(ride);
    }
  }
  return rides;
}

std::vector<HybridMode> corridor_modes(
    const ValidatedInstance& vinst, int trip,
    const std::vector<ShortestPaths>& paths, const std::vector<Ride>& rides,
    const std::vector<std::vector<char>>& cover) {
  const Trip& t = vinst.inst.trips[trip];
  std::vector<HybridMode> out;
  std::map<std::string, int> seen;
  std::vector<char> scratch(vinst.inst.num_vertices + 1, 0);
  std::vector<EdgeId> acc, mid, egr;

  auto emit = [&](std::vector<Leg> legs) {
    if (legs.empty()) return;
    HybridMode mode;
    mode.legs = std::move(legs);
    if (!vertex_simple(vinst, mode.legs, scratch)) return;
    finalize_mode(mode);
    std::string key = mode_key(mode);
    if (seen.emplace(std::move(key), 1).second) out.push_back(std::move(mode));
  };
  auto append_mod = [&](std::vector<Leg>& legs, const std::vector<EdgeId>& es) {
    for (EdgeId e : es) legs.push_back({false, e, {}});
  };

  if (tree_path(vinst, paths[t.from], t.from, t.to, acc)) {
    std::vector<Leg> legs;
    append_mod(legs, acc);
    emit(std::move(legs));
  }

  for (const Ride& r : rides) {
    if (!tree_path(vinst, paths[t.from], t.from, r.entry, acc)) continue;
    if (!tree_path(vinst, paths[r.exit], r.exit, t.to, egr)) continue;
    std::vector<Leg> legs;
    append_mod(legs, acc);
    legs.insert(legs.end(), r.legs.begin(), r.legs.end());
    append_mod(legs, egr);
    emit(std::move(legs));
  }

  if (vinst.inst.params.max_transfers >= 1) {
    for (const Ride& r1 : rides) {
      if (!r1.singleton) continue;
      if (!tree_path(vinst, paths[t.from], t.from, r1.entry, acc)) continue;
      for (const Ride& r2 : rides) {
        if (!r2.singleton) continue;
        if (!tree_path(vinst, paths[r1.exit], r1.exit, r2.entry, mid)) continue;
        if (mid.empty()) {
          // Direct transfer: staying aboard must not already cover the next
          // edge, and an equal family would merge into one ride.
          if (r1.line == r2.line) continue;
          if (cover[r1.line][r2.legs.front().edge]) continue;
        }
        if (!tree_path(vinst, paths[r2.exit], r2.exit, t.to, egr)) continue;
        std::vector<Leg> legs;
        append_mod(legs, acc);
        legs.insert(legs.end(), r1.legs.begin(), r1.legs.end());
        append_mod(legs, mid);
        legs.insert(legs.end(), r2.legs.begin(), r2.legs.end());
        append_mod(legs, egr);
        emit(std::move(legs));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<HybridMode> enumerate_all_modes(const ValidatedInstance& vinst,
                                            int trip) {
  const Trip& t = vinst.inst.trips[trip];
  std::vector<HybridMode> out;
  WalkEnumerator walker(vinst);
  walker.out = &out;
  walker.target = t.to;
  walker.run(t.from, 0, nullptr);
  std::sort(out.begin(), out.end(), legs_less);
  return out;
}

double mode_cost(const ValidatedInstance& vinst, const HybridMode& mode,
                 const std::vector<int>& line_levels) {
  double total = 0;
  size_t i = 0;
  while (i < mode.legs.size()) {
    const Leg& leg = mode.legs[i];
    if (!leg.transit) {
      total += vinst.inst.edges[leg.edge].cost;
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < mode.legs.size() && mode.legs[j + 1].transit &&
           mode.legs[j + 1].family == leg.family) {
      ++j;
    }
    VertexId entry = vinst.inst.edges[leg.edge].from;
    VertexId exit = vinst.inst.edges[mode.legs[j].edge].to;
    double fare_weighted = 0;
    double weight_sum = 0;
    double fare_plain = 0;
    for (int l : leg.family) {
      const TransitLine& line = vinst.inst.lines[l];
      auto it = line.fare_by_od.find({entry, exit});
      double fare = it != line.fare_by_od.end() ? it->second : line.fare;
      double w = line_levels.empty() ? 0.0 : line_levels[l];
      fare_weighted += w * fare;
      weight_sum += w;
      fare_plain += fare;
    }
    total += weight_sum > 0 ? fare_weighted / weight_sum
                            : fare_plain / static_cast<double>(leg.family.size());
    i = j + 1;
  }
  return total;
}

double mode_valuation(const ValidatedInstance& vinst, const HybridMode& mode,
                      int type, const std::vector<int>& line_levels,
                      const Trip& trip) {
  const TravelerType& tt = vinst.inst.types[type];
  double v = trip.base_values[type];
  for (const Leg& leg : mode.legs) {
    if (leg.transit) {
      double freq = 0;
      for (int l : leg.family) freq += line_levels[l];
      double bonus = tt.frequency_exponent == 2 ? freq * freq : freq;
      v += tt.frequency_weight * bonus;
    }
    v -= tt.length_weight * vinst.inst.edges[leg.edge].length;
  }
  return std::max(0.0, v);
}

std::vector<std::vector<int>> level_grid(int k, int max_f) {
  std::vector<std::vector<int>> grid;
  std::vector<int> cur(k, 1);
  while (true) {
    grid.push_back(cur);
    int pos = k - 1;
    while (pos >= 0 && cur[pos] == max_f) {
      cur[pos] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++cur[pos];
  }
  return grid;
}

std::vector<int> expand_levels(const HybridMode& mode,
                               const std::vector<int>& variant,
                               int num_lines) {
  std::vector<int> full(num_lines, 0);
  for (size_t i = 0; i < mode.lines.size(); ++i) {
    full[mode.lines[i]] = variant[i];
  }
  return full;
}

VariantChoice best_open_variant(const ValidatedInstance& vinst,
                                const HybridMode& mode, const Trip& trip,
                                int type, const std::vector<int>& line_levels) {
  VariantChoice best;
  const int k = static_cast<int>(mode.lines.size());
  for (int l : mode.lines) {
    if (line_levels[l] <= 0) return best;
  }
  std::vector<int> cur(k, 1);
  while (true) {
    std::vector<int> full = expand_levels(mode, cur, vinst.num_lines());
    double c = mode_cost(vinst, mode, full);
    double v = mode_valuation(vinst, mode, type, full, trip);
    if (!best.open || v - c > best.value - best.cost + 1e-12) {
      best.open = true;
      best.levels = cur;
      best.value = v;
      best.cost = c;
    }
    int pos = k - 1;
    while (pos >= 0 && cur[pos] == line_levels[mode.lines[pos]]) {
      cur[pos] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++cur[pos];
  }
  return best;
}

void add_mod_imbalance(const ValidatedInstance& vinst, const HybridMode& mode,
                       double amount, std::vector<double>& imbalance) {
  for (const Leg& leg : mode.legs) {
    if (leg.transit) continue;
    const Edge& e = vinst.inst.edges[leg.edge];
    imbalance[e.to] += amount;
    imbalance[e.from] -= amount;
  }
}

ModeSet enumerate_modes(const ValidatedInstance& vinst) {
  const int n = vinst.inst.num_vertices;
  ModeSet set;
  set.menus.resize(vinst.inst.trips.size());

  std::vector<ShortestPaths> paths(n + 1);
  for (VertexId s = 1; s <= n; ++s) paths[s] = mod_shortest_paths(vinst, s);
  const bool exhaustive = n <= kExhaustiveVertexLimit;
  std::vector<Ride> rides;
  std::vector<std::vector<char>> cover;
  if (!exhaustive) {
    rides = build_rides(vinst);
    cover = line_edge_cover(vinst);
  }

  std::vector<int> max_levels(vinst.num_lines(), vinst.max_frequency());
  for (size_t ti = 0; ti < vinst.inst.trips.size(); ++ti) {
    const Trip& trip = vinst.inst.trips[ti];
    ModeMenu& menu = set.menus[ti];
    menu.trip = static_cast<int>(ti);

    std::vector<HybridMode> all =
        exhaustive ? enumerate_all_modes(vinst, static_cast<int>(ti))
                   : corridor_modes(vinst, static_cast<int>(ti), paths, rides,
                                    cover);
    if (all.empty()) {
      log::info("trip " + std::to_string(trip.from) + "->" +
                std::to_string(trip.to) + " has no travel option, dropping it");
      continue;
    }

    std::vector<double> score(all.size());
    for (size_t m = 0; m < all.size(); ++m) {
      double best = -kInfinity;
      for (int t = 0; t < vinst.num_types(); ++t) {
        double s = mode_valuation(vinst, all[m], t, max_levels, trip) -
                   mode_cost(vinst, all[m], max_levels);
        best = std::max(best, s);
      }
      score[m] = best;
    }
    std::vector<size_t> order(all.size());
    for (size_t m = 0; m < all.size(); ++m) order[m] = m;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (score[a] != score[b]) return score[a] > score[b];
      return legs_less(all[a], all[b]);
    });

    HybridMode cheapest_mod;
    std::vector<EdgeId> path;
    bool has_mod = tree_path(vinst, paths[trip.from], trip.from, trip.to, path);
    if (has_mod) {
      for (EdgeId e : path) cheapest_mod.legs.push_back({false, e, {}});
      finalize_mode(cheapest_mod);
    }

    size_t keep = std::min<size_t>(order.size(), vinst.inst.params.menu_cap);
    for (size_t m = 0; m < keep; ++m) {
      menu.modes.push_back(all[order[m]]);
    }
    if (has_mod) {
      bool present = false;
      for (const HybridMode& mode : menu.modes) {
        if (mode == cheapest_mod) present = true;
      }
      if (!present) {
        if (menu.modes.size() <
            static_cast<size_t>(vinst.inst.params.menu_cap)) {
          menu.modes.push_back(cheapest_mod);
        } else {
          menu.modes.back() = cheapest_mod;
        }
      }
    }
  }
  return set;
}

}  // namespace transitmarket
