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

#ifndef TRANSITMARKET_MODES_HPP_
#define TRANSITMARKET_MODES_HPP_

#include <vector>

#include "transitmarket/instance.hpp"

namespace transitmarket {

// One hop of a door-to-door travel option: a single edge traversed either by
// an on-demand vehicle or by a bundle of transit lines that all serve the
// edge. A transit leg's `family` lists the bundled line ids in ascending
// order; the traveler boards whichever member arrives first.
struct Leg {
  bool transit = false;
  int edge = -1;
  std::vector<int> family;

  bool operator==(const Leg& o) const {
    return transit == o.transit && edge == o.edge && family == o.family;
  }
};

// A door-to-door option for one trip: a vertex-simple walk from the trip
// origin to its destination. Maximal runs of consecutive transit legs with
// an identical family form rides; `boardings` counts the rides and `lines`
// is the sorted union of all families touched.
struct HybridMode {
  std::vector<Leg> legs;
  int boardings = 0;
  std::vector<int> lines;

  bool operator==(const HybridMode& o) const { return legs == o.legs; }
};

// The offered options for one trip, strongest candidates first. A trip whose
// origin cannot reach its destination at all gets an empty menu and is
// skipped by the solvers.
struct ModeMenu {
  int trip = -1;
  std::vector<HybridMode> modes;
};

struct ModeSet {
  std::vector<ModeMenu> menus;  // aligned with the instance's trips
};

// Every mode for the given trip under the walk rules, without any menu
// truncation. Exponential in the network size; intended for small networks
// and diagnostics.
std::vector<HybridMode> enumerate_all_modes(const ValidatedInstance& vinst,
                                            int trip);

// Builds the offered menu for every trip. Small networks get the exhaustive
// walk enumeration; larger ones a corridor generator that stitches rides
// along each line (and along each multi-line bundle edge) together with
// on-demand access, egress, and connector paths. Menus keep the
// `menu_cap` best modes ranked by the best single-type net value at maximal
// frequencies, and always include the cheapest pure on-demand path when one
// exists.
ModeSet enumerate_modes(const ValidatedInstance& vinst);

// Total out-of-pocket price of a mode: on-demand legs pay the edge cost and
// each ride pays one fare. A ride's fare averages the member lines' fares
// weighted by their frequency levels; with an empty level vector, or when
// every member is at level zero, the members weigh equally. A member line
// with a fare table entry for the ride's entry and exit vertices uses that
// entry instead of its flat fare.
double mode_cost(const ValidatedInstance& vinst, const HybridMode& mode,
                 const std::vector<int>& line_levels);

// Perceived value of a mode for one traveler type: the trip's base value for
// that type, plus per leg a frequency bonus (weight times the family's total
// level, raised to the type's exponent; zero on on-demand legs) minus the
// length penalty (weight times edge length). Clamped at zero for the whole
// mode. `line_levels` must hold one level per line.
double mode_valuation(const ValidatedInstance& vinst, const HybridMode& mode,
                      int type, const std::vector<int>& line_levels,
                      const Trip& trip);

// All vectors in {1..max_f}^k in ascending lexicographic order, the last
// position varying fastest. k = 0 yields one empty vector.
std::vector<std::vector<int>> level_grid(int k, int max_f);

// Per-line levels (size = number of lines) realizing a variant of `mode`,
// with `variant` parallel to mode.lines; all other lines get zero.
std::vector<int> expand_levels(const HybridMode& mode,
                               const std::vector<int>& variant, int num_lines);

// The best frequency variant of `mode` that a plan keeps open, for one
// traveler type. A variant assigns each member line a level between 1 and
// its realized level in `line_levels`; among open variants the one with the
// highest value minus cost wins, ties going to the earliest in level_grid
// order. A mode with a member line at level zero is closed.
struct VariantChoice {
  bool open = false;
  std::vector<int> levels;  // parallel to mode.lines
  double value = 0;
  double cost = 0;
};
VariantChoice best_open_variant(const ValidatedInstance& vinst,
                                const HybridMode& mode, const Trip& trip,
                                int type, const std::vector<int>& line_levels);

// Accumulates the vehicle surplus a passenger flow on `mode` creates: each
// on-demand leg (u, v) strands `amount` vehicles worth of capacity at v and
// draws it from u.
void add_mod_imbalance(const ValidatedInstance& vinst, const HybridMode& mode,
                       double amount, std::vector<double>& imbalance);

}  // namespace transitmarket

#endif  // TRANSITMARKET_MODES_HPP_
