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
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "transitmarket/gen.hpp"
#include "transitmarket/instance.hpp"
#include "transitmarket/types.hpp"

namespace mkt = transitmarket;

namespace {

std::string leg_string(const mkt::Leg& leg) {
  std::string s = leg.transit ? "T" : "M";
  s += std::to_string(leg.edge);
  for (int l : leg.family) s += "," + std::to_string(l);
  return s + ";";
}

std::string mode_string(const mkt::HybridMode& mode) {
  std::string s;
  for (const mkt::Leg& leg : mode.legs) s += leg_string(leg);
  return s;
}

// Reference enumeration of every walk option, written against the same rules
// but as breadth-first search over explicit walk states.
std::set<std::string> oracle_walks(const mkt::ValidatedInstance& vinst,
                                   int trip) {
  struct State {
    mkt::VertexId at;
    unsigned visited;
    std::vector<int> last_family;  // empty after on-demand legs
    int rides;
    std::string walk;
  };
  const mkt::Trip& t = vinst.inst.trips[trip];
  const int max_rides = vinst.inst.params.max_transfers + 1;
  std::set<std::string> result;
  std::vector<State> queue;
  queue.push_back({t.from, 1u << t.from, {}, 0, ""});
  while (!queue.empty()) {
    State cur = queue.back();
    queue.pop_back();
    for (mkt::EdgeId e : vinst.out_edges[cur.at]) {
      mkt::VertexId w = vinst.inst.edges[e].to;
      if (cur.visited & (1u << w)) continue;
      auto step = [&](bool transit, const std::vector<int>& family,
                      int rides) {
        mkt::Leg leg{transit, e, family};
        State nxt{w, cur.visited | (1u << w), transit ? family : std::vector<int>{},
                  rides, cur.walk + leg_string(leg)};
        if (w == t.to) {
          result.insert(nxt.walk);
        } else {
          queue.push_back(std::move(nxt));
        }
      };
      step(false, {}, cur.rides);
      for (const mkt::Bundle& b : vinst.bundle_families[e]) {
        if (!cur.last_family.empty() && cur.last_family == b.lines) {
          step(true, b.lines, cur.rides);
          continue;
        }
        if (cur.rides + 1 > max_rides) continue;
        bool redundant = false;
        for (int l : cur.last_family) {
          for (mkt::EdgeId le : vinst.inst.lines[l].edges) {
            if (le == e) redundant = true;
          }
        }
        if (redundant) continue;
        step(true, b.lines, cur.rides + 1);
      }
    }
  }
  return result;
}

void check_matches_oracle(const mkt::ValidatedInstance& vinst) {
  for (size_t trip = 0; trip < vinst.inst.trips.size(); ++trip) {
    std::set<std::string> expected = oracle_walks(vinst, trip);
    std::set<std::string> got;
    for (const mkt::HybridMode& m :
         mkt::enumerate_all_modes(vinst, static_cast<int>(trip))) {
      got.insert(mode_string(m));
    }
    CHECK(got == expected);
  }
}

double best_type_score(const mkt::ValidatedInstance& vinst,
                       const mkt::HybridMode& mode, const mkt::Trip& trip) {
  std::vector<int> full(vinst.num_lines(), vinst.max_frequency());
  double best = -mkt::kInfinity;
  for (int t = 0; t < vinst.num_types(); ++t) {
    best = std::max(best, mkt::mode_valuation(vinst, mode, t, full, trip) -
                              mkt::mode_cost(vinst, mode, full));
  }
  return best;
}

bool is_pure_mod(const mkt::HybridMode& mode) {
  for (const mkt::Leg& leg : mode.legs) {
    if (leg.transit) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("walk enumeration matches the reference search") {
  check_matches_oracle(mkt::validate(mkt::make_fig1()));
  check_matches_oracle(mkt::validate(mkt::make_two_vertex_gap(4)));
  for (int seed = 0; seed < 12; ++seed) {
    mkt::Instance inst = mkt::make_random_grid(5 + seed % 2, 2, 2, 400 + seed);
    inst.params.max_transfers = seed % 3;
    check_matches_oracle(mkt::validate(std::move(inst)));
  }
}

TEST_CASE("three vertex corridor offers six walk options") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  std::vector<mkt::HybridMode> all = mkt::enumerate_all_modes(vinst, 0);
  std::set<std::string> keys;
  for (const mkt::HybridMode& m : all) keys.insert(mode_string(m));
  std::set<std::string> expected = {
      "M0;M1;",        // on-demand both hops
      "M0;T1,0;",      // on-demand then line I
      "M0;T1,1;",      // on-demand then line II
      "M0;T1,0,1;",    // on-demand then the two-line bundle
      "T0,0;T1,0;",    // line I end to end, one ride
      "T0,0;M1;",      // line I then on-demand
  };
  CHECK(keys == expected);
  for (const mkt::HybridMode& m : all) {
    if (mode_string(m) == "T0,0;T1,0;") CHECK(m.boardings == 1);
    if (mode_string(m) == "M0;T1,0,1;") {
      CHECK(m.boardings == 1);
      CHECK(m.lines == std::vector<int>{0, 1});
    }
  }
}

TEST_CASE("menu keeps the strongest options and the on-demand fallback") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet set = mkt::enumerate_modes(vinst);
  REQUIRE(set.menus.size() == 1);
  REQUIRE(set.menus[0].modes.size() == 3);
  CHECK(mode_string(set.menus[0].modes[0]) == "M0;T1,0,1;");
  CHECK(mode_string(set.menus[0].modes[1]) == "T0,0;T1,0;");
  CHECK(mode_string(set.menus[0].modes[2]) == "M0;M1;");

  const mkt::Trip& trip = vinst.inst.trips[0];
  CHECK(best_type_score(vinst, set.menus[0].modes[0], trip) ==
        doctest::Approx(17.05));
  CHECK(best_type_score(vinst, set.menus[0].modes[1], trip) ==
        doctest::Approx(12.4));
  CHECK(best_type_score(vinst, set.menus[0].modes[2], trip) ==
        doctest::Approx(3.0));
}

TEST_CASE("ride fares average member lines by frequency") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet set = mkt::enumerate_modes(vinst);
  const mkt::HybridMode& bundled = set.menus[0].modes[0];  // M0;T1,0,1

  CHECK(mkt::mode_cost(vinst, bundled, {2, 2}) == doctest::Approx(2.75));
  CHECK(mkt::mode_cost(vinst, bundled, {1, 2}) ==
        doctest::Approx(2.0 + 2.0 / 3.0));
  CHECK(mkt::mode_cost(vinst, bundled, {0, 0}) == doctest::Approx(2.75));
  CHECK(mkt::mode_cost(vinst, bundled, {}) == doctest::Approx(2.75));

  const mkt::HybridMode& through = set.menus[0].modes[1];  // T0,0;T1,0
  CHECK(mkt::mode_cost(vinst, through, {2, 2}) == doctest::Approx(1.0));

  mkt::Instance with_table = mkt::make_fig1();
  with_table.lines[0].fare_by_od[{1, 3}] = 0.4;
  mkt::ValidatedInstance vt = mkt::validate(std::move(with_table));
  CHECK(mkt::mode_cost(vt, through, {2, 2}) == doctest::Approx(0.4));
  CHECK(mkt::mode_cost(vt, bundled, {2, 2}) == doctest::Approx(2.75));
}

TEST_CASE("valuation clamps at zero for the whole option") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet set = mkt::enumerate_modes(vinst);
  const mkt::HybridMode& mod_only = set.menus[0].modes[2];
  mkt::Trip poor = vinst.inst.trips[0];
  poor.base_values = {0.5, 0.5};
  // qos type: 0.5 - 0.5 * (2 + 2) < 0, clamped.
  CHECK(mkt::mode_valuation(vinst, mod_only, 1, {2, 2}, poor) ==
        doctest::Approx(0.0));
  CHECK(mkt::mode_valuation(vinst, mod_only, 1, {2, 2},
                            vinst.inst.trips[0]) == doctest::Approx(7.0));
}

TEST_CASE("level grid walks all variants in order") {
  std::vector<std::vector<int>> g = mkt::level_grid(2, 3);
  REQUIRE(g.size() == 9);
  CHECK(g.front() == std::vector<int>{1, 1});
  CHECK(g[1] == std::vector<int>{1, 2});
  CHECK(g.back() == std::vector<int>{3, 3});
  std::vector<std::vector<int>> empty = mkt::level_grid(0, 5);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].empty());
}

TEST_CASE("best open variant respects the plan ceiling") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet set = mkt::enumerate_modes(vinst);
  const mkt::HybridMode& bundled = set.menus[0].modes[0];
  const mkt::Trip& trip = vinst.inst.trips[0];

  mkt::VariantChoice vc = mkt::best_open_variant(vinst, bundled, trip, 1, {2, 1});
  REQUIRE(vc.open);
  CHECK(vc.levels == std::vector<int>{2, 1});
  CHECK(vc.value == doctest::Approx(14.2));
  CHECK(vc.cost == doctest::Approx(2.0 + 2.5 / 3.0));

  mkt::VariantChoice closed =
      mkt::best_open_variant(vinst, bundled, trip, 1, {0, 2});
  CHECK(!closed.open);

  const mkt::HybridMode& mod_only = set.menus[0].modes[2];
  mkt::VariantChoice mod = mkt::best_open_variant(vinst, mod_only, trip, 1, {0, 0});
  REQUIRE(mod.open);
  CHECK(mod.levels.empty());
  CHECK(mod.cost == doctest::Approx(4.0));
}

TEST_CASE("on-demand legs move vehicle surplus downstream") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_fig1());
  mkt::ModeSet set = mkt::enumerate_modes(vinst);
  std::vector<double> imbalance(4, 0.0);
  mkt::add_mod_imbalance(vinst, set.menus[0].modes[0], 5.0, imbalance);
  CHECK(imbalance[1] == doctest::Approx(-5.0));
  CHECK(imbalance[2] == doctest::Approx(5.0));
  CHECK(imbalance[3] == doctest::Approx(0.0));
  mkt::add_mod_imbalance(vinst, set.menus[0].modes[2], 1.0, imbalance);
  CHECK(imbalance[1] == doctest::Approx(-6.0));
  CHECK(imbalance[2] == doctest::Approx(5.0));
  CHECK(imbalance[3] == doctest::Approx(1.0));
}

TEST_CASE("menus never rank a kept option below a dropped one") {
  for (int seed = 0; seed < 8; ++seed) {
    mkt::Instance inst = mkt::make_random_grid(6, 3, 2, 900 + seed);
    inst.params.menu_cap = 3;
    mkt::ValidatedInstance vinst = mkt::validate(std::move(inst));
    mkt::ModeSet set = mkt::enumerate_modes(vinst);
    for (const mkt::ModeMenu& menu : set.menus) {
      if (menu.modes.empty()) continue;
      CHECK(menu.modes.size() <= 3);
      const mkt::Trip& trip = vinst.inst.trips[menu.trip];
      std::set<std::string> kept;
      for (const mkt::HybridMode& m : menu.modes) kept.insert(mode_string(m));
      CHECK(kept.size() == menu.modes.size());

      std::vector<mkt::HybridMode> all = mkt::enumerate_all_modes(vinst, menu.trip);
      double worst_kept = mkt::kInfinity;
      bool has_forced = false;
      int transit_kept = 0;
      for (const mkt::HybridMode& m : menu.modes) {
        if (is_pure_mod(m)) {
          has_forced = true;
          continue;
        }
        ++transit_kept;
        worst_kept = std::min(worst_kept, best_type_score(vinst, m, trip));
      }
      CHECK(has_forced);
      // Kept options other than the on-demand fallback are the best-ranked
      // ones, so no dropped mode may outscore them.
      if (transit_kept > 0) {
        for (const mkt::HybridMode& m : all) {
          if (kept.count(mode_string(m))) continue;
          CHECK(best_type_score(vinst, m, trip) <= worst_kept + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("corridor generator covers the large network") {
  mkt::ValidatedInstance vinst = mkt::validate(mkt::make_nashville_like(7));
  mkt::ModeSet set = mkt::enumerate_modes(vinst);
  REQUIRE(set.menus.size() == vinst.inst.trips.size());
  int with_transit = 0;
  for (const mkt::ModeMenu& menu : set.menus) {
    REQUIRE(!menu.modes.empty());
    CHECK(menu.modes.size() <= 5);
    bool fallback = false;
    for (const mkt::HybridMode& m : menu.modes) {
      if (is_pure_mod(m)) fallback = true;
      // Legs chain into a vertex-simple walk with correct endpoints.
      const mkt::Trip& trip = vinst.inst.trips[menu.trip];
      std::set<mkt::VertexId> seen;
      mkt::VertexId at = trip.from;
      seen.insert(at);
      for (const mkt::Leg& leg : m.legs) {
        CHECK(vinst.inst.edges[leg.edge].from == at);
        at = vinst.inst.edges[leg.edge].to;
        CHECK(!seen.count(at));
        seen.insert(at);
        if (leg.transit) {
          for (int l : leg.family) {
            bool serves = false;
            for (mkt::EdgeId le : vinst.inst.lines[l].edges) {
              if (le == leg.edge) serves = true;
            }
            CHECK(serves);
          }
        }
      }
      CHECK(at == trip.to);
      CHECK(m.boardings <= vinst.inst.params.max_transfers + 1);
      if (!is_pure_mod(m)) ++with_transit;
    }
    CHECK(fallback);
  }
  CHECK(with_transit > 100);

  mkt::ModeSet again = mkt::enumerate_modes(vinst);
  for (size_t i = 0; i < set.menus.size(); ++i) {
    REQUIRE(again.menus[i].modes.size() == set.menus[i].modes.size());
    for (size_t j = 0; j < set.menus[i].modes.size(); ++j) {
      CHECK(again.menus[i].modes[j] == set.menus[i].modes[j]);
    }
  }
}
