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

#ifndef TRANSITMARKET_GEN_HPP_
#define TRANSITMARKET_GEN_HPP_

#include <cstdint>

#include "transitmarket/instance.hpp"

namespace transitmarket {

// Three-vertex triangle with two one-way lines overlapping on one edge and a
// single demanded od pair offering a through-ride, a pure MoD trip, and a
// MoD-plus-bundle combination.
Instance make_fig1();

// Two-vertex family with one line and prohibitively expensive MoD, used to
// demonstrate how the LP relaxation overshoots the integer optimum as the
// frequency ceiling grows past the affordable level.
Instance make_two_vertex_gap(int max_frequency);

// Seeded ring-plus-chords network with random lines and demand. Identical
// arguments always produce the identical instance.
Instance make_random_grid(int num_vertices, int num_lines, int max_frequency, std::uint64_t seed);

// Seeded city-scale synthetic: 47 vertices, 664 directed edges, 48 lines at
// capacity 75 with frequency levels up to 5, fleet budget 20, and 836
// demanded od pairs.
Instance make_nashville_like(std::uint64_t seed);

}  // namespace transitmarket

#endif  // TRANSITMARKET_GEN_HPP_
