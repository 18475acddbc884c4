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

#ifndef TRANSITMARKET_TYPES_HPP_
#define TRANSITMARKET_TYPES_HPP_

#include <limits>
#include <stdexcept>
#include <string>

namespace transitmarket {

// Vertices are numbered 1..n as in instance files; edge, line and traveler
// type ids are dense zero-based indices into the instance arrays.
using VertexId = int;
using EdgeId = int;
using LineId = int;
using TypeId = int;

constexpr double kInfinity = 1e100;

// Marks an optional numeric field whose value falls back to another field.
constexpr double kUnsetField = std::numeric_limits<double>::quiet_NaN();

// Raised for malformed command lines, unreadable files and schema errors.
// The CLI maps it to exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a solver cannot produce a certified result (numerical
// breakdown, iteration/time budget exhausted without an incumbent).
// The CLI maps it to exit code 1.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace transitmarket

#endif  // TRANSITMARKET_TYPES_HPP_
