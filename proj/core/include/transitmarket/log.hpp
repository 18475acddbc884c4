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

#ifndef TRANSITMARKET_LOG_HPP_
#define TRANSITMARKET_LOG_HPP_

#include <string>

namespace transitmarket::log {

// Levels are ordered; a message is emitted when its level is at or below the
// configured one. The level is read once from the TRANSITMARKET_LOG
// environment variable ("off", "error", "info", "debug"; default "error").
enum class Level { kOff = 0, kError = 1, kInfo = 2, kDebug = 3 };

Level level();
bool enabled(Level lvl);

// Writes one line to stderr, prefixed with the level tag.
void write(Level lvl, const std::string& message);

inline void error(const std::string& m) { write(Level::kError, m); }
inline void info(const std::string& m) { write(Level::kInfo, m); }
inline void debug(const std::string& m) { write(Level::kDebug, m); }

}  // namespace transitmarket::log

#endif  // TRANSITMARKET_LOG_HPP_
