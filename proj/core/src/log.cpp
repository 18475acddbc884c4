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

#include "transitmarket/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace transitmarket::log {

namespace {

Level parse_level() {
  const char* raw = std::getenv("TRANSITMARKET_LOG");
  if (raw == nullptr) return Level::kError;
  if (std::strcmp(raw, "off") == 0) return Level::kOff;
  if (std::strcmp(raw, "error") == 0) return Level::kError;
  if (std::strcmp(raw, "info") == 0) return Level::kInfo;
  if (std::strcmp(raw, "debug") == 0) return Level::kDebug;
  return Level::kError;
}

const char* tag(Level lvl) {
  switch (lvl) {
    case Level::kError: return "error";
    case Level::kInfo: return "info";
    case Level::kDebug: return "debug";
    default: return "off";
  }
}

}  // namespace

Level level() {
  static const Level cached = parse_level();
  return cached;
}

bool enabled(Level lvl) { return static_cast<int>(lvl) <= static_cast<int>(level()); }

void write(Level lvl, const std::string& message) {
  if (!enabled(lvl) || lvl == Level::kOff) return;
  std::fprintf(stderr, "[transitmarket %s] %s\n", tag(lvl), message.c_str());
}

}  // namespace transitmarket::log
