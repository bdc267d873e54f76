/*
 * Copyright 2026 The kperf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kperf/error.hpp"

#include <cstdio>
#include <mutex>

#include <fmt/core.h>

namespace kperf {

SyntaxError::SyntaxError(std::size_t line, const std::string& message)
    : Error("SyntaxError", fmt::format("line {}: {}", line, message)),
      line_(line) {}

void warn(std::string_view message) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  fmt::print(stderr, "warning: {}\n", message);
}

}  // namespace kperf
