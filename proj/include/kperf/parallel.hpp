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

#ifndef KPERF_PARALLEL_HPP_
#define KPERF_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace kperf {

// Name of the environment variable that bounds worker threads.
inline constexpr const char* kThreadsEnv = "KPERF_THREADS";

// Worker count: KPERF_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs task(i) for i in [0, n). Tasks must only write to their own slots;
// the first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace kperf

#endif  // KPERF_PARALLEL_HPP_
