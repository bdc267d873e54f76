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

// Readers and writers for the tabular artifacts passed between commands.
//
//   block-summary v1   one row per (kernel, block): class counts and bytes
//   trace v1           one row per launch: key, grid, block, shared memory,
//                      block_counts as "id:count;id:count"
//   features v1        one row per launch: key, shared memory, 12 features
//   time v1            one row per (launch, run): duration_us
//   power v1           one row per power reading: run, timestamp_ms, watts
//   dataset v1         one row per sample; target_kind in the metadata
//   hyperparams v1     key,value rows

#ifndef KPERF_IO_HPP_
#define KPERF_IO_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kperf/dataset.hpp"
#include "kperf/extra_trees.hpp"
#include "kperf/features.hpp"
#include "kperf/ptx.hpp"
#include "kperf/tabular.hpp"

namespace kperf {

// The four key columns shared by every per-launch format.
inline constexpr std::array<std::string_view, 4> kKeyColumns = {"benchmark", "dataset",
                                                                 "kernel", "launch_seq"};

Table block_summary_table(std::span<const ptx::KernelCode> kernels);
// Kernels rebuilt from a block-summary file; blocks carry no instructions.
std::vector<ptx::KernelCode> read_block_summary(const std::filesystem::path& path);

struct TraceRecord {
  BlockFrequencyTrace trace;
  LaunchConfig config;
};

Table trace_table(std::span<const TraceRecord> records);
std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

Table features_table(std::span<const FeatureRecord> records);
std::vector<FeatureRecord> read_features(const std::filesystem::path& path);

Table time_table(std::span<const TimeMeasurement> rows);
std::vector<TimeMeasurement> read_time(const std::filesystem::path& path);

Table power_table(std::span<const PowerRow> rows);
std::vector<PowerRow> read_power(const std::filesystem::path& path);

Table dataset_table(const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& path);

Table hyperparams_table(const HyperParams& hp);
HyperParams read_hyperparams(const std::filesystem::path& path);

// "<role>:<file name>:sha256:<digest>" of a file's content.
std::string provenance_entry(std::string_view role, const std::filesystem::path& path,
                             std::string_view content);

}  // namespace kperf

#endif  // KPERF_IO_HPP_
