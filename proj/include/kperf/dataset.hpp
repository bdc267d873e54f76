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

// Ground-truth ingestion: measurements are joined with feature vectors by
// launch key, repeated runs are collapsed into one sample, over-represented
// kernels are capped, and targets are mapped into model space.

#ifndef KPERF_DATASET_HPP_
#define KPERF_DATASET_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/core.h>

#include "kperf/error.hpp"
#include "kperf/features.hpp"

namespace kperf {

enum class TargetKind { kTime, kPower };

std::string_view to_string(TargetKind kind);
TargetKind parse_target_kind(std::string_view text);

struct TimeMeasurement {
  LaunchKey key;
  std::uint32_t run_index = 0;
  double duration_us = 0;
};

struct PowerSample {
  double timestamp_ms = 0;
  double watts = 0;
};

// All power readings of one run; timestamps strictly increasing.
struct PowerSampleSeries {
  LaunchKey key;
  std::uint32_t run_index = 0;
  std::vector<PowerSample> samples;
};

// One row of a features file.
struct FeatureRecord {
  LaunchKey key;
  // Static shared memory of the launch; metadata, not a model feature.
  std::uint64_t shared_mem_bytes = 0;
  FeatureVector features;
};

// (benchmark, dataset, kernel): the unit over which samples are capped.
struct GroupKey {
  std::string benchmark;
  std::string dataset;
  std::string kernel;

  static GroupKey of(const LaunchKey& key) { return {key.benchmark, key.dataset, key.kernel}; }

  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
  friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

struct Sample {
  LaunchKey key;
  std::uint64_t shared_mem_bytes = 0;
  FeatureVector features;
  double target = 0;      // model space: ln(us) for time, watts for power
  double raw_target = 0;  // microseconds or watts
  double cv = 0;          // coefficient of variation of the repeats

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  TargetKind kind = TargetKind::kTime;
  std::vector<Sample> samples;
  // "<role>:<file name>:sha256:<digest>" per ingested source.
  std::vector<std::string> provenance;

  std::size_t size() const { return samples.size(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Repeated runs of each launch, keyed by launch. DuplicateKey if a
// (launch, run) pair occurs twice.
std::map<LaunchKey, std::vector<double>> group_time_runs(
    std::span<const TimeMeasurement> rows);

// Power rows of one (launch, run) form a series, in input order.
// InvalidArgument on non-increasing timestamps or non-positive watts.
struct PowerRow {
  LaunchKey key;
  std::uint32_t run_index = 0;
  PowerSample sample;
};
std::map<LaunchKey, std::vector<PowerSampleSeries>> group_power_runs(
    std::span<const PowerRow> rows);

template <typename Value>
struct JoinedEntry {
  LaunchKey key;
  std::uint64_t shared_mem_bytes = 0;
  FeatureVector features;
  std::vector<Value> values;
};

template <typename Value>
struct JoinResult {
  std::vector<JoinedEntry<Value>> joined;
  std::vector<LaunchKey> unmatched_features;
  std::vector<LaunchKey> unmatched_measurements;
};

// Inner join on the launch key. Unmatched keys on either side are reported;
// DuplicateKey if a feature record repeats a key. Output is in key order.
template <typename Value>
JoinResult<Value> join_measurements(
    std::span<const FeatureRecord> features,
    const std::map<LaunchKey, std::vector<Value>>& measurements) {
  std::map<LaunchKey, const FeatureRecord*> by_key;
  for (const FeatureRecord& record : features) {
    if (!by_key.emplace(record.key, &record).second) {
      throw DuplicateKey(fmt::format("feature record {} appears twice", to_string(record.key)));
    }
  }
  JoinResult<Value> result;
  for (const auto& [key, record] : by_key) {
    auto it = measurements.find(key);
    if (it == measurements.end()) {
      result.unmatched_features.push_back(key);
      continue;
    }
    result.joined.push_back({key, record->shared_mem_bytes, record->features, it->second});
  }
  for (const auto& [key, values] : measurements) {
    if (!by_key.contains(key)) result.unmatched_measurements.push_back(key);
  }
  return result;
}

// Center and coefficient of variation of a group of repeats.
struct GroupStats {
  double center = 0;
  double cv = 0;
};

// Median of the durations (lower-middle element for even counts) and
// population coefficient of variation. EmptyGroup if `durations_us` is empty.
GroupStats group_identical_launches(std::span<const double> durations_us);

// Mean watts per run, then mean and population CV across runs. Samples in
// the first `trim_ms` of each run are dropped. EmptySeries if any run has
// no samples left.
GroupStats aggregate_power(std::span<const PowerSampleSeries> runs, double trim_ms = 0);

// Keeps at most `threshold` samples per group, drawn uniformly without
// replacement. Deterministic for a fixed seed; groups are emitted in key
// order and retained samples keep their relative order.
std::vector<Sample> cap_overrepresented(const std::map<GroupKey, std::vector<Sample>>& groups,
                                        std::size_t threshold, std::uint64_t seed);

// Time: natural log of microseconds. Power: identity.
// NonPositiveTarget if `raw` <= 0 or is not finite.
double transform_target(double raw, TargetKind kind);
double inverse_transform(double target, TargetKind kind);

// Coefficient of variation above which a sample is flagged in build reports.
inline constexpr double kHighCvThreshold = 1.0;
inline constexpr std::size_t kDefaultCapThreshold = 100;

struct BuildReport {
  std::vector<LaunchKey> unmatched_features;
  std::vector<LaunchKey> unmatched_measurements;
  std::vector<LaunchKey> high_cv;
  std::size_t groups = 0;
  std::size_t dropped_by_cap = 0;
};

Dataset build_time_dataset(std::span<const FeatureRecord> features,
                           std::span<const TimeMeasurement> measurements,
                           std::size_t threshold, std::uint64_t seed,
                           BuildReport* report = nullptr);

Dataset build_power_dataset(std::span<const FeatureRecord> features,
                            std::span<const PowerRow> measurements,
                            std::size_t threshold, std::uint64_t seed,
                            double trim_ms = 0, BuildReport* report = nullptr);

}  // namespace kperf

#endif  // KPERF_DATASET_HPP_
