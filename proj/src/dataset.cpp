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

#include "kperf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kperf/rng.hpp"

namespace kperf {
namespace {

GroupStats mean_and_cv(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double stddev = std::sqrt(ss / n);
  return {mean, mean != 0 ? stddev / mean : 0.0};
}

std::uint64_t group_hash(const GroupKey& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (const std::string* s : {&g.benchmark, &g.dataset, &g.kernel}) {
    for (unsigned char c : *s) h = (h ^ c) * 0x100000001b3ULL;
    h = (h ^ 0xff) * 0x100000001b3ULL;
  }
  return h;
}

Dataset finish_dataset(TargetKind kind, std::vector<Sample> samples, std::size_t threshold,
                       std::uint64_t seed, BuildReport* report) {
  std::map<GroupKey, std::vector<Sample>> groups;
  for (Sample& s : samples) groups[GroupKey::of(s.key)].push_back(std::move(s));
  Dataset dataset;
  dataset.kind = kind;
  dataset.samples = cap_overrepresented(groups, threshold, seed);
  if (report) {
    report->groups = groups.size();
    report->dropped_by_cap = samples.size() - dataset.samples.size();
    for (const Sample& s : dataset.samples) {
      if (s.cv > kHighCvThreshold) report->high_cv.push_back(s.key);
    }
  }
  return dataset;
}

}  // namespace

std::string_view to_string(TargetKind kind) {
  return kind == TargetKind::kTime ? "time" : "power";
}

TargetKind parse_target_kind(std::string_view text) {
  if (text == "time") return TargetKind::kTime;
  if (text == "power") return TargetKind::kPower;
  throw InvalidArgument(fmt::format("unknown target kind '{}' (expected time or power)", text));
}

std::map<LaunchKey, std::vector<double>> group_time_runs(std::span<const TimeMeasurement> rows) {
  std::map<LaunchKey, std::vector<double>> groups;
  std::set<std::pair<LaunchKey, std::uint32_t>> seen;
  for (const TimeMeasurement& m : rows) {
    if (!seen.emplace(m.key, m.run_index).second) {
      throw DuplicateKey(fmt::format("time measurement {} run {} appears twice",
                                     to_string(m.key), m.run_index));
    }
    if (!(m.duration_us > 0) || !std::isfinite(m.duration_us)) {
      throw NonPositiveTarget(fmt::format("{} run {}: duration {} us is not positive",
                                          to_string(m.key), m.run_index, m.duration_us));
    }
    groups[m.key].push_back(m.duration_us);
  }
  return groups;
}

std::map<LaunchKey, std::vector<PowerSampleSeries>> group_power_runs(
    std::span<const PowerRow> rows) {
  std::map<std::pair<LaunchKey, std::uint32_t>, PowerSampleSeries> series;
  for (const PowerRow& row : rows) {
    if (!(row.sample.watts > 0) || !std::isfinite(row.sample.watts)) {
      throw InvalidArgument(fmt::format("{} run {}: power reading {} W is not positive",
                                        to_string(row.key), row.run_index, row.sample.watts));
    }
    auto& s = series[{row.key, row.run_index}];
    s.key = row.key;
    s.run_index = row.run_index;
    if (!s.samples.empty() && !(row.sample.timestamp_ms > s.samples.back().timestamp_ms)) {
      throw InvalidArgument(fmt::format("{} run {}: timestamps must strictly increase",
                                        to_string(row.key), row.run_index));
    }
    s.samples.push_back(row.sample);
  }
  std::map<LaunchKey, std::vector<PowerSampleSeries>> groups;
  for (auto& [key, s] : series) groups[key.first].push_back(std::move(s));
  return groups;
}

GroupStats group_identical_launches(std::span<const double> durations_us) {
  if (durations_us.empty()) throw EmptyGroup("cannot summarize an empty group of measurements");
  std::vector<double> sorted(durations_us.begin(), durations_us.end());
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[(sorted.size() - 1) / 2];
  return {median, mean_and_cv(durations_us).cv};
}

GroupStats aggregate_power(std::span<const PowerSampleSeries> runs, double trim_ms) {
  if (runs.empty()) throw EmptySeries("no power runs to aggregate");
  std::vector<double> run_means;
  run_means.reserve(runs.size());
  for (const PowerSampleSeries& run : runs) {
    if (run.samples.empty()) {
      throw EmptySeries(fmt::format("{} run {} has no samples", to_string(run.key), run.run_index));
    }
    const double start = run.samples.front().timestamp_ms + trim_ms;
    double sum = 0;
    std::size_t n = 0;
    for (const PowerSample& s : run.samples) {
      if (s.timestamp_ms < start) continue;
      sum += s.watts;
      ++n;
    }
    if (n == 0) {
      throw EmptySeries(fmt::format("{} run {} has no samples after trimming {} ms",
                                    to_string(run.key), run.run_index, trim_ms));
    }
    run_means.push_back(sum / static_cast<double>(n));
  }
  return mean_and_cv(run_means);
}

std::vector<Sample> cap_overrepresented(const std::map<GroupKey, std::vector<Sample>>& groups,
                                        std::size_t threshold, std::uint64_t seed) {
  if (threshold < 1) throw InvalidArgument("cap threshold must be at least 1");
  std::vector<Sample> kept;
  for (const auto& [group, samples] : groups) {
    if (samples.size() <= threshold) {
      kept.insert(kept.end(), samples.begin(), samples.end());
      continue;
    }
    // Partial Fisher-Yates: the first `threshold` slots are a uniform draw.
    Rng rng(derive_seed(seed, {group_hash(group)}));
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < threshold; ++i) {
      std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
    }
    idx.resize(threshold);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i : idx) kept.push_back(samples[i]);
  }
  return kept;
}

double transform_target(double raw, TargetKind kind) {
  if (!(raw > 0) || !std::isfinite(raw)) {
    throw NonPositiveTarget(fmt::format("target {} must be positive and finite", raw));
  }
  return kind == TargetKind::kTime ? std::log(raw) : raw;
}

double inverse_transform(double target, TargetKind kind) {
  return kind == TargetKind::kTime ? std::exp(target) : target;
}

Dataset build_time_dataset(std::span<const FeatureRecord> features,
                           std::span<const TimeMeasurement> measurements,
                           std::size_t threshold, std::uint64_t seed, BuildReport* report) {
  const auto join = join_measurements<double>(features, group_time_runs(measurements));
  std::vector<Sample> samples;
  samples.reserve(join.joined.size());
  for (const auto& entry : join.joined) {
    const GroupStats stats = group_identical_launches(entry.values);
    samples.push_back({entry.key, entry.shared_mem_bytes, entry.features,
                       transform_target(stats.center, TargetKind::kTime), stats.center,
                       stats.cv});
  }
  if (report) {
    report->unmatched_features = join.unmatched_features;
    report->unmatched_measurements = join.unmatched_measurements;
  }
  return finish_dataset(TargetKind::kTime, std::move(samples), threshold, seed, report);
}

Dataset build_power_dataset(std::span<const FeatureRecord> features,
                            std::span<const PowerRow> measurements, std::size_t threshold,
                            std::uint64_t seed, double trim_ms, BuildReport* report) {
  const auto join =
      join_measurements<PowerSampleSeries>(features, group_power_runs(measurements));
  std::vector<Sample> samples;
  samples.reserve(join.joined.size());
  for (const auto& entry : join.joined) {
    const GroupStats stats = aggregate_power(entry.values, trim_ms);
    samples.push_back({entry.key, entry.shared_mem_bytes, entry.features,
                       transform_target(stats.center, TargetKind::kPower), stats.center,
                       stats.cv});
  }
  if (report) {
    report->unmatched_features = join.unmatched_features;
    report->unmatched_measurements = join.unmatched_measurements;
  }
  return finish_dataset(TargetKind::kPower, std::move(samples), threshold, seed, report);
}

}  // namespace kperf
