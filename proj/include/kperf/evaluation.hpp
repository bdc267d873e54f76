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

// Model validation: MAPE scoring, duration-stratified folds that always
// train on the longest-running kernels, nested cross-validation over a
// hyperparameter grid, leave-one-out predictions and prediction latency.
//
// Every score is computed in raw units (microseconds or watts): model-space
// targets and predictions both go through inverse_transform first.

#ifndef KPERF_EVALUATION_HPP_
#define KPERF_EVALUATION_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kperf/dataset.hpp"
#include "kperf/extra_trees.hpp"

namespace kperf {

// Mean absolute percentage error, in percent. LengthMismatch on unequal or
// empty inputs, NonPositiveTruth if a truth is <= 0.
double mape(std::span<const double> truths, std::span<const double> preds);

enum class DurationClass { kShort, kMedium, kLong };

inline constexpr double kShortLimitUs = 1000.0;    // short: t < 1 ms
inline constexpr double kLongLimitUs = 100000.0;   // long: t >= 100 ms
inline constexpr std::size_t kPinnedLongest = 5;

DurationClass duration_class(double microseconds);

struct FoldSpec {
  static constexpr std::size_t kPinned = std::numeric_limits<std::size_t>::max();

  std::size_t k = 0;
  // Fold of each sample, or kPinned for samples in every training split.
  std::vector<std::size_t> assignments;
  std::vector<std::size_t> pinned;  // ascending

  std::vector<std::size_t> test(std::size_t fold) const;
  std::vector<std::size_t> train(std::size_t fold) const;
};

// Pins the five longest samples into every training split and deals each
// duration class round-robin over the folds after a seeded shuffle, so the
// per-fold count of every class differs by at most one.
// TooFewSamples unless n > k + 5.
FoldSpec custom_split(std::span<const double> raw_times_us, std::size_t k, std::uint64_t seed);

// Shuffled K-fold without stratification or pinning. TooFewSamples if n < k.
FoldSpec kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

// custom_split for time datasets, kfold_split for power datasets.
FoldSpec split_dataset(const Dataset& dataset, std::size_t k, std::uint64_t seed);

struct GridSpec {
  std::vector<std::size_t> estimators{128, 256, 512, 1024};
  std::vector<MaxFeatures> max_features{MaxFeatures::kAll, MaxFeatures::kLog2, MaxFeatures::kSqrt};
  std::vector<Criterion> criteria{Criterion::kMse, Criterion::kMae};
};

// Cartesian product, criterion-major then max_features then estimators.
// The default spec yields the 24-point search space.
std::vector<HyperParams> make_grid(const GridSpec& spec = {});

// Lowest score wins; ties prefer fewer estimators, then MSE, then the
// earlier grid point.
std::size_t select_best(std::span<const HyperParams> grid, std::span<const double> scores);

// Relative-error histogram with edges 10%, 25%, 50% and 100%.
struct ErrorBuckets {
  static constexpr std::array<double, 4> kEdges = {0.10, 0.25, 0.50, 1.00};
  std::array<std::size_t, 5> counts{};
  std::array<double, 5> fractions{};
  std::size_t total = 0;

  static std::string label(std::size_t bucket);
};

ErrorBuckets bucket_errors(std::span<const double> truths, std::span<const double> preds);

// Linear-interpolation quartiles.
struct BoxStats {
  double q1 = 0;
  double median = 0;
  double q3 = 0;
};

BoxStats box_stats(std::span<const double> values);

struct LatencyStats {
  double mean_ms = 0;
  double p50_ms = 0;
  double p95_ms = 0;
  double max_ms = 0;
  double stddev_ms = 0;
  std::size_t repetitions = 0;
};

inline constexpr std::size_t kLatencyWarmup = 5;
inline constexpr std::size_t kMinLatencyRepetitions = 30;

// Wall-clock time of single-sample predictions cycling over `probes`,
// after kLatencyWarmup discarded calls. InvalidArgument if repetitions < 30.
LatencyStats measure_latency(const Forest& forest, const FeatureMatrix& probes,
                             std::size_t repetitions);

struct CvOptions {
  std::size_t k_outer = 5;
  std::size_t k_inner = 5;
  std::size_t iterations = 5;
  std::uint64_t seed = kDefaultSeed;
  bool measure_latency = false;
  std::size_t latency_repetitions = kMinLatencyRepetitions;
};

struct InnerScore {
  std::size_t iteration = 0;
  std::size_t outer_fold = 0;
  std::size_t inner_fold = 0;
  std::size_t grid_index = 0;
  double mape = 0;
};

struct OuterScore {
  std::size_t iteration = 0;
  std::size_t outer_fold = 0;
  std::size_t grid_index = 0;
  double mape = 0;
  double avg_depth = 0;
};

struct Prediction {
  std::size_t iteration = 0;
  std::size_t outer_fold = 0;
  std::size_t sample = 0;
  double truth = 0;      // raw units
  double predicted = 0;  // raw units
};

struct CvReport {
  std::vector<HyperParams> grid;
  std::vector<InnerScore> inner_scores;
  std::vector<std::size_t> selected;  // grid index chosen in each iteration
  std::vector<OuterScore> outer_scores;
  std::vector<Prediction> predictions;
  std::size_t best = 0;  // lowest mean inner score over all iterations
  BoxStats fold_stats;   // over every outer fold score
  ErrorBuckets buckets;  // over every outer test prediction
  double avg_depth = 0;
  std::optional<LatencyStats> latency;

  // Mean inner MAPE of a grid point within one iteration.
  double mean_inner(std::size_t iteration, std::size_t grid_index) const;
};

// Per iteration: every grid point is scored by inner CV on each outer
// training split; the point with the lowest mean inner MAPE is then refit
// and scored on every outer fold. Within an inner fold, grid points that
// differ only in n_estimators share one seed, so smaller forests are
// prefixes of larger ones. Results are identical for a fixed seed whatever
// the worker count.
CvReport nested_cv(const Dataset& dataset, std::span<const HyperParams> grid,
                   const CvOptions& options);

struct LooEntry {
  std::size_t sample = 0;
  double truth = 0;      // raw units
  double predicted = 0;  // raw units
  std::size_t train_size = 0;
};

struct LooReport {
  std::vector<LooEntry> entries;
  ErrorBuckets buckets;
  double mape = 0;
};

// One model per sample, trained on all other samples with `hp`.
LooReport leave_one_out(const Dataset& dataset, const HyperParams& hp);

}  // namespace kperf

#endif  // KPERF_EVALUATION_HPP_
