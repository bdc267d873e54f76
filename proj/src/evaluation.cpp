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

#include "kperf/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <tuple>

#include <fmt/core.h>

#include "kperf/error.hpp"
#include "kperf/rng.hpp"

namespace kperf {
namespace {

constexpr std::uint64_t kInnerTag = 1;
constexpr std::uint64_t kOuterTag = 2;
constexpr std::uint64_t kLatencyTag = 3;
constexpr std::uint64_t kSplitTag = 4;

void check_pairs(std::span<const double> truths, std::span<const double> preds) {
  if (truths.size() != preds.size()) {
    throw LengthMismatch(
        fmt::format("{} truths but {} predictions", truths.size(), preds.size()));
  }
  for (double t : truths) {
    if (!(t > 0)) throw NonPositiveTruth(fmt::format("truth {} is not positive", t));
  }
}

FoldSpec split_for(TargetKind kind, std::span<const double> raw, std::size_t k,
                   std::uint64_t seed) {
  return kind == TargetKind::kTime ? custom_split(raw, k, seed)
                                   : kfold_split(raw.size(), k, seed);
}

struct Scored {
  std::vector<double> truths;
  std::vector<double> preds;
  double mape = 0;
};

Scored score(const Forest& forest, const TrainingSet& data,
             std::span<const std::size_t> test, TargetKind kind) {
  Scored s;
  s.truths.reserve(test.size());
  s.preds.reserve(test.size());
  for (std::size_t i : test) {
    s.truths.push_back(inverse_transform(data.y[i], kind));
    s.preds.push_back(inverse_transform(forest.predict(data.x.row(i)), kind));
  }
  s.mape = mape(s.truths, s.preds);
  return s;
}

std::vector<std::size_t> pick(std::span<const std::size_t> from,
                              std::span<const std::size_t> positions) {
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(from[p]);
  return out;
}

double quantile7(std::span<const double> sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted[lo];
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double mape(std::span<const double> truths, std::span<const double> preds) {
  check_pairs(truths, preds);
  if (truths.empty()) throw LengthMismatch("cannot score an empty set of predictions");
  double sum = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    sum += std::abs(truths[i] - preds[i]) / truths[i];
  }
  return 100.0 * sum / static_cast<double>(truths.size());
}

DurationClass duration_class(double microseconds) {
  if (microseconds < kShortLimitUs) return DurationClass::kShort;
  if (microseconds < kLongLimitUs) return DurationClass::kMedium;
  return DurationClass::kLong;
}

std::vector<std::size_t> FoldSpec::test(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldSpec::train(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldSpec custom_split(std::span<const double> raw_times_us, std::size_t k, std::uint64_t seed) {
  const std::size_t n = raw_times_us.size();
  if (k < 2) throw InvalidArgument("need at least 2 folds");
  if (n <= k + kPinnedLongest) {
    throw TooFewSamples(fmt::format(
        "{} samples cannot fill {} folds after pinning the {} longest", n, k, kPinnedLongest));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return raw_times_us[a] > raw_times_us[b];
  });

  FoldSpec spec;
  spec.k = k;
  spec.assignments.assign(n, 0);
  spec.pinned.assign(order.begin(), order.begin() + kPinnedLongest);
  std::sort(spec.pinned.begin(), spec.pinned.end());
  for (std::size_t i : spec.pinned) spec.assignments[i] = FoldSpec::kPinned;

  std::array<std::vector<std::size_t>, 3> strata;
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.assignments[i] == FoldSpec::kPinned) continue;
    strata[static_cast<std::size_t>(duration_class(raw_times_us[i]))].push_back(i);
  }
  Rng rng(derive_seed(seed, {kSplitTag}));
  std::size_t next = 0;
  for (auto& stratum : strata) {
    rng.shuffle(stratum);
    for (std::size_t i : stratum) spec.assignments[i] = next++ % k;
  }
  return spec;
}

FoldSpec kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("need at least 2 folds");
  if (n < k) throw TooFewSamples(fmt::format("{} samples cannot fill {} folds", n, k));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, {kSplitTag}));
  rng.shuffle(order);
  FoldSpec spec;
  spec.k = k;
  spec.assignments.assign(n, 0);
  for (std::size_t p = 0; p < n; ++p) spec.assignments[order[p]] = p % k;
  return spec;
}

FoldSpec split_dataset(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  std::vector<double> raw;
  raw.reserve(dataset.size());
  for (const Sample& s : dataset.samples) raw.push_back(s.raw_target);
  return split_for(dataset.kind, raw, k, seed);
}

std::vector<HyperParams> make_grid(const GridSpec& spec) {
  std::vector<HyperParams> grid;
  for (Criterion c : spec.criteria) {
    for (MaxFeatures m : spec.max_features) {
      for (std::size_t e : spec.estimators) {
        HyperParams hp;
        hp.criterion = c;
        hp.max_features = m;
        hp.n_estimators = e;
        hp.validate();
        grid.push_back(hp);
      }
    }
  }
  if (grid.empty()) throw InvalidArgument("hyperparameter grid is empty");
  return grid;
}

std::size_t select_best(std::span<const HyperParams> grid, std::span<const double> scores) {
  if (grid.empty() || grid.size() != scores.size()) {
    throw LengthMismatch(fmt::format("{} grid points but {} scores", grid.size(), scores.size()));
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const auto key = [&](std::size_t i) {
      return std::tuple(scores[i], grid[i].n_estimators, grid[i].criterion != Criterion::kMse);
    };
    if (key(g) < key(best)) best = g;
  }
  return best;
}

std::string ErrorBuckets::label(std::size_t bucket) {
  static constexpr std::array<const char*, 5> kLabels = {"0-10%", "10-25%", "25-50%",
                                                         "50-100%", ">100%"};
  return kLabels.at(bucket);
}

ErrorBuckets bucket_errors(std::span<const double> truths, std::span<const double> preds) {
  check_pairs(truths, preds);
  ErrorBuckets b;
  b.total = truths.size();
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const double rel = std::abs(truths[i] - preds[i]) / truths[i];
    std::size_t bucket = 0;
    while (bucket < ErrorBuckets::kEdges.size() && rel > ErrorBuckets::kEdges[bucket]) ++bucket;
    ++b.counts[bucket];
  }
  if (b.total > 0) {
    for (std::size_t i = 0; i < b.counts.size(); ++i) {
      b.fractions[i] = static_cast<double>(b.counts[i]) / static_cast<double>(b.total);
    }
  }
  return b;
}

BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("no values to summarize");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return {quantile7(sorted, 0.25), quantile7(sorted, 0.5), quantile7(sorted, 0.75)};
}

LatencyStats measure_latency(const Forest& forest, const FeatureMatrix& probes,
                             std::size_t repetitions) {
  if (repetitions < kMinLatencyRepetitions) {
    throw InvalidArgument(fmt::format("need at least {} repetitions, got {}",
                                      kMinLatencyRepetitions, repetitions));
  }
  if (probes.rows() == 0) throw InvalidArgument("no probe rows to time");
  volatile double sink = 0;
  for (std::size_t i = 0; i < kLatencyWarmup; ++i) {
    sink = sink + forest.predict(probes.row(i % probes.rows()));
  }
  std::vector<double> ms(repetitions);
  for (std::size_t i = 0; i < repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    sink = sink + forest.predict(probes.row(i % probes.rows()));
    const auto stop = std::chrono::steady_clock::now();
    ms[i] = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  LatencyStats stats;
  stats.repetitions = repetitions;
  stats.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(repetitions);
  double ss = 0;
  for (double v : ms) ss += (v - stats.mean_ms) * (v - stats.mean_ms);
  stats.stddev_ms = std::sqrt(ss / static_cast<double>(repetitions));
  std::sort(ms.begin(), ms.end());
  stats.p50_ms = quantile7(ms, 0.5);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(repetitions)));
  stats.p95_ms = ms[rank - 1];
  stats.max_ms = ms.back();
  return stats;
}

double CvReport::mean_inner(std::size_t iteration, std::size_t grid_index) const {
  double sum = 0;
  std::size_t n = 0;
  for (const InnerScore& s : inner_scores) {
    if (s.iteration != iteration || s.grid_index != grid_index) continue;
    sum += s.mape;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

namespace {

// Grid points that differ only in n_estimators, after resolving
// max_features for `arity`. Each class lists its points largest first; one
// fit of the largest serves all of them by truncation.
std::vector<std::vector<std::size_t>> fit_classes(std::span<const HyperParams> grid,
                                                  std::size_t arity) {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<const HyperParams*> heads;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const HyperParams& hp = grid[g];
    auto same = [&](const HyperParams* h) {
      return h->criterion == hp.criterion && h->min_samples_split == hp.min_samples_split &&
             h->max_depth == hp.max_depth &&
             resolve_max_features(h->max_features, arity) ==
                 resolve_max_features(hp.max_features, arity);
    };
    const auto it = std::find_if(heads.begin(), heads.end(), same);
    if (it == heads.end()) {
      heads.push_back(&hp);
      classes.push_back({g});
    } else {
      classes[static_cast<std::size_t>(it - heads.begin())].push_back(g);
    }
  }
  for (auto& c : classes) {
    std::stable_sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) {
      return grid[a].n_estimators > grid[b].n_estimators;
    });
  }
  return classes;
}

}  // namespace

CvReport nested_cv(const Dataset& dataset, std::span<const HyperParams> grid,
                   const CvOptions& options) {
  if (grid.empty()) throw InvalidArgument("hyperparameter grid is empty");
  if (options.iterations < 1) throw InvalidArgument("need at least one iteration");
  for (const HyperParams& hp : grid) hp.validate();
  if (dataset.size() == 0) throw EmptyDataset("dataset has no samples");

  const TrainingSet data = TrainingSet::from(dataset);
  std::vector<double> raw;
  raw.reserve(dataset.size());
  for (const Sample& s : dataset.samples) raw.push_back(s.raw_target);
  const TargetKind kind = dataset.kind;

  CvReport report;
  report.grid.assign(grid.begin(), grid.end());
  std::vector<double> all_truths;
  std::vector<double> all_preds;
  std::vector<double> outer_mapes;
  double depth_sum = 0;

  const auto classes = fit_classes(grid, data.x.cols());
  for (std::size_t it = 0; it < options.iterations; ++it) {
    const std::uint64_t it_seed = derive_seed(options.seed, {it});
    const FoldSpec outer = split_for(kind, raw, options.k_outer, it_seed);

    for (std::size_t o = 0; o < options.k_outer; ++o) {
      const std::vector<std::size_t> outer_train = outer.train(o);
      std::vector<double> inner_raw;
      inner_raw.reserve(outer_train.size());
      for (std::size_t i : outer_train) inner_raw.push_back(raw[i]);
      const FoldSpec inner =
          split_for(kind, inner_raw, options.k_inner, derive_seed(it_seed, {o}));
      for (std::size_t in = 0; in < options.k_inner; ++in) {
        const auto train = pick(outer_train, inner.train(in));
        const auto test = pick(outer_train, inner.test(in));
        const TrainingSet train_set = data.subset(train);
        std::vector<double> scores(grid.size());
        for (std::size_t c = 0; c < classes.size(); ++c) {
          HyperParams hp = grid[classes[c].front()];
          hp.seed = derive_seed(options.seed, {kInnerTag, it, o, in, c});
          Forest forest = fit(train_set, hp, kind);
          for (std::size_t g : classes[c]) {
            truncate(forest, grid[g].n_estimators);
            scores[g] = score(forest, data, test, kind).mape;
          }
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
          report.inner_scores.push_back({it, o, in, g, scores[g]});
        }
      }
    }

    std::vector<double> means(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) means[g] = report.mean_inner(it, g);
    const std::size_t chosen = select_best(grid, means);
    report.selected.push_back(chosen);

    for (std::size_t o = 0; o < options.k_outer; ++o) {
      HyperParams hp = grid[chosen];
      hp.seed = derive_seed(options.seed, {kOuterTag, it, o});
      const Forest forest = fit(data.subset(outer.train(o)), hp, kind);
      const std::vector<std::size_t> test = outer.test(o);
      const Scored s = score(forest, data, test, kind);
      report.outer_scores.push_back({it, o, chosen, s.mape, forest.avg_depth});
      outer_mapes.push_back(s.mape);
      depth_sum += forest.avg_depth;
      for (std::size_t j = 0; j < test.size(); ++j) {
        report.predictions.push_back({it, o, test[j], s.truths[j], s.preds[j]});
      }
      all_truths.insert(all_truths.end(), s.truths.begin(), s.truths.end());
      all_preds.insert(all_preds.end(), s.preds.begin(), s.preds.end());
    }
  }

  std::vector<double> overall(grid.size(), 0.0);
  std::vector<std::size_t> counts(grid.size(), 0);
  for (const InnerScore& s : report.inner_scores) {
    overall[s.grid_index] += s.mape;
    ++counts[s.grid_index];
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    overall[g] /= static_cast<double>(std::max<std::size_t>(1, counts[g]));
  }
  report.best = select_best(grid, overall);
  report.fold_stats = box_stats(outer_mapes);
  report.buckets = bucket_errors(all_truths, all_preds);
  report.avg_depth = depth_sum / static_cast<double>(outer_mapes.size());

  if (options.measure_latency) {
    HyperParams hp = grid[report.best];
    hp.seed = derive_seed(options.seed, {kLatencyTag});
    const Forest forest = fit(data, hp, kind);
    report.latency = measure_latency(forest, data.x, options.latency_repetitions);
  }
  return report;
}

LooReport leave_one_out(const Dataset& dataset, const HyperParams& hp) {
  hp.validate();
  const std::size_t n = dataset.size();
  if (n < 2) throw TooFewSamples(fmt::format("leave-one-out needs 2 samples, got {}", n));
  const TrainingSet data = TrainingSet::from(dataset);
  LooReport report;
  std::vector<double> truths;
  std::vector<double> preds;
  std::vector<std::size_t> train;
  train.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    train.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) train.push_back(j);
    }
    const Forest forest = fit(data.subset(train), hp, dataset.kind);
    const double truth = inverse_transform(data.y[i], dataset.kind);
    const double pred = inverse_transform(forest.predict(data.x.row(i)), dataset.kind);
    report.entries.push_back({i, truth, pred, train.size()});
    truths.push_back(truth);
    preds.push_back(pred);
  }
  report.mape = mape(truths, preds);
  report.buckets = bucket_errors(truths, preds);
  return report;
}

}  // namespace kperf
