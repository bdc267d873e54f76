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

#include <doctest.h>

#include <map>
#include <numeric>
#include <set>

#include "kperf/error.hpp"
#include "kperf/evaluation.hpp"
#include "test_support.hpp"

namespace kperf {
namespace {

TEST_CASE("mape against the oracle") {
  const std::vector<double> y = {100, 200, 50};
  const std::vector<double> p = {110, 150, 50};
  CHECK(mape(y, p) == doctest::Approx(testing::oracle_mape(y, p)));
  CHECK(mape(y, y) == 0);
  const std::vector<double> one = {4};
  const std::vector<double> two = {4, 5};
  CHECK_THROWS_AS(mape(one, two), LengthMismatch);
  CHECK_THROWS_AS(mape({}, {}), LengthMismatch);
  const std::vector<double> zero = {0};
  CHECK_THROWS_AS(mape(zero, one), NonPositiveTruth);

  Rng rng(3);
  for (int round = 0; round < 50; ++round) {
    std::vector<double> t;
    std::vector<double> q;
    for (int i = 0; i < 40; ++i) {
      t.push_back(0.5 + rng.uniform() * 1000);
      q.push_back(rng.uniform() * 1000);
    }
    CHECK(testing::close_rel(mape(t, q), testing::oracle_mape(t, q), 1e-12));
  }
}

TEST_CASE("duration classes") {
  CHECK(duration_class(999.999) == DurationClass::kShort);
  CHECK(duration_class(1000) == DurationClass::kMedium);
  CHECK(duration_class(99999) == DurationClass::kMedium);
  CHECK(duration_class(100000) == DurationClass::kLong);
}

std::vector<double> mixed_times(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> t;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    t.push_back(u < 0.5 ? 10 + u * 900 : (u < 0.85 ? 2000 + u * 50000 : 150000 + u * 1e6));
  }
  return t;
}

TEST_CASE("custom split pins the longest kernels and balances classes") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 20 + seed * 7;
    const std::size_t k = 2 + seed % 6;
    const auto t = mixed_times(n, seed);
    const FoldSpec spec = custom_split(t, k, seed);
    CHECK(spec.k == k);

    std::vector<std::size_t> by_time(n);
    std::iota(by_time.begin(), by_time.end(), 0);
    std::stable_sort(by_time.begin(), by_time.end(), [&](auto a, auto b) { return t[a] > t[b]; });
    std::vector<std::size_t> top(by_time.begin(), by_time.begin() + 5);
    std::sort(top.begin(), top.end());
    CHECK(spec.pinned == top);

    std::vector<std::size_t> seen(n, 0);
    std::map<DurationClass, std::vector<std::size_t>> per_class;
    for (std::size_t f = 0; f < k; ++f) {
      std::map<DurationClass, std::size_t> counts;
      for (std::size_t i : spec.test(f)) {
        ++seen[i];
        ++counts[duration_class(t[i])];
      }
      for (auto c : {DurationClass::kShort, DurationClass::kMedium, DurationClass::kLong}) {
        per_class[c].push_back(counts[c]);
      }
      const auto train = spec.train(f);
      CHECK(train.size() + spec.test(f).size() == n);
      for (std::size_t p : spec.pinned) CHECK(std::binary_search(train.begin(), train.end(), p));
    }
    for (std::size_t p : spec.pinned) CHECK(seen[p] == 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::binary_search(top.begin(), top.end(), i)) CHECK(seen[i] == 1);
    }
    for (const auto& [c, v] : per_class) {
      CHECK(*std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()) <= 1);
    }
  }
}

TEST_CASE("custom split size limits and determinism") {
  const auto t = mixed_times(11, 1);
  CHECK_THROWS_AS(custom_split(t, 6, 1), TooFewSamples);
  CHECK_NOTHROW(custom_split(t, 5, 1));
  CHECK_THROWS_AS(custom_split(t, 1, 1), InvalidArgument);
  const auto u = mixed_times(60, 2);
  CHECK(custom_split(u, 5, 9).assignments == custom_split(u, 5, 9).assignments);
  CHECK(custom_split(u, 5, 9).assignments != custom_split(u, 5, 10).assignments);
}

TEST_CASE("plain k-fold covers every sample once") {
  const FoldSpec spec = kfold_split(23, 5, 4);
  CHECK(spec.pinned.empty());
  std::vector<std::size_t> sizes;
  std::set<std::size_t> all;
  for (std::size_t f = 0; f < 5; ++f) {
    const auto test = spec.test(f);
    sizes.push_back(test.size());
    all.insert(test.begin(), test.end());
  }
  CHECK(all.size() == 23);
  CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
  CHECK_THROWS_AS(kfold_split(3, 5, 1), TooFewSamples);
}

TEST_CASE("default grid is the 24-point search space") {
  const auto grid = make_grid();
  REQUIRE(grid.size() == 24);
  std::set<std::tuple<std::size_t, MaxFeatures, Criterion>> points;
  for (const auto& hp : grid) points.insert({hp.n_estimators, hp.max_features, hp.criterion});
  CHECK(points.size() == 24);
  CHECK(grid[0].criterion == Criterion::kMse);
  CHECK(grid[0].n_estimators == 128);
  CHECK(grid[23].criterion == Criterion::kMae);
  CHECK(grid[23].n_estimators == 1024);
}

TEST_CASE("select_best ties") {
  GridSpec spec;
  spec.estimators = {512, 128};
  spec.max_features = {MaxFeatures::kAll};
  const auto grid = make_grid(spec);  // mse512 mse128 mae512 mae128
  CHECK(select_best(grid, std::vector<double>{3, 2, 1, 4}) == 2);
  CHECK(select_best(grid, std::vector<double>{1, 1, 1, 1}) == 1);
  CHECK(select_best(grid, std::vector<double>{1, 2, 1, 1}) == 3);
  CHECK(select_best(grid, std::vector<double>{1, 2, 1, 2}) == 0);
  CHECK_THROWS_AS(select_best(grid, std::vector<double>{1}), LengthMismatch);
}

TEST_CASE("error buckets") {
  const std::vector<double> y = {100, 100, 100, 100, 100, 100, 100};
  const std::vector<double> p = {100, 110, 111, 150, 151, 200, 300};
  const auto b = bucket_errors(y, p);
  CHECK(b.counts == std::array<std::size_t, 5>{2, 1, 1, 2, 1});
  CHECK(b.total == 7);
  CHECK(b.fractions[0] == doctest::Approx(2.0 / 7));
  CHECK(ErrorBuckets::label(0) == "0-10%");
  CHECK(ErrorBuckets::label(4) == ">100%");
}

TEST_CASE("box statistics use interpolated quartiles") {
  const std::vector<double> v = {7, 1, 3, 5};
  const auto s = box_stats(v);
  CHECK(s.q1 == doctest::Approx(2.5));
  CHECK(s.median == doctest::Approx(4));
  CHECK(s.q3 == doctest::Approx(5.5));
  CHECK(box_stats(std::vector<double>{2}).median == 2);
  CHECK_THROWS_AS(box_stats({}), InvalidArgument);
}

TEST_CASE("nested cross-validation bookkeeping") {
  const Dataset ds = testing::piecewise_dataset(80, 21);
  GridSpec spec;
  spec.estimators = {4, 8};
  spec.max_features = {MaxFeatures::kSqrt};
  const auto grid = make_grid(spec);
  CvOptions opt;
  opt.k_outer = 3;
  opt.k_inner = 3;
  opt.iterations = 2;
  const CvReport r = nested_cv(ds, grid, opt);

  CHECK(r.inner_scores.size() == 2 * 3 * 3 * grid.size());
  CHECK(r.outer_scores.size() == 6);
  REQUIRE(r.selected.size() == 2);
  for (std::size_t it = 0; it < 2; ++it) {
    std::vector<double> means(grid.size(), 0.0);
    for (const auto& s : r.inner_scores) {
      if (s.iteration == it) means[s.grid_index] += s.mape / 9.0;
    }
    const auto lowest = std::min_element(means.begin(), means.end()) - means.begin();
    CHECK(means[r.selected[it]] == doctest::Approx(means[lowest]));
    CHECK(r.mean_inner(it, 0) == doctest::Approx(means[0]));
  }

  std::vector<double> mapes;
  for (const auto& o : r.outer_scores) {
    std::vector<double> y;
    std::vector<double> p;
    for (const auto& pr : r.predictions) {
      if (pr.iteration == o.iteration && pr.outer_fold == o.outer_fold) {
        y.push_back(pr.truth);
        p.push_back(pr.predicted);
      }
    }
    CHECK(testing::close_rel(o.mape, testing::oracle_mape(y, p), 1e-12));
    CHECK(o.grid_index == r.selected[o.iteration]);
    mapes.push_back(o.mape);
  }
  CHECK(r.fold_stats.median == doctest::Approx(box_stats(mapes).median));
  CHECK(r.predictions.size() == 2 * (80 - 5));
  CHECK(r.buckets.total == r.predictions.size());
  CHECK_FALSE(r.latency.has_value());

  const CvReport again = nested_cv(ds, grid, opt);
  CHECK(again.selected == r.selected);
  CHECK(again.outer_scores.front().mape == r.outer_scores.front().mape);
}

TEST_CASE("sqrt and log2 coincide for twelve features") {
  const Dataset ds = testing::piecewise_dataset(40, 22);
  GridSpec spec;
  spec.estimators = {4};
  spec.max_features = {MaxFeatures::kLog2, MaxFeatures::kSqrt};
  spec.criteria = {Criterion::kMse};
  CvOptions opt;
  opt.k_outer = 2;
  opt.k_inner = 2;
  opt.iterations = 1;
  const CvReport r = nested_cv(ds, make_grid(spec), opt);
  REQUIRE(r.inner_scores.size() == 8);
  for (std::size_t i = 0; i < r.inner_scores.size(); i += 2) {
    CHECK(r.inner_scores[i].grid_index == 0);
    CHECK(r.inner_scores[i + 1].grid_index == 1);
    CHECK(r.inner_scores[i].mape == r.inner_scores[i + 1].mape);
  }
  for (std::size_t s : r.selected) CHECK(s == 0);
}

TEST_CASE("leave-one-out") {
  const Dataset ds = testing::piecewise_dataset(25, 5);
  HyperParams hp;
  hp.n_estimators = 8;
  const auto r = leave_one_out(ds, hp);
  REQUIRE(r.entries.size() == 25);
  std::vector<double> y;
  std::vector<double> p;
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(r.entries[i].sample == i);
    CHECK(r.entries[i].train_size == 24);
    CHECK(r.entries[i].truth == doctest::Approx(ds.samples[i].raw_target));
    y.push_back(r.entries[i].truth);
    p.push_back(r.entries[i].predicted);
  }
  CHECK(r.mape == doctest::Approx(testing::oracle_mape(y, p)));
  Dataset tiny = ds;
  tiny.samples.resize(1);
  CHECK_THROWS_AS(leave_one_out(tiny, hp), TooFewSamples);
}

TEST_CASE("latency statistics") {
  const Dataset ds = testing::piecewise_dataset(50, 6);
  HyperParams hp;
  hp.n_estimators = 16;
  const Forest f = fit(ds, hp);
  const TrainingSet data = TrainingSet::from(ds);
  const auto s = measure_latency(f, data.x, 40);
  CHECK(s.repetitions == 40);
  CHECK(s.mean_ms > 0);
  CHECK(s.p50_ms <= s.p95_ms);
  CHECK(s.p95_ms <= s.max_ms);
  CHECK(s.stddev_ms >= 0);
  CHECK_THROWS_AS(measure_latency(f, data.x, 29), InvalidArgument);
}

}  // namespace
}  // namespace kperf
