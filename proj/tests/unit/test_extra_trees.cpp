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

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "kperf/error.hpp"
#include "kperf/extra_trees.hpp"
#include "kperf/parallel.hpp"
#include "test_support.hpp"

namespace kperf {
namespace {

TrainingSet random_set(std::size_t n, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  TrainingSet ts{FeatureMatrix(cols), {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(cols);
    for (double& v : row) v = std::floor(rng.uniform() * 1e6) / 1e3;
    ts.x.add_row(row);
    ts.y.push_back(std::sin(row[0] / 50) * 3 + row[1] / 100 + 5);
  }
  return ts;
}

HyperParams small(std::size_t trees = 16) {
  HyperParams hp;
  hp.n_estimators = trees;
  return hp;
}

TEST_CASE("candidate feature counts") {
  CHECK(resolve_max_features(MaxFeatures::kAll, 12) == 12);
  CHECK(resolve_max_features(MaxFeatures::kSqrt, 12) == 4);
  CHECK(resolve_max_features(MaxFeatures::kLog2, 12) == 4);
  CHECK(resolve_max_features(MaxFeatures::kSqrt, 16) == 4);
  CHECK(resolve_max_features(MaxFeatures::kLog2, 1) == 1);
  CHECK(parse_max_features("sqrt") == MaxFeatures::kSqrt);
  CHECK(parse_criterion("mae") == Criterion::kMae);
  CHECK_THROWS_AS(parse_criterion("gini"), InvalidArgument);
}

TEST_CASE("hyperparameter validation") {
  HyperParams hp;
  hp.n_estimators = 0;
  CHECK_THROWS_AS(hp.validate(), InvalidArgument);
  hp.n_estimators = kMaxEstimators + 1;
  CHECK_THROWS_AS(hp.validate(), InvalidArgument);
  hp.n_estimators = kMaxEstimators;
  CHECK_NOTHROW(hp.validate());
  hp.min_samples_split = 1;
  CHECK_THROWS_AS(hp.validate(), InvalidArgument);
}

TEST_CASE("split search agrees with brute-force rescoring") {
  Rng data_rng(11);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 2 + data_rng.index(11);
    FeatureMatrix x(5);
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(5);
      for (double& v : row) v = static_cast<double>(data_rng.index(6));
      x.add_row(row);
      y.push_back(data_rng.uniform() * 10);
    }
    std::vector<std::size_t> samples(n);
    std::iota(samples.begin(), samples.end(), 0);
    std::vector<std::size_t> order = {3, 0, 4, 1, 2};
    const Criterion crit = round % 2 ? Criterion::kMae : Criterion::kMse;
    Rng rng(static_cast<std::uint64_t>(round));
    std::vector<SplitCandidate> drawn;
    const auto best = best_random_split(x, y, samples, order, 3, crit, rng, &drawn);
    if (!best) {
      CHECK(drawn.empty());
      continue;
    }
    CHECK(drawn.size() <= 3);
    double min_score = INFINITY;
    for (const auto& c : drawn) {
      std::vector<double> xs;
      for (std::size_t i : samples) xs.push_back(x.at(i, c.feature));
      const double lo = *std::min_element(xs.begin(), xs.end());
      const double hi = *std::max_element(xs.begin(), xs.end());
      CHECK(lo <= c.threshold);
      CHECK(c.threshold < hi);
      CHECK(testing::close_rel(c.score, testing::oracle_split_score(crit == Criterion::kMae, xs, y,
                                                                     c.threshold),
                               1e-12));
      min_score = std::min(min_score, c.score);
    }
    CHECK(best->score == min_score);
  }
}

TEST_CASE("constant features give no split") {
  FeatureMatrix x(2);
  for (int i = 0; i < 4; ++i) x.add_row(std::vector<double>{1.0, 2.0});
  const std::vector<double> y = {1, 2, 3, 4};
  const std::vector<std::size_t> samples = {0, 1, 2, 3};
  const std::vector<std::size_t> order = {0, 1};
  Rng rng(1);
  CHECK_FALSE(best_random_split(x, y, samples, order, 2, Criterion::kMse, rng).has_value());
}

TEST_CASE("unbounded trees reproduce unique training rows exactly") {
  const TrainingSet ts = random_set(200, 12, 3);
  for (auto crit : {Criterion::kMse, Criterion::kMae}) {
    HyperParams hp = small();
    hp.criterion = crit;
    hp.max_features = MaxFeatures::kSqrt;
    const Forest f = fit(ts, hp);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(f.predict(ts.x.row(i)) == ts.y[i]);
  }
}

TEST_CASE("predictions stay inside the training range") {
  const TrainingSet ts = random_set(150, 12, 4);
  const Forest f = fit(ts, small(32));
  const double lo = *std::min_element(ts.y.begin(), ts.y.end());
  const double hi = *std::max_element(ts.y.begin(), ts.y.end());
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> probe(12);
    for (double& v : probe) v = rng.uniform() * 2000 - 500;
    const double p = f.predict(probe);
    CHECK(p >= lo);
    CHECK(p <= hi);
  }
}

TEST_CASE("degenerate training sets") {
  TrainingSet one{FeatureMatrix(3), {}};
  one.x.add_row(std::vector<double>{1, 2, 3});
  one.y.push_back(4.5);
  CHECK_THROWS_AS(fit(one, small()), EmptyDataset);

  TrainingSet constant{FeatureMatrix(3), {}};
  for (int i = 0; i < 5; ++i) {
    constant.x.add_row(std::vector<double>{1.0 * i, 2, 3});
    constant.y.push_back(4.5);
  }
  const Forest f = fit(constant, small(4));
  for (const Tree& t : f.trees) CHECK(t.nodes.size() == 1);
  CHECK(f.predict(std::vector<double>{100, 0, 0}) == 4.5);
  CHECK(f.avg_depth == 0);

  TrainingSet bad = constant;
  bad.y[2] = NAN;
  CHECK_THROWS_AS(fit(bad, small()), NonFiniteInput);
}

TEST_CASE("arity is checked at prediction") {
  const Forest f = fit(random_set(20, 12, 1), small(2));
  CHECK_THROWS_AS(f.predict(std::vector<double>(11)), ArityMismatch);
  CHECK(f.feature_names[0] == "threads_per_cta");
}

TEST_CASE("depth limit and minimum split size") {
  const TrainingSet ts = random_set(100, 12, 8);
  HyperParams hp = small(8);
  hp.max_depth = 3;
  const Forest f = fit(ts, hp);
  for (const Tree& t : f.trees) CHECK(t.depth <= 3);
  hp.max_depth.reset();
  hp.min_samples_split = 40;
  for (const Tree& t : fit(ts, hp).trees) {
    for (const TreeNode& n : t.nodes) {
      if (!n.is_leaf()) CHECK(n.n_samples >= 40);
    }
  }
}

TEST_CASE("fitting is deterministic and independent of row order") {
  const TrainingSet ts = random_set(80, 12, 9);
  const Forest a = fit(ts, small());
  CHECK(fit(ts, small()) == a);

  std::vector<std::size_t> perm(ts.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(10);
  rng.shuffle(perm);
  CHECK(fit(ts.subset(perm), small()) == a);

  HyperParams other = small();
  other.seed = 1;
  CHECK_FALSE(fit(ts, other) == a);
}

TEST_CASE("worker count does not change the model") {
  const TrainingSet ts = random_set(60, 12, 12);
  setenv(kThreadsEnv, "1", 1);
  const Forest a = fit(ts, small());
  setenv(kThreadsEnv, "4", 1);
  const Forest b = fit(ts, small());
  unsetenv(kThreadsEnv);
  CHECK(a == b);
}

TEST_CASE("truncation equals a smaller fit") {
  const TrainingSet ts = random_set(50, 12, 16);
  Forest big = fit(ts, small(24));
  truncate(big, 8);
  CHECK(big == fit(ts, small(8)));
  CHECK_THROWS_AS(truncate(big, 9), InvalidArgument);
  CHECK_THROWS_AS(truncate(big, 0), InvalidArgument);
}

TEST_CASE("serialization round trip is exact") {
  const TrainingSet ts = random_set(60, 12, 13);
  HyperParams hp = small(5);
  hp.max_depth = 7;
  hp.criterion = Criterion::kMae;
  const Forest f = fit(ts, hp, TargetKind::kPower);
  const std::string text = serialize(f);
  const Forest g = deserialize(text);
  CHECK(g == f);
  CHECK(serialize(g) == text);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(g.predict(ts.x.row(i)) == f.predict(ts.x.row(i)));
}

TEST_CASE("damaged models are rejected") {
  const std::string text = serialize(fit(random_set(30, 12, 14), small(2)));
  std::string v2 = text;
  v2.replace(v2.find("v1"), 2, "v2");
  CHECK_THROWS_AS(deserialize(v2), VersionMismatch);
  CHECK_THROWS_AS(deserialize(text.substr(0, text.size() / 2)), CorruptModel);
  CHECK_THROWS_AS(deserialize(""), CorruptModel);
  std::string bad = text;
  bad.replace(bad.find("\nS "), 3, "\nS 99");
  CHECK_THROWS_AS(deserialize(bad), CorruptModel);
}

TEST_CASE("importance of a hand-built forest") {
  Tree t;
  t.nodes = {
      {0, 0.5, 1, 2, 0, 4, 1.0},  {-1, 0, 0, 0, 1, 2, 0.0}, {1, 0.5, 3, 4, 0, 2, 0.25},
      {-1, 0, 0, 0, 2, 1, 0.0}, {-1, 0, 0, 0, 3, 1, 0.0},
  };
  Tree leaf;
  leaf.nodes = {{-1, 0, 0, 0, 1, 4, 0.0}};
  Forest f;
  f.trees = {t, leaf};
  f.feature_names = {"a", "b", "c"};
  const auto imp = feature_importance(f);
  CHECK(imp[0] == doctest::Approx(0.875));
  CHECK(imp[1] == doctest::Approx(0.125));
  CHECK(imp[2] == 0);

  Forest flat;
  flat.trees = {leaf};
  flat.feature_names = {"a", "b"};
  CHECK(feature_importance(flat) == std::vector<double>{0.5, 0.5});
}

TEST_CASE("importance favours the informative feature") {
  Rng rng(15);
  TrainingSet ts{FeatureMatrix(4), {}};
  for (int i = 0; i < 300; ++i) {
    std::vector<double> row = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    ts.x.add_row(row);
    ts.y.push_back(row[2] < 0.5 ? 1.0 : 9.0);
  }
  const auto imp = feature_importance(fit(ts, small(32)));
  CHECK(std::accumulate(imp.begin(), imp.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::max_element(imp.begin(), imp.end()) - imp.begin() == 2);
}

}  // namespace
}  // namespace kperf
