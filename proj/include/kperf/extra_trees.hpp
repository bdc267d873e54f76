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

// Extremely Randomized Trees for regression.
//
// Every tree is grown on the full training set (no bootstrap). At each node
// the features are visited in a random order; for each non-constant one a
// single threshold is drawn uniformly between the node's minimum and maximum
// of that feature, until `max_features` candidates have been scored. The
// candidate with the lowest weighted child impurity wins. Leaves predict the
// mean of their training targets and the forest predicts the mean over
// trees, so predictions never leave the range of the training targets.

#ifndef KPERF_EXTRA_TREES_HPP_
#define KPERF_EXTRA_TREES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kperf/dataset.hpp"
#include "kperf/rng.hpp"

namespace kperf {

enum class MaxFeatures { kAll, kSqrt, kLog2 };
enum class Criterion { kMse, kMae };

std::string_view to_string(MaxFeatures value);
std::string_view to_string(Criterion value);
MaxFeatures parse_max_features(std::string_view text);
Criterion parse_criterion(std::string_view text);

// Larger ensembles tend to overfit noisy measurements.
inline constexpr std::size_t kMaxEstimators = 1024;

struct HyperParams {
  std::size_t n_estimators = 128;
  MaxFeatures max_features = MaxFeatures::kAll;
  Criterion criterion = Criterion::kMse;
  std::size_t min_samples_split = 2;
  std::optional<std::size_t> max_depth;  // unbounded when empty
  std::uint64_t seed = kDefaultSeed;

  // InvalidArgument unless 1 <= n_estimators <= kMaxEstimators and
  // min_samples_split >= 2.
  void validate() const;
  std::string describe() const;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

// Number of candidate features per split: all, ceil(sqrt(arity)) or
// ceil(log2(arity)); 12 features give 12, 4 and 4.
std::size_t resolve_max_features(MaxFeatures mode, std::size_t arity);

// Dense row-major matrix of feature rows.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t cols) : cols_(cols) {}

  void add_row(std::span<const double> row);

  std::size_t rows() const { return cols_ ? values_.size() / cols_ : 0; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct TrainingSet {
  FeatureMatrix x;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
  // Feature rows and model-space targets of a dataset.
  static TrainingSet from(const Dataset& dataset);
  TrainingSet subset(std::span<const std::size_t> rows) const;
};

struct TreeNode {
  std::int32_t feature = -1;  // negative for leaves
  double threshold = 0;       // x[feature] <= threshold goes left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0;  // leaf output
  std::uint64_t n_samples = 0;
  double impurity = 0;

  bool is_leaf() const { return feature < 0; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  // Pre-order: the root is node 0 and a left child directly follows its
  // parent.
  std::vector<TreeNode> nodes;
  std::size_t depth = 0;  // longest root-to-leaf path in edges

  double predict(std::span<const double> x) const;

  friend bool operator==(const Tree&, const Tree&) = default;
};

struct Forest {
  std::vector<Tree> trees;
  HyperParams hyper;
  std::vector<std::string> feature_names;
  TargetKind target_kind = TargetKind::kTime;
  double avg_depth = 0;

  std::size_t arity() const { return feature_names.size(); }

  // Mean of the per-tree predictions. ArityMismatch on a wrong input size.
  double predict(std::span<const double> x) const;
  double predict(const FeatureVector& x) const;

  friend bool operator==(const Forest&, const Forest&) = default;
};

// EmptyDataset with fewer than min_samples_split samples; NonFiniteInput on
// NaN or infinite features or targets. Trees are grown in parallel from
// per-tree seeds; the result does not depend on the worker count or on the
// order of the training rows.
Forest fit(const TrainingSet& data, const HyperParams& hp,
           TargetKind kind = TargetKind::kTime,
           std::vector<std::string> feature_names = {});
Forest fit(const Dataset& dataset, const HyperParams& hp);

// Keeps the first `n_trees` trees. Tree seeds depend only on the fit seed and
// the tree index, so this equals a fit with n_estimators = n_trees.
void truncate(Forest& forest, std::size_t n_trees);

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0;
  // (n_left * impurity_left + n_right * impurity_right) / n, where the
  // impurity is the variance (MSE) or the mean absolute deviation about
  // the median (MAE).
  double score = 0;
};

// Draws one threshold for each non-constant feature in `feature_order`
// until `max_candidates` have been scored, and returns the best one (ties
// go to the lower feature index). nullopt when every visited feature is
// constant on the node. Every scored candidate is appended to `drawn`.
std::optional<SplitCandidate> best_random_split(const FeatureMatrix& x,
                                                std::span<const double> y,
                                                std::span<const std::size_t> node_samples,
                                                std::span<const std::size_t> feature_order,
                                                std::size_t max_candidates,
                                                Criterion criterion, Rng& rng,
                                                std::vector<SplitCandidate>* drawn = nullptr);

// Mean decrease in impurity per feature: normalized per tree, averaged over
// trees with at least one split, renormalized to sum to one. A forest
// without any split yields a uniform vector and a warning.
std::vector<double> feature_importance(const Forest& forest);

// Versioned, line-oriented text format. Doubles round-trip exactly.
std::string serialize(const Forest& forest);
// VersionMismatch for other format versions, CorruptModel otherwise.
Forest deserialize(std::string_view text);

inline constexpr int kModelFormatVersion = 1;

}  // namespace kperf

#endif  // KPERF_EXTRA_TREES_HPP_
