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

#include "kperf/extra_trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "kperf/error.hpp"
#include "kperf/parallel.hpp"
#include "kperf/tabular.hpp"

namespace kperf {
namespace {

// Scratch buffers reused across the nodes of one tree.
struct Workspace {
  std::vector<double> xs;  // one feature of the node's samples
  std::vector<double> ys;  // targets of the node's samples
  std::vector<double> left;
  std::vector<double> right;
};

double median_abs_deviation_sum(std::vector<double>& values) {
  if (values.empty()) return 0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double median = *mid;
  double sum = 0;
  for (double v : values) sum += std::abs(v - median);
  return sum;
}

double squared_deviation_sum(std::span<const double> values) {
  if (values.empty()) return 0;
  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss;
}

// Per-sample impurity of ws.ys (variance or mean absolute deviation about
// the median).
double node_impurity(Criterion criterion, Workspace& ws) {
  const double n = static_cast<double>(ws.ys.size());
  if (criterion == Criterion::kMse) return squared_deviation_sum(ws.ys) / n;
  ws.left.assign(ws.ys.begin(), ws.ys.end());
  return median_abs_deviation_sum(ws.left) / n;
}

// Weighted child impurity of splitting (ws.xs, ws.ys) at `threshold`.
double split_score(Criterion criterion, double threshold, Workspace& ws) {
  const std::size_t n = ws.ys.size();
  if (criterion == Criterion::kMse) {
    double sum_l = 0;
    double sum_r = 0;
    std::size_t n_l = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (ws.xs[j] <= threshold) {
        sum_l += ws.ys[j];
        ++n_l;
      } else {
        sum_r += ws.ys[j];
      }
    }
    const double mean_l = n_l ? sum_l / static_cast<double>(n_l) : 0.0;
    const double mean_r = n > n_l ? sum_r / static_cast<double>(n - n_l) : 0.0;
    double ss_l = 0;
    double ss_r = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (ws.xs[j] <= threshold) {
        ss_l += (ws.ys[j] - mean_l) * (ws.ys[j] - mean_l);
      } else {
        ss_r += (ws.ys[j] - mean_r) * (ws.ys[j] - mean_r);
      }
    }
    return (ss_l + ss_r) / static_cast<double>(n);
  }
  ws.left.clear();
  ws.right.clear();
  for (std::size_t j = 0; j < n; ++j) {
    (ws.xs[j] <= threshold ? ws.left : ws.right).push_back(ws.ys[j]);
  }
  return (median_abs_deviation_sum(ws.left) + median_abs_deviation_sum(ws.right)) /
         static_cast<double>(n);
}

// `feature_value(i, f)` reads feature f of sample i; ws.ys must hold the
// targets of `samples`.
template <typename Get>
std::optional<SplitCandidate> find_split(Get&& feature_value,
                                         std::span<const std::size_t> samples,
                                         std::span<const std::size_t> feature_order,
                                         std::size_t max_candidates, Criterion criterion,
                                         Rng& rng, Workspace& ws,
                                         std::vector<SplitCandidate>* drawn) {
  std::optional<SplitCandidate> best;
  std::size_t scored = 0;
  ws.xs.resize(samples.size());
  for (std::size_t f : feature_order) {
    if (scored == max_candidates) break;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const double v = feature_value(samples[j], f);
      ws.xs[j] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(lo < hi)) continue;

    double threshold = lo + rng.uniform_open() * (hi - lo);
    if (threshold >= hi) threshold = std::nextafter(hi, lo);
    if (threshold < lo) threshold = lo;
    const double score = split_score(criterion, threshold, ws);
    ++scored;
    const SplitCandidate candidate{f, threshold, score};
    if (drawn) drawn->push_back(candidate);
    if (!best || score < best->score || (score == best->score && f < best->feature)) {
      best = candidate;
    }
  }
  return best;
}

void check_finite(const TrainingSet& data) {
  for (std::size_t r = 0; r < data.x.rows(); ++r) {
    for (double v : data.x.row(r)) {
      if (!std::isfinite(v)) throw NonFiniteInput(fmt::format("row {} has a non-finite feature", r));
    }
    if (!std::isfinite(data.y[r])) throw NonFiniteInput(fmt::format("row {} has a non-finite target", r));
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<double>& columns, std::size_t n_rows, std::size_t arity,
              std::span<const double> y, const HyperParams& hp)
      : columns_(columns), n_rows_(n_rows), arity_(arity), y_(y), hp_(hp),
        max_features_(resolve_max_features(hp.max_features, arity)) {}

  Tree build(std::vector<std::size_t> order, Rng rng) {
    struct Task {
      std::size_t begin, end, depth;
      std::int64_t parent;
      bool is_left;
    };
    Tree tree;
    std::vector<Task> stack{{0, order.size(), 0, -1, false}};
    std::vector<std::size_t> features(arity_);
    auto value = [this](std::size_t i, std::size_t f) { return columns_[f * n_rows_ + i]; };

    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      const auto index = static_cast<std::uint32_t>(tree.nodes.size());
      if (task.parent >= 0) {
        auto& parent = tree.nodes[static_cast<std::size_t>(task.parent)];
        (task.is_left ? parent.left : parent.right) = index;
      }
      tree.depth = std::max(tree.depth, task.depth);

      const std::span<std::size_t> samples(order.data() + task.begin, task.end - task.begin);
      ws_.ys.clear();
      for (std::size_t i : samples) ws_.ys.push_back(y_[i]);
      const auto [lo, hi] = std::minmax_element(ws_.ys.begin(), ws_.ys.end());
      const bool pure = *lo == *hi;
      TreeNode node;
      node.n_samples = samples.size();
      node.value = leaf_value(*lo, *hi);
      node.impurity = pure ? 0.0 : node_impurity(hp_.criterion, ws_);
      tree.nodes.push_back(node);

      const bool can_split = samples.size() >= hp_.min_samples_split &&
                             (!hp_.max_depth || task.depth < *hp_.max_depth) && !pure;
      if (!can_split) continue;

      std::iota(features.begin(), features.end(), 0);
      rng.shuffle(features);
      const auto split = find_split(value, samples, features, max_features_, hp_.criterion,
                                    rng, ws_, nullptr);
      if (!split) continue;

      const auto mid = std::partition(samples.begin(), samples.end(), [&](std::size_t i) {
        return value(i, split->feature) <= split->threshold;
      });
      const std::size_t split_at = task.begin + static_cast<std::size_t>(mid - samples.begin());
      auto& stored = tree.nodes[index];
      stored.feature = static_cast<std::int32_t>(split->feature);
      stored.threshold = split->threshold;
      stack.push_back({split_at, task.end, task.depth + 1, index, false});
      stack.push_back({task.begin, split_at, task.depth + 1, index, true});
    }
    return tree;
  }

 private:
  // Mean of ws_.ys, clamped to the node's range so rounding cannot leave it.
  double leaf_value(double lo, double hi) const {
    if (lo == hi) return lo;
    double sum = 0;
    for (double v : ws_.ys) sum += v;
    return std::clamp(sum / static_cast<double>(ws_.ys.size()), lo, hi);
  }

  const std::vector<double>& columns_;
  std::size_t n_rows_;
  std::size_t arity_;
  std::span<const double> y_;
  const HyperParams& hp_;
  std::size_t max_features_;
  Workspace ws_;
};

std::vector<std::string> default_feature_names(std::size_t arity) {
  if (arity == kFeatureCount) return {kFeatureNames.begin(), kFeatureNames.end()};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < arity; ++i) names.push_back(fmt::format("f{}", i));
  return names;
}

double average_depth(const std::vector<Tree>& trees) {
  if (trees.empty()) return 0;
  double sum = 0;
  for (const Tree& t : trees) sum += static_cast<double>(t.depth);
  return sum / static_cast<double>(trees.size());
}

}  // namespace

std::string_view to_string(MaxFeatures value) {
  switch (value) {
    case MaxFeatures::kAll: return "all";
    case MaxFeatures::kSqrt: return "sqrt";
    case MaxFeatures::kLog2: return "log2";
  }
  return "all";
}

std::string_view to_string(Criterion value) {
  return value == Criterion::kMse ? "mse" : "mae";
}

MaxFeatures parse_max_features(std::string_view text) {
  if (text == "all" || text == "max") return MaxFeatures::kAll;
  if (text == "sqrt") return MaxFeatures::kSqrt;
  if (text == "log2") return MaxFeatures::kLog2;
  throw InvalidArgument(fmt::format("unknown max_features '{}' (all, sqrt, log2)", text));
}

Criterion parse_criterion(std::string_view text) {
  if (text == "mse") return Criterion::kMse;
  if (text == "mae") return Criterion::kMae;
  throw InvalidArgument(fmt::format("unknown criterion '{}' (mse, mae)", text));
}

void HyperParams::validate() const {
  if (n_estimators < 1 || n_estimators > kMaxEstimators) {
    throw InvalidArgument(fmt::format("n_estimators must be in [1, {}], got {}", kMaxEstimators,
                                      n_estimators));
  }
  if (min_samples_split < 2) {
    throw InvalidArgument(fmt::format("min_samples_split must be >= 2, got {}", min_samples_split));
  }
}

std::string HyperParams::describe() const {
  return fmt::format("{}, {} features, {} estimators", to_string(criterion),
                     to_string(max_features), n_estimators);
}

std::size_t resolve_max_features(MaxFeatures mode, std::size_t arity) {
  const double a = static_cast<double>(arity);
  switch (mode) {
    case MaxFeatures::kAll: return arity;
    case MaxFeatures::kSqrt:
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(a))));
    case MaxFeatures::kLog2:
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log2(a))));
  }
  return arity;
}

void FeatureMatrix::add_row(std::span<const double> row) {
  if (row.size() != cols_) {
    throw ArityMismatch(fmt::format("row has {} features, matrix has {}", row.size(), cols_));
  }
  values_.insert(values_.end(), row.begin(), row.end());
}

TrainingSet TrainingSet::from(const Dataset& dataset) {
  TrainingSet set{FeatureMatrix(kFeatureCount), {}};
  set.y.reserve(dataset.size());
  for (const Sample& s : dataset.samples) {
    set.x.add_row(s.features.to_array());
    set.y.push_back(s.target);
  }
  return set;
}

TrainingSet TrainingSet::subset(std::span<const std::size_t> rows) const {
  TrainingSet out{FeatureMatrix(x.cols()), {}};
  out.y.reserve(rows.size());
  for (std::size_t r : rows) {
    out.x.add_row(x.row(r));
    out.y.push_back(y[r]);
  }
  return out;
}

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[i].value;
}

double Forest::predict(std::span<const double> x) const {
  if (x.size() != arity()) {
    throw ArityMismatch(fmt::format("model expects {} features, got {}", arity(), x.size()));
  }
  if (trees.empty()) throw CorruptModel("forest has no trees");
  double sum = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Tree& t : trees) {
    const double v = t.predict(x);
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) return lo;
  return std::clamp(sum / static_cast<double>(trees.size()), lo, hi);
}

double Forest::predict(const FeatureVector& x) const {
  const auto values = x.to_array();
  return predict(std::span<const double>(values));
}

Forest fit(const TrainingSet& data, const HyperParams& hp, TargetKind kind,
           std::vector<std::string> feature_names) {
  hp.validate();
  const std::size_t n = data.size();
  const std::size_t arity = data.x.cols();
  if (data.x.rows() != n) {
    throw LengthMismatch(fmt::format("{} feature rows but {} targets", data.x.rows(), n));
  }
  if (n == 0 || n < hp.min_samples_split) {
    throw EmptyDataset(fmt::format("need at least {} samples to train, got {}",
                                   std::max<std::size_t>(1, hp.min_samples_split), n));
  }
  if (arity == 0) throw ArityMismatch("training rows have no features");
  check_finite(data);
  if (feature_names.empty()) feature_names = default_feature_names(arity);
  if (feature_names.size() != arity) {
    throw ArityMismatch(fmt::format("{} feature names for {} features", feature_names.size(), arity));
  }

  // Canonical row order makes the model independent of input order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = data.x.row(a);
    const auto rb = data.x.row(b);
    const int cmp = std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end())
                        ? -1
                        : (std::equal(ra.begin(), ra.end(), rb.begin()) ? 0 : 1);
    if (cmp != 0) return cmp < 0;
    return data.y[a] < data.y[b];
  });

  std::vector<double> columns(arity * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < arity; ++f) columns[f * n + i] = data.x.at(i, f);
  }

  Forest forest;
  forest.hyper = hp;
  forest.feature_names = std::move(feature_names);
  forest.target_kind = kind;
  forest.trees.resize(hp.n_estimators);
  parallel_for(hp.n_estimators, [&](std::size_t t) {
    TreeBuilder builder(columns, n, arity, data.y, hp);
    forest.trees[t] = builder.build(order, Rng(derive_seed(hp.seed, {t})));
  });
  forest.avg_depth = average_depth(forest.trees);
  return forest;
}

Forest fit(const Dataset& dataset, const HyperParams& hp) {
  return fit(TrainingSet::from(dataset), hp, dataset.kind);
}

void truncate(Forest& forest, std::size_t n_trees) {
  if (n_trees == 0 || n_trees > forest.trees.size()) {
    throw InvalidArgument(fmt::format("cannot keep {} of {} trees", n_trees, forest.trees.size()));
  }
  forest.trees.resize(n_trees);
  forest.hyper.n_estimators = n_trees;
  forest.avg_depth = average_depth(forest.trees);
}

std::optional<SplitCandidate> best_random_split(const FeatureMatrix& x, std::span<const double> y,
                                                std::span<const std::size_t> node_samples,
                                                std::span<const std::size_t> feature_order,
                                                std::size_t max_candidates, Criterion criterion,
                                                Rng& rng, std::vector<SplitCandidate>* drawn) {
  for (std::size_t f : feature_order) {
    if (f >= x.cols()) throw ArityMismatch(fmt::format("feature {} out of range", f));
  }
  Workspace ws;
  for (std::size_t i : node_samples) ws.ys.push_back(y[i]);
  return find_split([&](std::size_t i, std::size_t f) { return x.at(i, f); }, node_samples,
                    feature_order, max_candidates, criterion, rng, ws, drawn);
}

std::vector<double> feature_importance(const Forest& forest) {
  const std::size_t arity = forest.arity();
  std::vector<double> total(arity, 0.0);
  std::size_t contributing = 0;
  for (const Tree& tree : forest.trees) {
    std::vector<double> per_tree(arity, 0.0);
    double sum = 0;
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) continue;
      const TreeNode& l = tree.nodes[node.left];
      const TreeNode& r = tree.nodes[node.right];
      const double decrease = static_cast<double>(node.n_samples) * node.impurity -
                              static_cast<double>(l.n_samples) * l.impurity -
                              static_cast<double>(r.n_samples) * r.impurity;
      const double gain = std::max(0.0, decrease);
      per_tree[static_cast<std::size_t>(node.feature)] += gain;
      sum += gain;
    }
    if (!(sum > 0)) continue;
    ++contributing;
    for (std::size_t f = 0; f < arity; ++f) total[f] += per_tree[f] / sum;
  }
  if (contributing == 0) {
    warn("forest has no splits; feature importance is uniform");
    return std::vector<double>(arity, 1.0 / static_cast<double>(arity));
  }
  const double norm = std::accumulate(total.begin(), total.end(), 0.0);
  for (double& v : total) v /= norm;
  return total;
}

std::string serialize(const Forest& forest) {
  const HyperParams& hp = forest.hyper;
  std::string out = fmt::format("kperf-forest v{}\n", kModelFormatVersion);
  out += fmt::format("target_kind {}\n", to_string(forest.target_kind));
  out += fmt::format("n_estimators {}\n", hp.n_estimators);
  out += fmt::format("max_features {}\n", to_string(hp.max_features));
  out += fmt::format("criterion {}\n", to_string(hp.criterion));
  out += fmt::format("min_samples_split {}\n", hp.min_samples_split);
  out += fmt::format("max_depth {}\n", hp.max_depth ? std::to_string(*hp.max_depth) : "none");
  out += fmt::format("seed {}\n", hp.seed);
  std::string names;
  for (std::size_t i = 0; i < forest.feature_names.size(); ++i) {
    names += (i ? "," : "") + forest.feature_names[i];
  }
  out += fmt::format("features {}\n", names);
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const Tree& tree = forest.trees[t];
    out += fmt::format("tree {} {}\n", t, tree.nodes.size());
    for (const TreeNode& n : tree.nodes) {
      if (n.is_leaf()) {
        out += fmt::format("L {} {} {}\n", format_double(n.value), n.n_samples,
                           format_double(n.impurity));
      } else {
        out += fmt::format("S {} {} {} {} {}\n", n.feature, format_double(n.threshold),
                           n.n_samples, format_double(n.impurity), format_double(n.value));
      }
    }
  }
  out += "end\n";
  return out;
}

namespace {

class ModelReader {
 public:
  explicit ModelReader(std::string_view text) : lines_(split(text, '\n')) {}

  std::size_t line_no() const { return pos_; }

  std::vector<std::string_view> next() {
    while (pos_ < lines_.size()) {
      std::string_view line = lines_[pos_++];
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      return split(line, ' ');
    }
    fail("unexpected end of model");
  }

  std::string_view field(std::string_view key) {
    const auto tokens = next();
    if (tokens.size() != 2 || tokens[0] != key) fail(fmt::format("expected '{} <value>'", key));
    return tokens[1];
  }

  template <typename Fn>
  auto guard(Fn&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const CorruptModel&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  [[noreturn]] void fail(std::string_view message) const {
    throw CorruptModel(fmt::format("model line {}: {}", pos_, message));
  }

 private:
  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
};

// Links pre-order nodes to their children and computes the tree depth.
void link_preorder(Tree& tree, ModelReader& reader) {
  std::vector<std::size_t> pending;  // internal nodes still missing a right child
  std::vector<std::size_t> depth(tree.nodes.size(), 0);
  if (!tree.nodes[0].is_leaf()) pending.push_back(0);
  for (std::size_t pos = 1; pos < tree.nodes.size(); ++pos) {
    std::size_t parent;
    if (!tree.nodes[pos - 1].is_leaf()) {
      parent = pos - 1;
      tree.nodes[parent].left = static_cast<std::uint32_t>(pos);
    } else {
      if (pending.empty()) reader.fail("tree has more nodes than its splits allow");
      parent = pending.back();
      pending.pop_back();
      tree.nodes[parent].right = static_cast<std::uint32_t>(pos);
    }
    depth[pos] = depth[parent] + 1;
    if (!tree.nodes[pos].is_leaf()) pending.push_back(pos);
  }
  if (!pending.empty()) reader.fail("tree ends before all splits have children");
  tree.depth = *std::max_element(depth.begin(), depth.end());
}

}  // namespace

Forest deserialize(std::string_view text) {
  if (text.empty()) throw CorruptModel("empty model");
  ModelReader in(text);
  const auto header = in.next();
  if (header.size() != 2 || header[0] != "kperf-forest" || header[1].size() < 2 ||
      header[1][0] != 'v') {
    in.fail("not a kperf forest model");
  }
  const auto version = in.guard([&] { return parse_uint(header[1].substr(1), "version"); });
  if (version != kModelFormatVersion) {
    throw VersionMismatch(fmt::format("model format v{} is not supported (expected v{})", version,
                                      kModelFormatVersion));
  }

  Forest forest;
  in.guard([&] {
    forest.target_kind = parse_target_kind(in.field("target_kind"));
    forest.hyper.n_estimators = parse_uint(in.field("n_estimators"), "n_estimators");
    forest.hyper.max_features = parse_max_features(in.field("max_features"));
    forest.hyper.criterion = parse_criterion(in.field("criterion"));
    forest.hyper.min_samples_split = parse_uint(in.field("min_samples_split"), "min_samples_split");
    const auto depth = in.field("max_depth");
    if (depth != "none") forest.hyper.max_depth = parse_uint(depth, "max_depth");
    forest.hyper.seed = parse_uint(in.field("seed"), "seed");
    for (auto name : split(in.field("features"), ',')) forest.feature_names.emplace_back(name);
    forest.hyper.validate();
    return 0;
  });
  const std::size_t arity = forest.arity();

  for (std::size_t t = 0; t < forest.hyper.n_estimators; ++t) {
    const auto tree_header = in.next();
    if (tree_header.size() != 3 || tree_header[0] != "tree") in.fail("expected 'tree <i> <nodes>'");
    const auto count = in.guard([&] {
      if (parse_uint(tree_header[1], "tree index") != t) in.fail("trees out of order");
      return parse_uint(tree_header[2], "node count");
    });
    if (count == 0) in.fail("tree without nodes");
    Tree tree;
    tree.nodes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto tok = in.next();
      TreeNode node;
      in.guard([&] {
        if (tok.size() == 4 && tok[0] == "L") {
          node.value = parse_double(tok[1], "leaf value");
          node.n_samples = parse_uint(tok[2], "samples");
          node.impurity = parse_double(tok[3], "impurity");
        } else if (tok.size() == 6 && tok[0] == "S") {
          const auto feature = parse_uint(tok[1], "feature");
          if (feature >= arity) in.fail(fmt::format("feature {} out of range", feature));
          node.feature = static_cast<std::int32_t>(feature);
          node.threshold = parse_double(tok[2], "threshold");
          node.n_samples = parse_uint(tok[3], "samples");
          node.impurity = parse_double(tok[4], "impurity");
          node.value = parse_double(tok[5], "value");
        } else {
          in.fail("malformed node");
        }
        return 0;
      });
      tree.nodes.push_back(node);
    }
    link_preorder(tree, in);
    forest.trees.push_back(std::move(tree));
  }
  const auto trailer = in.next();
  if (trailer.size() != 1 || trailer[0] != "end") in.fail("expected 'end'");
  forest.avg_depth = average_depth(forest.trees);
  return forest;
}

}  // namespace kperf
