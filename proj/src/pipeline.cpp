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

#include "kperf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>

#include <fmt/core.h>

#include "kperf/error.hpp"
#include "kperf/io.hpp"
#include "kperf/ptx.hpp"
#include "kperf/tabular.hpp"

namespace kperf {
namespace {

using Row = std::vector<std::string>;

void push_key(Row& row, const LaunchKey& key) {
  row.push_back(key.benchmark);
  row.push_back(key.dataset);
  row.push_back(key.kernel);
  row.push_back(std::to_string(key.launch_seq));
}

Row key_columns_plus(std::initializer_list<const char*> extra) {
  Row cols(kKeyColumns.begin(), kKeyColumns.end());
  for (const char* c : extra) cols.emplace_back(c);
  return cols;
}

std::string_view unit(TargetKind kind) { return kind == TargetKind::kTime ? "us" : "W"; }

void add_buckets(Table& t, const ErrorBuckets& b) {
  for (std::size_t i = 0; i < b.counts.size(); ++i) {
    t.rows.push_back({ErrorBuckets::label(i), std::to_string(b.counts[i]),
                      format_double(b.fractions[i])});
  }
}

Table bucket_table(const ErrorBuckets& b) {
  Table t;
  t.format = "error-buckets";
  t.columns = {"bucket", "count", "fraction"};
  add_buckets(t, b);
  return t;
}

void report_keys(std::string_view what, const std::vector<LaunchKey>& keys) {
  if (keys.empty()) return;
  warn(fmt::format("{} {}, first: {}", keys.size(), what, to_string(keys.front())));
}

}  // namespace

Forest read_model(const fs::path& path) { return deserialize(read_file(path)); }

std::string cmd_extract(const ExtractOptions& opts) {
  if (opts.ptx_files.empty()) throw InvalidArgument("no PTX files given");
  std::vector<ptx::KernelCode> kernels;
  std::map<std::string, std::string> owner;
  Table meta;
  std::size_t skipped = 0;
  std::size_t unclassified = 0;
  for (const fs::path& path : opts.ptx_files) {
    const std::string text = read_file(path);
    ptx::PtxModule module = ptx::parse_ptx(text, path.filename().string());
    for (ptx::KernelCode& k : module.kernels) {
      auto [it, inserted] = owner.emplace(k.name, path.filename().string());
      if (!inserted) {
        throw DuplicateKey(fmt::format("kernel '{}' defined in both {} and {}", k.name,
                                       it->second, path.filename().string()));
      }
      kernels.push_back(std::move(k));
    }
    meta.metadata.emplace_back("source", provenance_entry("ptx", path, text));
    skipped += module.report.skipped_directives;
    unclassified += module.report.unclassified_instructions;
  }
  Table t = block_summary_table(kernels);
  t.metadata = std::move(meta.metadata);
  t.metadata.emplace_back("skipped_directives", std::to_string(skipped));
  t.metadata.emplace_back("unclassified_instructions", std::to_string(unclassified));
  write_table_file(opts.out, t);
  return fmt::format("extracted {} kernels, {} blocks -> {}", kernels.size(), t.rows.size(),
                     opts.out.string());
}

std::string cmd_features(const FeaturesOptions& opts) {
  const std::vector<ptx::KernelCode> kernels = read_block_summary(opts.block_summary);
  std::map<std::string, const ptx::KernelCode*> by_name;
  for (const auto& k : kernels) by_name.emplace(k.name, &k);
  const std::vector<TraceRecord> traces = read_trace(opts.trace);
  std::vector<FeatureRecord> records;
  records.reserve(traces.size());
  for (const TraceRecord& rec : traces) {
    auto it = by_name.find(rec.trace.key.kernel);
    if (it == by_name.end()) {
      throw KeyMismatch(fmt::format("{}: kernel '{}' is not in {}", to_string(rec.trace.key),
                                    rec.trace.key.kernel, opts.block_summary.filename().string()));
    }
    records.push_back({rec.trace.key, rec.config.shared_mem_bytes,
                       build_feature_vector(*it->second, rec.trace, rec.config)});
  }
  Table t = features_table(records);
  t.metadata.emplace_back("source", provenance_entry("block-summary", opts.block_summary,
                                                     read_file(opts.block_summary)));
  t.metadata.emplace_back("source", provenance_entry("trace", opts.trace, read_file(opts.trace)));
  write_table_file(opts.out, t);
  return fmt::format("{} feature vectors -> {}", records.size(), opts.out.string());
}

std::string cmd_build(const BuildOptions& opts) {
  const std::vector<FeatureRecord> features = read_features(opts.features);
  BuildReport report;
  Dataset ds;
  if (opts.kind == TargetKind::kTime) {
    ds = build_time_dataset(features, read_time(opts.measurements), opts.threshold, opts.seed,
                            &report);
  } else {
    ds = build_power_dataset(features, read_power(opts.measurements), opts.threshold, opts.seed,
                             opts.trim_ms, &report);
  }
  if (ds.size() == 0) throw EmptyDataset("no launch has both features and measurements");
  ds.provenance.push_back(provenance_entry("features", opts.features, read_file(opts.features)));
  ds.provenance.push_back(
      provenance_entry("measurements", opts.measurements, read_file(opts.measurements)));
  report_keys("feature records without measurements", report.unmatched_features);
  report_keys("measurements without feature records", report.unmatched_measurements);
  report_keys("samples with coefficient of variation above 1", report.high_cv);

  Table t = dataset_table(ds);
  t.metadata.emplace_back("cap_threshold", std::to_string(opts.threshold));
  t.metadata.emplace_back("seed", std::to_string(opts.seed));
  if (opts.kind == TargetKind::kPower) t.metadata.emplace_back("trim_ms", format_double(opts.trim_ms));
  write_table_file(opts.out, t);
  return fmt::format("{} {} samples from {} groups ({} dropped by cap, {} unmatched) -> {}",
                     ds.size(), to_string(ds.kind), report.groups, report.dropped_by_cap,
                     report.unmatched_features.size() + report.unmatched_measurements.size(),
                     opts.out.string());
}

std::string cmd_train(const TrainOptions& opts) {
  const Dataset ds = read_dataset(opts.dataset);
  const Forest forest = fit(ds, opts.hyper);
  write_file(opts.out, serialize(forest));
  return fmt::format("trained {} on {} samples (average depth {:.1f}) -> {}",
                     opts.hyper.describe(), ds.size(), forest.avg_depth, opts.out.string());
}

std::string cmd_evaluate(const EvaluateOptions& opts) {
  const Dataset ds = read_dataset(opts.dataset);
  const std::vector<HyperParams> grid = make_grid(opts.grid);
  const CvReport report = nested_cv(ds, grid, opts.cv);
  const fs::path& dir = opts.out_dir;

  Table outer;
  outer.format = "cv-outer";
  outer.columns = {"iteration", "outer_fold", "grid_index", "mape", "avg_depth"};
  for (const OuterScore& s : report.outer_scores) {
    outer.rows.push_back({std::to_string(s.iteration), std::to_string(s.outer_fold),
                          std::to_string(s.grid_index), format_double(s.mape),
                          format_double(s.avg_depth)});
  }
  write_table_file(dir / "scores.csv", outer);

  Table inner;
  inner.format = "cv-inner";
  inner.columns = {"iteration", "outer_fold", "inner_fold", "grid_index", "mape"};
  for (const InnerScore& s : report.inner_scores) {
    inner.rows.push_back({std::to_string(s.iteration), std::to_string(s.outer_fold),
                          std::to_string(s.inner_fold), std::to_string(s.grid_index),
                          format_double(s.mape)});
  }
  write_table_file(dir / "inner_scores.csv", inner);

  Table grid_t;
  grid_t.format = "grid";
  grid_t.columns = {"grid_index", "n_estimators", "max_features", "criterion"};
  for (std::size_t it = 0; it < opts.cv.iterations; ++it) {
    grid_t.columns.push_back(fmt::format("mean_inner_iter{}", it));
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    Row row{std::to_string(g), std::to_string(grid[g].n_estimators),
            std::string(to_string(grid[g].max_features)),
            std::string(to_string(grid[g].criterion))};
    for (std::size_t it = 0; it < opts.cv.iterations; ++it) {
      row.push_back(format_double(report.mean_inner(it, g)));
    }
    grid_t.rows.push_back(std::move(row));
  }
  write_table_file(dir / "grid.csv", grid_t);

  Table summary;
  summary.format = "cv-summary";
  summary.columns = {"key", "value"};
  summary.metadata = {{"target_kind", std::string(to_string(ds.kind))},
                      {"seed", std::to_string(opts.cv.seed)}};
  auto put = [&](std::string key, std::string value) {
    summary.rows.push_back({std::move(key), std::move(value)});
  };
  put("samples", std::to_string(ds.size()));
  put("iterations", std::to_string(opts.cv.iterations));
  put("k_outer", std::to_string(opts.cv.k_outer));
  put("k_inner", std::to_string(opts.cv.k_inner));
  put("median_mape", format_double(report.fold_stats.median));
  put("q1_mape", format_double(report.fold_stats.q1));
  put("q3_mape", format_double(report.fold_stats.q3));
  put("best_grid_index", std::to_string(report.best));
  put("best_n_estimators", std::to_string(grid[report.best].n_estimators));
  put("best_max_features", std::string(to_string(grid[report.best].max_features)));
  put("best_criterion", std::string(to_string(grid[report.best].criterion)));
  for (std::size_t it = 0; it < report.selected.size(); ++it) {
    put(fmt::format("selected_iter{}", it), std::to_string(report.selected[it]));
  }
  put("avg_depth", format_double(report.avg_depth));
  for (std::size_t b = 0; b < report.buckets.counts.size(); ++b) {
    put(fmt::format("bucket {}", ErrorBuckets::label(b)), format_double(report.buckets.fractions[b]));
  }
  write_table_file(dir / "summary.csv", summary);

  HyperParams best = grid[report.best];
  best.seed = opts.cv.seed;
  write_table_file(dir / "best_hyperparams.csv", hyperparams_table(best));

  write_table_file(dir / "plot" / "error_buckets.csv", bucket_table(report.buckets));
  Table scatter;
  scatter.format = "scatter";
  scatter.columns = key_columns_plus({"iteration", "outer_fold", "truth", "predicted"});
  scatter.metadata = {{"unit", std::string(unit(ds.kind))}};
  for (const Prediction& p : report.predictions) {
    Row row;
    push_key(row, ds.samples[p.sample].key);
    row.push_back(std::to_string(p.iteration));
    row.push_back(std::to_string(p.outer_fold));
    row.push_back(format_double(p.truth));
    row.push_back(format_double(p.predicted));
    scatter.rows.push_back(std::move(row));
  }
  write_table_file(dir / "plot" / "scatter.csv", scatter);

  std::string out = fmt::format(
      "median fold MAPE {:.3f}% (IQR {:.3f}-{:.3f}) over {} folds; best {} -> {}",
      report.fold_stats.median, report.fold_stats.q1, report.fold_stats.q3,
      report.outer_scores.size(), grid[report.best].describe(), dir.string());
  if (report.latency) {
    out += fmt::format("\nprediction latency: mean {:.4f} ms, p95 {:.4f} ms over {} calls",
                       report.latency->mean_ms, report.latency->p95_ms,
                       report.latency->repetitions);
  }
  return out;
}

std::string cmd_loo(const LooOptions& opts) {
  const Dataset ds = read_dataset(opts.dataset);
  const LooReport report = leave_one_out(ds, opts.hyper);

  Table preds;
  preds.format = "loo-predictions";
  preds.columns = key_columns_plus({"truth", "predicted", "train_size"});
  preds.metadata = {{"unit", std::string(unit(ds.kind))}};
  for (const LooEntry& e : report.entries) {
    Row row;
    push_key(row, ds.samples[e.sample].key);
    row.push_back(format_double(e.truth));
    row.push_back(format_double(e.predicted));
    row.push_back(std::to_string(e.train_size));
    preds.rows.push_back(std::move(row));
  }
  write_table_file(opts.out_dir / "loo_predictions.csv", preds);

  Table summary = bucket_table(report.buckets);
  summary.format = "loo-summary";
  summary.metadata = {{"mape", format_double(report.mape)}};
  for (const auto& row : hyperparams_table(opts.hyper).rows) {
    summary.metadata.emplace_back(row[0], row[1]);
  }
  write_table_file(opts.out_dir / "loo_summary.csv", summary);
  return fmt::format("leave-one-out over {} samples: MAPE {:.3f}% -> {}", report.entries.size(),
                     report.mape, opts.out_dir.string());
}

std::string cmd_predict(const PredictOptions& opts) {
  const Forest forest = read_model(opts.model);
  const std::vector<FeatureRecord> records = read_features(opts.features);
  Table t;
  t.format = "predictions";
  t.columns = key_columns_plus({"predicted"});
  t.metadata = {{"target_kind", std::string(to_string(forest.target_kind))},
                {"unit", std::string(unit(forest.target_kind))}};
  double total_ms = 0;
  for (const FeatureRecord& rec : records) {
    const auto start = std::chrono::steady_clock::now();
    const double pred = forest.predict(rec.features);
    total_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
    Row row;
    push_key(row, rec.key);
    row.push_back(format_double(inverse_transform(pred, forest.target_kind)));
    t.rows.push_back(std::move(row));
  }
  write_table_file(opts.out, t);
  const double mean = records.empty() ? 0.0 : total_ms / static_cast<double>(records.size());
  return fmt::format("{} predictions -> {} (mean latency {:.4f} ms per call)", records.size(),
                     opts.out.string(), mean);
}

std::string cmd_importance(const ImportanceOptions& opts) {
  const Forest forest = read_model(opts.model);
  const std::vector<double> imp = feature_importance(forest);
  Table t;
  t.format = "importance";
  t.columns = {"feature", "label", "importance_percent"};
  const bool canonical = forest.feature_names.size() == kFeatureCount &&
                         std::equal(forest.feature_names.begin(), forest.feature_names.end(),
                                    kFeatureNames.begin());
  for (std::size_t f = 0; f < imp.size(); ++f) {
    t.rows.push_back({forest.feature_names[f],
                      canonical ? std::string(kFeatureLabels[f]) : forest.feature_names[f],
                      format_double(100.0 * imp[f])});
  }
  write_table_file(opts.out, t);
  const auto top = static_cast<std::size_t>(
      std::max_element(imp.begin(), imp.end()) - imp.begin());
  return fmt::format("most important: {} ({:.2f}%) -> {}", forest.feature_names[top],
                     100.0 * imp[top], opts.out.string());
}

std::string cmd_latency(const LatencyOptions& opts) {
  const Forest forest = read_model(opts.model);
  FeatureMatrix probes(forest.arity());
  for (const FeatureRecord& rec : read_features(opts.features)) {
    const auto row = rec.features.to_array();
    probes.add_row(row);
  }
  const LatencyStats s = measure_latency(forest, probes, opts.repetitions);
  return fmt::format(
      "{} trees, average depth {:.1f}: mean {:.4f} ms, p50 {:.4f} ms, p95 {:.4f} ms, "
      "max {:.4f} ms, stddev {:.4f} ms over {} calls",
      forest.trees.size(), forest.avg_depth, s.mean_ms, s.p50_ms, s.p95_ms, s.max_ms,
      s.stddev_ms, s.repetitions);
}

}  // namespace kperf
