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

// One function per CLI subcommand. Each reads its input files, writes its
// outputs and returns a short summary for the terminal. Output files depend
// only on the inputs and flags; wall-clock latencies are returned, never
// written to disk.

#ifndef KPERF_PIPELINE_HPP_
#define KPERF_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kperf/dataset.hpp"
#include "kperf/evaluation.hpp"
#include "kperf/extra_trees.hpp"

namespace kperf {

namespace fs = std::filesystem;

struct ExtractOptions {
  std::vector<fs::path> ptx_files;
  fs::path out;
};
// DuplicateKey if two inputs define the same kernel.
std::string cmd_extract(const ExtractOptions& opts);

struct FeaturesOptions {
  fs::path block_summary;
  fs::path trace;
  fs::path out;
};
std::string cmd_features(const FeaturesOptions& opts);

struct BuildOptions {
  fs::path features;
  fs::path measurements;  // time or power table, per `kind`
  fs::path out;
  TargetKind kind = TargetKind::kTime;
  std::size_t threshold = kDefaultCapThreshold;
  std::uint64_t seed = kDefaultSeed;
  double trim_ms = 0;
};
std::string cmd_build(const BuildOptions& opts);

struct TrainOptions {
  fs::path dataset;
  fs::path out;
  HyperParams hyper;
};
std::string cmd_train(const TrainOptions& opts);

// Writes into `out_dir`: scores.csv (outer folds), inner_scores.csv,
// grid.csv, summary.csv, best_hyperparams.csv and plot/ data.
struct EvaluateOptions {
  fs::path dataset;
  fs::path out_dir;
  GridSpec grid;
  CvOptions cv;
};
std::string cmd_evaluate(const EvaluateOptions& opts);

// Writes loo_predictions.csv and loo_summary.csv into `out_dir`.
struct LooOptions {
  fs::path dataset;
  fs::path out_dir;
  HyperParams hyper;
};
std::string cmd_loo(const LooOptions& opts);

struct PredictOptions {
  fs::path model;
  fs::path features;
  fs::path out;
};
// Predictions in raw units; the summary carries the mean per-call latency.
std::string cmd_predict(const PredictOptions& opts);

struct ImportanceOptions {
  fs::path model;
  fs::path out;
};
std::string cmd_importance(const ImportanceOptions& opts);

struct LatencyOptions {
  fs::path model;
  fs::path features;  // probe rows
  std::size_t repetitions = 100;
};
std::string cmd_latency(const LatencyOptions& opts);

Forest read_model(const fs::path& path);

}  // namespace kperf

#endif  // KPERF_PIPELINE_HPP_
