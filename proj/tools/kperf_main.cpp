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

// kperf command-line entry point.
//
// Failures are reported on stderr as one record `error,<kind>,<message>`;
// the exit code is 1 for runtime errors and 2 for usage errors.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kperf/error.hpp"
#include "kperf/io.hpp"
#include "kperf/pipeline.hpp"

namespace {

constexpr int kRuntimeExit = 1;
constexpr int kUsageExit = 2;

void print_error(std::string_view kind, std::string message) {
  std::replace(message.begin(), message.end(), '\n', ' ');
  std::cerr << "error," << kind << ',' << message << '\n';
}

struct HyperFlags {
  std::string file;
  std::size_t estimators = 128;
  std::string max_features = "all";
  std::string criterion = "mse";
  std::size_t min_samples_split = 2;
  std::size_t max_depth = 0;
  std::uint64_t seed = kperf::kDefaultSeed;
  std::vector<CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("--hyperparams", file, "hyperparams file, e.g. best_hyperparams.csv")
        ->check(CLI::ExistingFile);
    options = {
        app->add_option("--estimators", estimators, "number of trees (1-1024)"),
        app->add_option("--max-features", max_features, "all, sqrt or log2"),
        app->add_option("--criterion", criterion, "mse or mae"),
        app->add_option("--min-samples-split", min_samples_split, "minimum samples to split"),
        app->add_option("--max-depth", max_depth, "depth limit, 0 for none"),
        app->add_option("--seed", seed, "random seed"),
    };
  }

  // The file supplies defaults; flags given on the command line win.
  kperf::HyperParams resolve() const {
    kperf::HyperParams hp;
    if (!file.empty()) hp = kperf::read_hyperparams(file);
    const bool from_file = !file.empty();
    auto given = [&](std::size_t i) { return !from_file || options[i]->count() > 0; };
    if (given(0)) hp.n_estimators = estimators;
    if (given(1)) hp.max_features = kperf::parse_max_features(max_features);
    if (given(2)) hp.criterion = kperf::parse_criterion(criterion);
    if (given(3)) hp.min_samples_split = min_samples_split;
    if (given(4)) {
      hp.max_depth.reset();
      if (max_depth > 0) hp.max_depth = max_depth;
    }
    if (given(5)) hp.seed = seed;
    hp.validate();
    return hp;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kperf: predict GPU kernel time and power from PTX features"};
  app.require_subcommand(1);
  std::string command_output;
  std::function<std::string()> run;

  kperf::ExtractOptions extract;
  auto* c_extract = app.add_subcommand("extract", "PTX files -> block-summary file");
  c_extract->add_option("ptx", extract.ptx_files, "PTX input files")
      ->required()
      ->check(CLI::ExistingFile);
  c_extract->add_option("-o,--out", extract.out, "block-summary output")->required();
  c_extract->callback([&] { run = [&] { return kperf::cmd_extract(extract); }; });

  kperf::FeaturesOptions features;
  auto* c_features = app.add_subcommand("features", "block summary + trace -> features file");
  c_features->add_option("--block-summary", features.block_summary)->required()
      ->check(CLI::ExistingFile);
  c_features->add_option("--trace", features.trace)->required()->check(CLI::ExistingFile);
  c_features->add_option("-o,--out", features.out)->required();
  c_features->callback([&] { run = [&] { return kperf::cmd_features(features); }; });

  kperf::BuildOptions build;
  std::string build_kind = "time";
  auto* c_build = app.add_subcommand("build", "features + measurements -> dataset file");
  c_build->add_option("--features", build.features)->required()->check(CLI::ExistingFile);
  c_build->add_option("--measurements", build.measurements, "time or power table")
      ->required()
      ->check(CLI::ExistingFile);
  c_build->add_option("--kind", build_kind, "time or power")
      ->check(CLI::IsMember({"time", "power"}));
  c_build->add_option("--threshold", build.threshold, "samples kept per kernel")
      ->check(CLI::PositiveNumber);
  c_build->add_option("--seed", build.seed, "random seed for capping");
  c_build->add_option("--trim-ms", build.trim_ms, "power warm-up to discard per run");
  c_build->add_option("-o,--out", build.out)->required();
  c_build->callback([&] {
    run = [&] {
      build.kind = kperf::parse_target_kind(build_kind);
      return kperf::cmd_build(build);
    };
  });

  kperf::TrainOptions train;
  HyperFlags train_hp;
  auto* c_train = app.add_subcommand("train", "dataset -> model file");
  c_train->add_option("--dataset", train.dataset)->required()->check(CLI::ExistingFile);
  c_train->add_option("-o,--out", train.out)->required();
  train_hp.attach(c_train);
  c_train->callback([&] {
    run = [&] {
      train.hyper = train_hp.resolve();
      return kperf::cmd_train(train);
    };
  });

  kperf::EvaluateOptions evaluate;
  std::vector<std::size_t> grid_estimators;
  std::vector<std::string> grid_features;
  std::vector<std::string> grid_criteria;
  auto* c_eval = app.add_subcommand("evaluate", "nested cross-validation over a grid");
  c_eval->add_option("--dataset", evaluate.dataset)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--out-dir", evaluate.out_dir)->required();
  c_eval->add_option("--estimators", grid_estimators, "grid override: tree counts");
  c_eval->add_option("--max-features", grid_features, "grid override: all sqrt log2");
  c_eval->add_option("--criteria", grid_criteria, "grid override: mse mae");
  c_eval->add_option("--outer-folds", evaluate.cv.k_outer)->check(CLI::Range(2, 1000));
  c_eval->add_option("--inner-folds", evaluate.cv.k_inner)->check(CLI::Range(2, 1000));
  c_eval->add_option("--iterations", evaluate.cv.iterations)->check(CLI::PositiveNumber);
  c_eval->add_option("--seed", evaluate.cv.seed);
  c_eval->add_flag("--latency", evaluate.cv.measure_latency,
                   "also time the best configuration (printed, not written)");
  c_eval->add_option("--latency-reps", evaluate.cv.latency_repetitions)
      ->check(CLI::Range(std::size_t{30}, std::size_t{1000000}));
  c_eval->callback([&] {
    run = [&] {
      if (!grid_estimators.empty()) evaluate.grid.estimators = grid_estimators;
      if (!grid_features.empty()) {
        evaluate.grid.max_features.clear();
        for (const auto& f : grid_features) {
          evaluate.grid.max_features.push_back(kperf::parse_max_features(f));
        }
      }
      if (!grid_criteria.empty()) {
        evaluate.grid.criteria.clear();
        for (const auto& c : grid_criteria) {
          evaluate.grid.criteria.push_back(kperf::parse_criterion(c));
        }
      }
      return kperf::cmd_evaluate(evaluate);
    };
  });

  kperf::LooOptions loo;
  HyperFlags loo_hp;
  auto* c_loo = app.add_subcommand("loo", "leave-one-out predictions");
  c_loo->add_option("--dataset", loo.dataset)->required()->check(CLI::ExistingFile);
  c_loo->add_option("--out-dir", loo.out_dir)->required();
  loo_hp.attach(c_loo);
  c_loo->callback([&] {
    run = [&] {
      loo.hyper = loo_hp.resolve();
      return kperf::cmd_loo(loo);
    };
  });

  kperf::PredictOptions predict;
  auto* c_predict = app.add_subcommand("predict", "model + features -> predictions");
  c_predict->add_option("--model", predict.model)->required()->check(CLI::ExistingFile);
  c_predict->add_option("--features", predict.features)->required()->check(CLI::ExistingFile);
  c_predict->add_option("-o,--out", predict.out)->required();
  c_predict->callback([&] { run = [&] { return kperf::cmd_predict(predict); }; });

  kperf::ImportanceOptions importance;
  auto* c_imp = app.add_subcommand("importance", "feature importance table of a model");
  c_imp->add_option("--model", importance.model)->required()->check(CLI::ExistingFile);
  c_imp->add_option("-o,--out", importance.out)->required();
  c_imp->callback([&] { run = [&] { return kperf::cmd_importance(importance); }; });

  kperf::LatencyOptions latency;
  auto* c_lat = app.add_subcommand("latency", "time single-sample predictions");
  c_lat->add_option("--model", latency.model)->required()->check(CLI::ExistingFile);
  c_lat->add_option("--features", latency.features, "probe rows")
      ->required()
      ->check(CLI::ExistingFile);
  c_lat->add_option("--repetitions", latency.repetitions)
      ->check(CLI::Range(std::size_t{30}, std::size_t{100000000}));
  c_lat->callback([&] { run = [&] { return kperf::cmd_latency(latency); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kUsageExit;
  }

  try {
    std::cout << run() << '\n';
  } catch (const kperf::Error& e) {
    print_error(e.kind(), e.what());
    return kRuntimeExit;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kRuntimeExit;
  }
  return EXIT_SUCCESS;
}
