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

#include <set>

#include "kperf/error.hpp"
#include "kperf/io.hpp"
#include "kperf/pipeline.hpp"
#include "kperf/tabular.hpp"
#include "test_support.hpp"

namespace kperf {
namespace {

namespace fs = std::filesystem;

// Runs extract, features and build for the time target into `dir`.
void front_half(const fs::path& dir) {
  cmd_extract({{testing::corpus_dir() / "kernels.ptx"}, dir / "blocks.csv"});
  cmd_features({dir / "blocks.csv", testing::corpus_dir() / "trace.csv", dir / "features.csv"});
  BuildOptions b;
  b.features = dir / "features.csv";
  b.measurements = testing::corpus_dir() / "time.csv";
  b.out = dir / "dataset.csv";
  cmd_build(b);
}

TEST_CASE("extracted block summary matches the hand-counted table") {
  const auto dir = testing::scratch("pipe_extract");
  cmd_extract({{testing::corpus_dir() / "kernels.ptx"}, dir / "blocks.csv"});
  const auto kernels = read_block_summary(dir / "blocks.csv");
  for (const auto& row : testing::expected_blocks()) {
    const auto it = std::find_if(kernels.begin(), kernels.end(),
                                 [&](const auto& k) { return k.name == row.kernel; });
    REQUIRE(it != kernels.end());
    const auto& b = it->blocks.at(row.block);
    CHECK(b.counts.total == row.values[0]);
    CHECK(b.counts.arithmetic == row.values[1]);
    CHECK(b.mem.global_bytes == row.values[6]);
    CHECK(b.mem.local_bytes == row.values[9]);
  }
  const Table t = read_table_file(dir / "blocks.csv", "block-summary", 1);
  CHECK(t.meta("skipped_directives") != "");

  CHECK_THROWS_AS(cmd_extract({{testing::corpus_dir() / "kernels.ptx",
                                testing::corpus_dir() / "kernels.ptx"},
                               dir / "dup.csv"}),
                  DuplicateKey);
}

TEST_CASE("features agree with the frequency-weighted block table") {
  const auto dir = testing::scratch("pipe_features");
  front_half(dir);
  std::map<std::string, std::vector<testing::ExpectedBlock>> blocks;
  for (auto& row : testing::expected_blocks()) blocks[row.kernel].push_back(row);
  const auto traces = read_trace(testing::corpus_dir() / "trace.csv");
  const auto features = read_features(dir / "features.csv");
  REQUIRE(features.size() == traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& tr = traces[i];
    CHECK(features[i].key == tr.trace.key);
    std::vector<double> sums(10, 0.0);
    for (const auto& [b, freq] : tr.trace.freqs) {
      const auto& row = blocks.at(tr.trace.key.kernel).at(b);
      for (std::size_t c = 0; c < 10; ++c) sums[c] += static_cast<double>(freq * row.values[c]);
    }
    const auto f = features[i].features.to_array();
    CHECK(f[0] == static_cast<double>(tr.config.block.x * tr.config.block.y * tr.config.block.z));
    CHECK(f[1] == static_cast<double>(tr.config.grid.x * tr.config.grid.y * tr.config.grid.z));
    CHECK(f[2] == sums[0]);
    CHECK(f[3] == sums[2]);
    CHECK(f[4] == sums[3]);
    CHECK(f[5] == sums[4]);
    CHECK(f[6] == sums[1]);
    CHECK(f[7] == sums[5]);
    CHECK(f[8] == sums[6]);
    CHECK(f[9] == sums[8]);
    CHECK(f[10] == sums[7]);
    const double traffic = sums[6] + sums[9];
    CHECK(f[11] == doctest::Approx(traffic > 0 ? sums[1] / traffic : sums[1]).epsilon(1e-14));
  }
}

TEST_CASE("built dataset joins features with median times") {
  const auto dir = testing::scratch("pipe_build");
  front_half(dir);
  const Dataset ds = read_dataset(dir / "dataset.csv");
  const auto time = read_time(testing::corpus_dir() / "time.csv");
  CHECK(ds.size() == 150);
  CHECK(ds.provenance.size() == 2);
  std::map<LaunchKey, std::vector<double>> runs;
  for (const auto& m : time) runs[m.key].push_back(m.duration_us);
  for (const auto& s : ds.samples) {
    auto v = runs.at(s.key);
    std::sort(v.begin(), v.end());
    CHECK(s.raw_target == v[(v.size() - 1) / 2]);
    CHECK(s.target == doctest::Approx(std::log(s.raw_target)));
  }

  BuildOptions one;
  one.features = dir / "features.csv";
  one.measurements = testing::corpus_dir() / "time.csv";
  one.out = dir / "one.csv";
  one.threshold = 1;
  cmd_build(one);
  const Dataset capped = read_dataset(dir / "one.csv");
  std::set<GroupKey> groups;
  for (const auto& s : capped.samples) groups.insert(GroupKey::of(s.key));
  CHECK(groups.size() == capped.size());
}

TEST_CASE("power dataset keeps watts") {
  const auto dir = testing::scratch("pipe_power");
  front_half(dir);
  BuildOptions b;
  b.features = dir / "features.csv";
  b.measurements = testing::corpus_dir() / "power.csv";
  b.out = dir / "power_ds.csv";
  b.kind = TargetKind::kPower;
  cmd_build(b);
  const Dataset ds = read_dataset(dir / "power_ds.csv");
  CHECK(ds.kind == TargetKind::kPower);
  for (const auto& s : ds.samples) CHECK(s.target == s.raw_target);
}

TEST_CASE("train, predict and importance") {
  const auto dir = testing::scratch("pipe_model");
  front_half(dir);
  TrainOptions tr;
  tr.dataset = dir / "dataset.csv";
  tr.out = dir / "model.txt";
  tr.hyper.n_estimators = 32;
  cmd_train(tr);
  const Forest f = read_model(dir / "model.txt");
  CHECK(f.trees.size() == 32);

  cmd_predict({dir / "model.txt", dir / "features.csv", dir / "pred.csv"});
  const Table p = read_table_file(dir / "pred.csv", "predictions", 1);
  CHECK(p.rows.size() == 150);
  const Dataset ds = read_dataset(dir / "dataset.csv");
  const auto features = read_features(dir / "features.csv");
  for (std::size_t i = 0; i < features.size(); ++i) {
    CHECK(parse_double(p.rows[i].back(), "t") == std::exp(f.predict(features[i].features)));
  }

  cmd_importance({dir / "model.txt", dir / "imp.csv"});
  const Table imp = read_table_file(dir / "imp.csv", "importance", 1);
  REQUIRE(imp.rows.size() == kFeatureCount);
  double total = 0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    CHECK(imp.rows[i][0] == kFeatureNames[i]);
    total += parse_double(imp.rows[i][2], "t");
  }
  CHECK(total == doctest::Approx(100.0));

  tr.hyper.max_depth = 0;
  tr.out = dir / "stump.txt";
  cmd_train(tr);
  cmd_predict({dir / "stump.txt", dir / "features.csv", dir / "flat.csv"});
  const Table flat = read_table_file(dir / "flat.csv", "predictions", 1);
  std::set<std::string> values;
  for (const auto& row : flat.rows) values.insert(row.back());
  CHECK(values.size() == 1);
}

TEST_CASE("evaluate writes its reports") {
  const auto dir = testing::scratch("pipe_eval");
  front_half(dir);
  EvaluateOptions e;
  e.dataset = dir / "dataset.csv";
  e.out_dir = dir / "eval";
  e.grid.estimators = {8};
  e.grid.max_features = {MaxFeatures::kSqrt};
  e.cv.iterations = 1;
  e.cv.k_outer = 3;
  e.cv.k_inner = 3;
  cmd_evaluate(e);
  for (const char* name : {"scores.csv", "inner_scores.csv", "grid.csv", "summary.csv",
                           "best_hyperparams.csv", "plot/error_buckets.csv", "plot/scatter.csv"}) {
    CHECK(fs::exists(e.out_dir / name));
  }
  CHECK(read_table_file(e.out_dir / "scores.csv", "cv-outer", 1).rows.size() == 3);
  CHECK(read_table_file(e.out_dir / "inner_scores.csv", "cv-inner", 1).rows.size() == 3 * 3 * 2);
  CHECK(read_hyperparams(e.out_dir / "best_hyperparams.csv").n_estimators == 8);
}

TEST_CASE("leave-one-out on the power dataset") {
  const auto dir = testing::scratch("pipe_loo");
  front_half(dir);
  BuildOptions b;
  b.features = dir / "features.csv";
  b.measurements = testing::corpus_dir() / "power.csv";
  b.out = dir / "power_ds.csv";
  b.kind = TargetKind::kPower;
  b.threshold = 2;
  cmd_build(b);
  LooOptions l;
  l.dataset = dir / "power_ds.csv";
  l.out_dir = dir / "loo";
  l.hyper.n_estimators = 8;
  cmd_loo(l);
  const Dataset ds = read_dataset(b.out);
  CHECK(read_table_file(l.out_dir / "loo_predictions.csv", "loo-predictions", 1).rows.size() ==
        ds.size());
}

TEST_CASE("cli reruns are byte-identical") {
  const auto a = testing::scratch("pipe_cli_a");
  const auto b = testing::scratch("pipe_cli_b");
  const auto corpus = testing::corpus_dir();
  for (const auto& dir : {a, b}) {
    const std::string d = dir.string();
    REQUIRE(testing::run_cli("extract " + (corpus / "kernels.ptx").string() + " -o " + d + "/blocks.csv", dir).exit_code == 0);
    REQUIRE(testing::run_cli("features --block-summary " + d + "/blocks.csv --trace " +
                                 (corpus / "trace.csv").string() + " -o " + d + "/features.csv",
                             dir).exit_code == 0);
    REQUIRE(testing::run_cli("build --features " + d + "/features.csv --measurements " +
                                 (corpus / "time.csv").string() + " -o " + d + "/dataset.csv",
                             dir).exit_code == 0);
    REQUIRE(testing::run_cli("train --dataset " + d + "/dataset.csv --estimators 16 -o " + d +
                                 "/model.txt",
                             dir).exit_code == 0);
  }
  for (const char* name : {"blocks.csv", "features.csv", "dataset.csv", "model.txt"}) {
    CAPTURE(name);
    CHECK(testing::slurp(a / name) == testing::slurp(b / name));
  }
}

TEST_CASE("pipeline files match the reviewed digests") {
  const auto dir = testing::scratch("pipe_golden");
  front_half(dir);
  TrainOptions tr;
  tr.dataset = dir / "dataset.csv";
  tr.out = dir / "model.txt";
  tr.hyper.n_estimators = 16;
  cmd_train(tr);
  const Table golden = read_table_file(testing::fixture_dir() / "pipeline_digests.csv", "digests", 1,
                                       {"file", "sha256"});
  REQUIRE(golden.rows.size() == 4);
  for (const auto& row : golden.rows) {
    CAPTURE(row[0]);
    CHECK(sha256_hex(read_file(dir / row[0])) == row[1]);
  }
}

TEST_CASE("selected hyperparameters refit to a pure model") {
  const auto dir = testing::scratch("pipe_compose");
  front_half(dir);
  EvaluateOptions e;
  e.dataset = dir / "dataset.csv";
  e.out_dir = dir / "eval";
  e.grid.estimators = {16};
  e.cv.iterations = 1;
  cmd_evaluate(e);
  TrainOptions tr;
  tr.dataset = dir / "dataset.csv";
  tr.out = dir / "model.txt";
  tr.hyper = read_hyperparams(e.out_dir / "best_hyperparams.csv");
  cmd_train(tr);
  cmd_predict({dir / "model.txt", dir / "features.csv", dir / "pred.csv"});

  const Dataset ds = read_dataset(dir / "dataset.csv");
  const Table p = read_table_file(dir / "pred.csv", "predictions", 1);
  std::map<std::string, double> predicted;
  for (const auto& row : p.rows) {
    predicted[row[0] + "/" + row[1] + "/" + row[2] + "#" + row[3]] = parse_double(row[4], "t");
  }
  std::map<std::array<double, kFeatureCount>, int> copies;
  for (const auto& s : ds.samples) ++copies[s.features.to_array()];
  double lo = INFINITY;
  double hi = -INFINITY;
  std::size_t unique = 0;
  for (const auto& s : ds.samples) {
    lo = std::min(lo, s.raw_target);
    hi = std::max(hi, s.raw_target);
    if (copies[s.features.to_array()] > 1) continue;
    ++unique;
    CHECK(predicted.at(to_string(s.key)) == std::exp(s.target));
  }
  CHECK(unique > ds.size() / 2);
  for (const auto& [key, v] : predicted) {
    CHECK(v >= lo * (1 - 1e-12));
    CHECK(v <= hi * (1 + 1e-12));
  }
}

TEST_CASE("cli error reporting") {
  const auto dir = testing::scratch("pipe_cli_err");
  const auto usage = testing::run_cli("train", dir);
  CHECK(usage.exit_code == 2);
  const auto missing = testing::run_cli("bogus-command", dir);
  CHECK(missing.exit_code == 2);

  write_file(dir / "bad.ptx", ".visible .entry k(\n.param .u64 p\n)\n{\n\ttex.2d.v4.f32.f32 {%f1,%f2,%f3,%f4}, [t, {%f5,%f6}];\n}\n");
  const auto bad = testing::run_cli("extract " + (dir / "bad.ptx").string() + " -o " +
                                        (dir / "o.csv").string(),
                                    dir);
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.rfind("error,UnsupportedFeature,", 0) == 0);

  front_half(dir);
  const auto range = testing::run_cli("train --dataset " + (dir / "dataset.csv").string() +
                                          " --estimators 2000 -o " + (dir / "m.txt").string(),
                                      dir);
  CHECK(range.exit_code == 1);
  CHECK(range.err.rfind("error,InvalidArgument,", 0) == 0);
  CHECK_FALSE(fs::exists(dir / "m.txt"));
}

}  // namespace
}  // namespace kperf
