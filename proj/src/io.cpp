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

#include "kperf/io.hpp"

#include <cstdint>
#include <map>

#include <fmt/core.h>
#include <fmt/format.h>

#include "kperf/error.hpp"

namespace kperf {
namespace {

using Row = std::vector<std::string>;

std::vector<std::string> key_columns() {
  return {kKeyColumns.begin(), kKeyColumns.end()};
}

std::vector<std::string> with_features(std::vector<std::string> cols) {
  cols.insert(cols.end(), kFeatureNames.begin(), kFeatureNames.end());
  return cols;
}

Table read_checked(const std::filesystem::path& path, std::string_view format,
                   const std::vector<std::string>& columns) {
  Table table = read_table_file(path, format, 1);
  if (table.columns != columns) {
    throw FormatError(fmt::format("{}: expected columns {}", table.source,
                                  fmt::join(columns, ",")));
  }
  return table;
}

void push_key(Row& row, const LaunchKey& key) {
  row.push_back(key.benchmark);
  row.push_back(key.dataset);
  row.push_back(key.kernel);
  row.push_back(std::to_string(key.launch_seq));
}

LaunchKey parse_key(const Table& t, std::size_t i) {
  const Row& row = t.rows[i];
  return {row[0], row[1], row[2], parse_uint(row[3], t.where(i))};
}

std::uint32_t parse_u32(std::string_view text, std::string_view where) {
  const std::uint64_t v = parse_uint(text, where);
  if (v > UINT32_MAX) throw FormatError(fmt::format("{}: {} exceeds 32 bits", where, text));
  return static_cast<std::uint32_t>(v);
}

void push_features(Row& row, const FeatureVector& f) {
  for (double v : f.to_array()) row.push_back(format_double(v));
}

FeatureVector parse_features(const Table& t, std::size_t i, std::size_t first) {
  std::array<double, kFeatureCount> values{};
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    values[c] = parse_double(t.rows[i][first + c], t.where(i));
  }
  return FeatureVector::from_array(values);
}

}  // namespace

Table block_summary_table(std::span<const ptx::KernelCode> kernels) {
  Table t;
  t.format = "block-summary";
  t.columns = {"kernel",  "block",        "total",        "arithmetic",  "special",
               "logic",   "control",      "sync",         "global_bytes", "shared_bytes",
               "param_bytes", "local_bytes", "kernel_param_bytes"};
  for (const ptx::KernelCode& k : kernels) {
    for (const ptx::BasicBlock& b : k.blocks) {
      t.rows.push_back({k.name, std::to_string(b.id), std::to_string(b.counts.total),
                        std::to_string(b.counts.arithmetic), std::to_string(b.counts.special),
                        std::to_string(b.counts.logic), std::to_string(b.counts.control),
                        std::to_string(b.counts.sync), std::to_string(b.mem.global_bytes),
                        std::to_string(b.mem.shared_bytes), std::to_string(b.mem.param_bytes),
                        std::to_string(b.mem.local_bytes), std::to_string(k.param_bytes)});
    }
  }
  return t;
}

std::vector<ptx::KernelCode> read_block_summary(const std::filesystem::path& path) {
  const Table t = read_table_file(
      path, "block-summary", 1,
      {"kernel", "block", "total", "arithmetic", "special", "logic", "control", "sync",
       "global_bytes", "shared_bytes", "param_bytes", "local_bytes", "kernel_param_bytes"});
  std::vector<ptx::KernelCode> kernels;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const Row& r = t.rows[i];
    const std::string where = t.where(i);
    auto [it, inserted] = index.emplace(r[0], kernels.size());
    if (inserted) {
      kernels.push_back({});
      kernels.back().name = r[0];
      kernels.back().param_bytes = parse_uint(r[12], where);
    }
    ptx::KernelCode& k = kernels[it->second];
    ptx::BasicBlock b;
    b.id = parse_uint(r[1], where);
    if (b.id != k.blocks.size()) {
      throw FormatError(fmt::format("{}: block {} of '{}' out of order (expected {})", where,
                                    b.id, k.name, k.blocks.size()));
    }
    b.counts.total = parse_uint(r[2], where);
    b.counts.arithmetic = parse_uint(r[3], where);
    b.counts.special = parse_uint(r[4], where);
    b.counts.logic = parse_uint(r[5], where);
    b.counts.control = parse_uint(r[6], where);
    b.counts.sync = parse_uint(r[7], where);
    b.mem.global_bytes = parse_uint(r[8], where);
    b.mem.shared_bytes = parse_uint(r[9], where);
    b.mem.param_bytes = parse_uint(r[10], where);
    b.mem.local_bytes = parse_uint(r[11], where);
    k.blocks.push_back(std::move(b));
  }
  return kernels;
}

Table trace_table(std::span<const TraceRecord> records) {
  Table t;
  t.format = "trace";
  t.columns = key_columns();
  for (const char* c : {"grid_x", "grid_y", "grid_z", "block_x", "block_y", "block_z",
                        "shared_mem_bytes", "block_counts"}) {
    t.columns.emplace_back(c);
  }
  for (const TraceRecord& rec : records) {
    Row row;
    push_key(row, rec.trace.key);
    const LaunchConfig& c = rec.config;
    for (std::uint32_t v : {c.grid.x, c.grid.y, c.grid.z, c.block.x, c.block.y, c.block.z}) {
      row.push_back(std::to_string(v));
    }
    row.push_back(std::to_string(c.shared_mem_bytes));
    std::string counts;
    for (const auto& [block, count] : rec.trace.freqs) {
      counts += fmt::format("{}{}:{}", counts.empty() ? "" : ";", block, count);
    }
    row.push_back(counts);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  auto cols = key_columns();
  for (const char* c : {"grid_x", "grid_y", "grid_z", "block_x", "block_y", "block_z",
                        "shared_mem_bytes", "block_counts"}) {
    cols.emplace_back(c);
  }
  const Table t = read_checked(path, "trace", cols);
  std::vector<TraceRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const Row& r = t.rows[i];
    const std::string where = t.where(i);
    TraceRecord rec;
    rec.trace.key = parse_key(t, i);
    rec.config.launch_seq = rec.trace.key.launch_seq;
    rec.config.grid = {parse_u32(r[4], where), parse_u32(r[5], where), parse_u32(r[6], where)};
    rec.config.block = {parse_u32(r[7], where), parse_u32(r[8], where), parse_u32(r[9], where)};
    rec.config.shared_mem_bytes = parse_uint(r[10], where);
    if (!r[11].empty()) {
      for (std::string_view pair : split(r[11], ';')) {
        const auto colon = pair.find(':');
        if (colon == std::string_view::npos) {
          throw FormatError(fmt::format("{}: block count '{}' is not id:count", where, pair));
        }
        const std::size_t block = parse_uint(pair.substr(0, colon), where);
        const std::uint64_t count = parse_uint(pair.substr(colon + 1), where);
        if (!rec.trace.freqs.emplace(block, count).second) {
          throw DuplicateKey(fmt::format("{}: block {} listed twice", where, block));
        }
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

Table features_table(std::span<const FeatureRecord> records) {
  Table t;
  t.format = "features";
  auto cols = key_columns();
  cols.emplace_back("shared_mem_bytes");
  t.columns = with_features(std::move(cols));
  for (const FeatureRecord& rec : records) {
    Row row;
    push_key(row, rec.key);
    row.push_back(std::to_string(rec.shared_mem_bytes));
    push_features(row, rec.features);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<FeatureRecord> read_features(const std::filesystem::path& path) {
  auto cols = key_columns();
  cols.emplace_back("shared_mem_bytes");
  const Table t = read_checked(path, "features", with_features(std::move(cols)));
  std::vector<FeatureRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.push_back({parse_key(t, i), parse_uint(t.rows[i][4], t.where(i)),
                   parse_features(t, i, 5)});
  }
  return out;
}

Table time_table(std::span<const TimeMeasurement> rows) {
  Table t;
  t.format = "time";
  t.columns = key_columns();
  t.columns.emplace_back("run");
  t.columns.emplace_back("duration_us");
  for (const TimeMeasurement& m : rows) {
    Row row;
    push_key(row, m.key);
    row.push_back(std::to_string(m.run_index));
    row.push_back(format_double(m.duration_us));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<TimeMeasurement> read_time(const std::filesystem::path& path) {
  auto cols = key_columns();
  cols.emplace_back("run");
  cols.emplace_back("duration_us");
  const Table t = read_checked(path, "time", cols);
  std::vector<TimeMeasurement> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.push_back({parse_key(t, i), parse_u32(t.rows[i][4], t.where(i)),
                   parse_double(t.rows[i][5], t.where(i))});
  }
  return out;
}

Table power_table(std::span<const PowerRow> rows) {
  Table t;
  t.format = "power";
  t.columns = key_columns();
  for (const char* c : {"run", "timestamp_ms", "watts"}) t.columns.emplace_back(c);
  for (const PowerRow& p : rows) {
    Row row;
    push_key(row, p.key);
    row.push_back(std::to_string(p.run_index));
    row.push_back(format_double(p.sample.timestamp_ms));
    row.push_back(format_double(p.sample.watts));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<PowerRow> read_power(const std::filesystem::path& path) {
  auto cols = key_columns();
  for (const char* c : {"run", "timestamp_ms", "watts"}) cols.emplace_back(c);
  const Table t = read_checked(path, "power", cols);
  std::vector<PowerRow> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string where = t.where(i);
    out.push_back({parse_key(t, i), parse_u32(t.rows[i][4], where),
                   {parse_double(t.rows[i][5], where), parse_double(t.rows[i][6], where)}});
  }
  return out;
}

Table dataset_table(const Dataset& dataset) {
  Table t;
  t.format = "dataset";
  auto cols = key_columns();
  cols.emplace_back("shared_mem_bytes");
  cols = with_features(std::move(cols));
  for (const char* c : {"target", "raw_target", "cv"}) cols.emplace_back(c);
  t.columns = std::move(cols);
  t.metadata.emplace_back("target_kind", std::string(to_string(dataset.kind)));
  for (const std::string& p : dataset.provenance) t.metadata.emplace_back("source", p);
  for (const Sample& s : dataset.samples) {
    Row row;
    push_key(row, s.key);
    row.push_back(std::to_string(s.shared_mem_bytes));
    push_features(row, s.features);
    row.push_back(format_double(s.target));
    row.push_back(format_double(s.raw_target));
    row.push_back(format_double(s.cv));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Dataset read_dataset(const std::filesystem::path& path) {
  auto cols = key_columns();
  cols.emplace_back("shared_mem_bytes");
  cols = with_features(std::move(cols));
  for (const char* c : {"target", "raw_target", "cv"}) cols.emplace_back(c);
  const Table t = read_checked(path, "dataset", cols);
  Dataset ds;
  ds.kind = parse_target_kind(t.meta("target_kind"));
  for (const auto& [k, v] : t.metadata) {
    if (k == "source") ds.provenance.push_back(v);
  }
  const std::size_t tail = 5 + kFeatureCount;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const Row& r = t.rows[i];
    const std::string where = t.where(i);
    Sample s;
    s.key = parse_key(t, i);
    s.shared_mem_bytes = parse_uint(r[4], where);
    s.features = parse_features(t, i, 5);
    s.target = parse_double(r[tail], where);
    s.raw_target = parse_double(r[tail + 1], where);
    s.cv = parse_double(r[tail + 2], where);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Table hyperparams_table(const HyperParams& hp) {
  Table t;
  t.format = "hyperparams";
  t.columns = {"key", "value"};
  t.rows = {{"n_estimators", std::to_string(hp.n_estimators)},
            {"max_features", std::string(to_string(hp.max_features))},
            {"criterion", std::string(to_string(hp.criterion))},
            {"min_samples_split", std::to_string(hp.min_samples_split)},
            {"max_depth", hp.max_depth ? std::to_string(*hp.max_depth) : "none"},
            {"seed", std::to_string(hp.seed)}};
  return t;
}

HyperParams read_hyperparams(const std::filesystem::path& path) {
  const Table t = read_table_file(path, "hyperparams", 1, {"key", "value"});
  HyperParams hp;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string& key = t.rows[i][0];
    const std::string& value = t.rows[i][1];
    const std::string where = t.where(i);
    if (key == "n_estimators") {
      hp.n_estimators = parse_uint(value, where);
    } else if (key == "max_features") {
      hp.max_features = parse_max_features(value);
    } else if (key == "criterion") {
      hp.criterion = parse_criterion(value);
    } else if (key == "min_samples_split") {
      hp.min_samples_split = parse_uint(value, where);
    } else if (key == "max_depth") {
      if (value == "none") {
        hp.max_depth.reset();
      } else {
        hp.max_depth = parse_uint(value, where);
      }
    } else if (key == "seed") {
      hp.seed = parse_uint(value, where);
    } else {
      throw FormatError(fmt::format("{}: unknown hyperparameter '{}'", where, key));
    }
  }
  hp.validate();
  return hp;
}

std::string provenance_entry(std::string_view role, const std::filesystem::path& path,
                             std::string_view content) {
  return fmt::format("{}:{}:sha256:{}", role, path.filename().string(), sha256_hex(content));
}

}  // namespace kperf
