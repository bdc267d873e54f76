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

#ifndef KPERF_FEATURES_HPP_
#define KPERF_FEATURES_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "kperf/ptx.hpp"

namespace kperf {

struct Dim3 {
  std::uint32_t x = 1;
  std::uint32_t y = 1;
  std::uint32_t z = 1;

  std::uint64_t volume() const {
    return std::uint64_t{x} * std::uint64_t{y} * std::uint64_t{z};
  }

  friend bool operator==(const Dim3&, const Dim3&) = default;
};

struct LaunchConfig {
  Dim3 grid;
  Dim3 block;
  std::uint64_t shared_mem_bytes = 0;
  std::uint64_t launch_seq = 0;

  std::uint64_t threads_per_cta() const { return block.volume(); }
  std::uint64_t ctas() const { return grid.volume(); }

  friend bool operator==(const LaunchConfig&, const LaunchConfig&) = default;
};

// Identifies one kernel launch across profiler traces and measurements.
struct LaunchKey {
  std::string benchmark;
  std::string dataset;
  std::string kernel;
  std::uint64_t launch_seq = 0;

  friend auto operator<=>(const LaunchKey&, const LaunchKey&) = default;
  friend bool operator==(const LaunchKey&, const LaunchKey&) = default;
};

std::string to_string(const LaunchKey& key);

// Per-launch basic-block execution counts, summed over all threads.
struct BlockFrequencyTrace {
  LaunchKey key;
  std::map<std::size_t, std::uint64_t> freqs;
};

inline constexpr std::size_t kFeatureCount = 12;

// Canonical feature order, used by every file format and by the model.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "threads_per_cta", "ctas",           "total_instr",    "special_ops",
    "logic_ops",       "control_ops",    "arithm_ops",     "sync_ops",
    "global_mem_vol",  "param_mem_vol",  "shared_mem_vol", "arithm_intensity",
};

// Human-readable row labels in the same order.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureLabels = {
    "threads per CTA", "CTAs",           "total instr.",    "special ops",
    "logic ops",       "control ops",    "arithm. ops",     "sync ops",
    "global mem vol.", "param mem vol.", "shared mem vol.", "arithm. intensity",
};

// Hardware-independent description of one kernel launch. Every field is
// derived from PTX code or the launch configuration; nothing comes from a
// device or its counters.
struct FeatureVector {
  double threads_per_cta = 0;
  double ctas = 0;
  double total_instr = 0;
  double special_ops = 0;
  double logic_ops = 0;
  double control_ops = 0;
  double arithm_ops = 0;
  double sync_ops = 0;
  double global_mem_vol = 0;  // bytes
  double param_mem_vol = 0;   // bytes
  double shared_mem_vol = 0;  // bytes
  double arithm_intensity = 0;

  std::array<double, kFeatureCount> to_array() const;
  static FeatureVector from_array(std::span<const double> values);

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Arithmetic instructions per byte of global plus local traffic. A kernel
// without such traffic uses a denominator of one byte.
double arithmetic_intensity(double arithm_ops, double global_plus_local_bytes);

// Frequency-weighted sum of the kernel's per-block statistics, combined with
// the launch configuration. KeyMismatch if the trace names another kernel or
// an unknown block id. Warns (does not fail) above 1024 threads per CTA.
FeatureVector build_feature_vector(const ptx::KernelCode& kernel,
                                   const BlockFrequencyTrace& trace,
                                   const LaunchConfig& cfg);

// Bytes of .local traffic over the whole launch. Only feeds the arithmetic
// intensity; it is not a model feature itself.
std::uint64_t local_mem_vol(const ptx::KernelCode& kernel,
                            const BlockFrequencyTrace& trace);

}  // namespace kperf

#endif  // KPERF_FEATURES_HPP_
