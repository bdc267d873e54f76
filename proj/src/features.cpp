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

#include "kperf/features.hpp"

#include <fmt/core.h>

#include "kperf/error.hpp"

namespace kperf {
namespace {

struct WeightedTotals {
  ptx::InstructionClassCounts counts;
  ptx::MemoryAccessStats mem;
};

std::uint64_t mul_checked(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw InvalidArgument("block frequency overflows a 64-bit counter");
  }
  return out;
}

void add_checked(std::uint64_t& acc, std::uint64_t value) {
  if (__builtin_add_overflow(acc, value, &acc)) {
    throw InvalidArgument("feature sum overflows a 64-bit counter");
  }
}

WeightedTotals weighted_totals(const ptx::KernelCode& kernel,
                               const BlockFrequencyTrace& trace) {
  if (trace.key.kernel != kernel.name) {
    throw KeyMismatch(fmt::format("trace for '{}' applied to kernel '{}'",
                                  trace.key.kernel, kernel.name));
  }
  WeightedTotals t;
  for (const auto& [block_id, freq] : trace.freqs) {
    if (block_id >= kernel.blocks.size()) {
      throw KeyMismatch(fmt::format("{}: block {} does not exist in kernel '{}' ({} blocks)",
                                    to_string(trace.key), block_id, kernel.name,
                                    kernel.blocks.size()));
    }
    const ptx::BasicBlock& b = kernel.blocks[block_id];
    add_checked(t.counts.arithmetic, mul_checked(freq, b.counts.arithmetic));
    add_checked(t.counts.special, mul_checked(freq, b.counts.special));
    add_checked(t.counts.logic, mul_checked(freq, b.counts.logic));
    add_checked(t.counts.control, mul_checked(freq, b.counts.control));
    add_checked(t.counts.sync, mul_checked(freq, b.counts.sync));
    add_checked(t.counts.total, mul_checked(freq, b.counts.total));
    add_checked(t.mem.global_bytes, mul_checked(freq, b.mem.global_bytes));
    add_checked(t.mem.shared_bytes, mul_checked(freq, b.mem.shared_bytes));
    add_checked(t.mem.param_bytes, mul_checked(freq, b.mem.param_bytes));
    add_checked(t.mem.local_bytes, mul_checked(freq, b.mem.local_bytes));
  }
  return t;
}

}  // namespace

std::string to_string(const LaunchKey& key) {
  return fmt::format("{}/{}/{}#{}", key.benchmark, key.dataset, key.kernel, key.launch_seq);
}

std::array<double, kFeatureCount> FeatureVector::to_array() const {
  return {threads_per_cta, ctas,           total_instr,    special_ops,
          logic_ops,       control_ops,    arithm_ops,     sync_ops,
          global_mem_vol,  param_mem_vol,  shared_mem_vol, arithm_intensity};
}

FeatureVector FeatureVector::from_array(std::span<const double> v) {
  if (v.size() != kFeatureCount) {
    throw ArityMismatch(fmt::format("expected {} features, got {}", kFeatureCount, v.size()));
  }
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11]};
}

double arithmetic_intensity(double arithm_ops, double global_plus_local_bytes) {
  return global_plus_local_bytes > 0 ? arithm_ops / global_plus_local_bytes : arithm_ops;
}

FeatureVector build_feature_vector(const ptx::KernelCode& kernel,
                                   const BlockFrequencyTrace& trace,
                                   const LaunchConfig& cfg) {
  if (cfg.threads_per_cta() > 1024) {
    warn(fmt::format("{}: {} threads per CTA exceeds the CUDA limit of 1024",
                     to_string(trace.key), cfg.threads_per_cta()));
  }
  const WeightedTotals t = weighted_totals(kernel, trace);
  FeatureVector f;
  f.threads_per_cta = static_cast<double>(cfg.threads_per_cta());
  f.ctas = static_cast<double>(cfg.ctas());
  f.total_instr = static_cast<double>(t.counts.total);
  f.special_ops = static_cast<double>(t.counts.special);
  f.logic_ops = static_cast<double>(t.counts.logic);
  f.control_ops = static_cast<double>(t.counts.control);
  f.arithm_ops = static_cast<double>(t.counts.arithmetic);
  f.sync_ops = static_cast<double>(t.counts.sync);
  f.global_mem_vol = static_cast<double>(t.mem.global_bytes);
  f.param_mem_vol = static_cast<double>(t.mem.param_bytes);
  f.shared_mem_vol = static_cast<double>(t.mem.shared_bytes);
  std::uint64_t traffic = t.mem.global_bytes;
  add_checked(traffic, t.mem.local_bytes);
  f.arithm_intensity = arithmetic_intensity(f.arithm_ops, static_cast<double>(traffic));
  return f;
}

std::uint64_t local_mem_vol(const ptx::KernelCode& kernel,
                            const BlockFrequencyTrace& trace) {
  return weighted_totals(kernel, trace).mem.local_bytes;
}

}  // namespace kperf
