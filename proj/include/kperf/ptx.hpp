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

// Static analysis of PTX assembly: kernels are split into basic blocks and
// every instruction is mapped to a coarse instruction class. Memory
// instructions additionally carry their state space and access width.
//
// Instruction classes (first dot-separated component of the opcode):
//   arithmetic  add sub mul mad fma div rem neg abs min max cvt cvta mov
//   special     sqrt rsqrt rcp sin cos lg2 ex2 tanh
//   logic       and or xor not shl shr setp set selp slct
//   control     bra call ret exit
//   sync        bar barrier membar fence atom red
//   memory      ld st in the global, shared, param or local state space
// Everything else (generic or constant-space loads, popc, shfl, ...) is
// "other" and only contributes to the total instruction count. Operand bit
// widths of computations are ignored; memory accesses count
// element-width x vector-arity bytes.

#ifndef KPERF_PTX_HPP_
#define KPERF_PTX_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kperf::ptx {

enum class InstructionClass {
  kArithmetic,
  kSpecial,
  kLogic,
  kControl,
  kSync,
  kMemory,
  kOther,
};

enum class MemorySpace { kNone, kGlobal, kShared, kParam, kLocal };

std::string_view to_string(InstructionClass cls);
std::string_view to_string(MemorySpace space);

struct Classification {
  InstructionClass cls = InstructionClass::kOther;
  MemorySpace space = MemorySpace::kNone;  // set for kMemory only
  std::uint32_t bytes = 0;                  // set for kMemory only

  friend bool operator==(const Classification&, const Classification&) = default;
};

// Total and pure: unknown opcodes map to kOther.
Classification classify_instruction(std::string_view opcode);

// Bytes of one element of a PTX fundamental type suffix such as "f32" or
// "b8" (without the dot); nullopt for non-data suffixes.
std::optional<std::uint32_t> type_width(std::string_view suffix);

struct InstructionClassCounts {
  std::uint64_t arithmetic = 0;
  std::uint64_t special = 0;
  std::uint64_t logic = 0;
  std::uint64_t control = 0;
  std::uint64_t sync = 0;
  // Every instruction, including memory and unclassified ones.
  std::uint64_t total = 0;

  friend bool operator==(const InstructionClassCounts&,
                         const InstructionClassCounts&) = default;
};

// Bytes moved by a single execution of a block, per state space.
struct MemoryAccessStats {
  std::uint64_t global_bytes = 0;
  std::uint64_t shared_bytes = 0;
  std::uint64_t param_bytes = 0;
  std::uint64_t local_bytes = 0;

  friend bool operator==(const MemoryAccessStats&, const MemoryAccessStats&) = default;
};

struct BlockSummary {
  InstructionClassCounts counts;
  MemoryAccessStats mem;

  friend bool operator==(const BlockSummary&, const BlockSummary&) = default;
};

BlockSummary summarize_block(std::span<const Classification> instructions);

struct Instruction {
  std::string opcode;
  bool predicated = false;
  std::size_t line = 0;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct BasicBlock {
  std::size_t id = 0;
  std::vector<std::string> labels;
  // Empty when the block was reconstructed from a block-summary file.
  std::vector<Instruction> instructions;
  InstructionClassCounts counts;
  MemoryAccessStats mem;

  friend bool operator==(const BasicBlock&, const BasicBlock&) = default;
};

struct KernelCode {
  std::string name;
  // Block ids equal their index; block 0 is the entry block.
  std::vector<BasicBlock> blocks;
  // Total size of the kernel's .param declarations.
  std::uint64_t param_bytes = 0;

  friend bool operator==(const KernelCode&, const KernelCode&) = default;
};

struct ParseReport {
  std::size_t skipped_directives = 0;
  std::size_t unclassified_instructions = 0;

  friend bool operator==(const ParseReport&, const ParseReport&) = default;
};

struct PtxModule {
  std::string source_id;
  std::vector<KernelCode> kernels;
  ParseReport report;

  const KernelCode* find(std::string_view name) const;

  friend bool operator==(const PtxModule&, const PtxModule&) = default;
};

// Parses the textual PTX subset emitted by nvcc for `.entry` kernels.
// Blocks start at labels and end after every bra/call/ret/exit. Device
// functions (.func) and directives other than .entry/.param are skipped and
// counted in the report. Predicated instructions count fully.
//
// Throws SyntaxError on malformed input and UnsupportedFeature for texture
// instructions (tex, tld4, txq).
PtxModule parse_ptx(std::string_view text, std::string source_id = {});

}  // namespace kperf::ptx

#endif  // KPERF_PTX_HPP_
