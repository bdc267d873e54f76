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

#include "kperf/error.hpp"
#include "kperf/ptx.hpp"
#include "kperf/tabular.hpp"
#include "test_support.hpp"

namespace kperf {
namespace {

using ptx::InstructionClass;
using ptx::MemorySpace;

std::string wrap(const std::string& body, const std::string& name = "k") {
  return ".version 7.0\n.target sm_70\n.address_size 64\n\n.visible .entry " + name +
         "(\n\t.param .u64 p0\n)\n{\n" + body + "}\n";
}

TEST_CASE("bundled corpus matches the hand-counted block table") {
  const auto module = ptx::parse_ptx(read_file(testing::corpus_dir() / "kernels.ptx"));
  const auto expected = testing::expected_blocks();
  REQUIRE(expected.size() == 11);
  std::size_t blocks = 0;
  for (const auto& k : module.kernels) blocks += k.blocks.size();
  CHECK(blocks == expected.size());
  for (const auto& row : expected) {
    CAPTURE(row.kernel);
    CAPTURE(row.block);
    const ptx::KernelCode* k = module.find(row.kernel);
    REQUIRE(k != nullptr);
    REQUIRE(row.block < k->blocks.size());
    const auto& b = k->blocks[row.block];
    const std::vector<std::uint64_t> got = {
        b.counts.total,     b.counts.arithmetic, b.counts.special,     b.counts.logic,
        b.counts.control,   b.counts.sync,       b.mem.global_bytes,   b.mem.shared_bytes,
        b.mem.param_bytes,  b.mem.local_bytes};
    CHECK(got == row.values);
  }
}

TEST_CASE("corpus kernel parameters and skipped device function") {
  const auto module = ptx::parse_ptx(read_file(testing::corpus_dir() / "kernels.ptx"));
  REQUIRE(module.kernels.size() == 3);
  CHECK(module.find("_Z6squaref") == nullptr);
  CHECK(module.find("_Z6vecAddPKfS0_Pfi")->param_bytes == 28);
  CHECK(module.find("_Z10normReducePfS_i")->param_bytes == 20);
}

TEST_CASE("opcode classification table") {
  struct Case {
    const char* opcode;
    InstructionClass cls;
  };
  const Case cases[] = {
      {"add.s32", InstructionClass::kArithmetic},  {"mad.lo.s32", InstructionClass::kArithmetic},
      {"fma.rn.f32", InstructionClass::kArithmetic}, {"cvta.to.global.u64", InstructionClass::kArithmetic},
      {"mov.u32", InstructionClass::kArithmetic},  {"sqrt.rn.f32", InstructionClass::kSpecial},
      {"rsqrt.approx.f32", InstructionClass::kSpecial}, {"ex2.approx.f32", InstructionClass::kSpecial},
      {"setp.ge.s32", InstructionClass::kLogic},   {"selp.b32", InstructionClass::kLogic},
      {"shl.b32", InstructionClass::kLogic},       {"bra.uni", InstructionClass::kControl},
      {"ret", InstructionClass::kControl},         {"exit", InstructionClass::kControl},
      {"call.uni", InstructionClass::kControl},    {"bar.sync", InstructionClass::kSync},
      {"membar.gl", InstructionClass::kSync},      {"atom.global.add.u32", InstructionClass::kSync},
      {"popc.b32", InstructionClass::kOther},      {"shfl.sync.bfly.b32", InstructionClass::kOther},
  };
  for (const auto& c : cases) {
    CAPTURE(c.opcode);
    CHECK(ptx::classify_instruction(c.opcode).cls == c.cls);
  }
}

TEST_CASE("memory accesses carry space and vector width") {
  auto check = [](const char* opcode, MemorySpace space, std::uint32_t bytes) {
    CAPTURE(opcode);
    const auto c = ptx::classify_instruction(opcode);
    CHECK(c.cls == InstructionClass::kMemory);
    CHECK(c.space == space);
    CHECK(c.bytes == bytes);
  };
  check("ld.global.f32", MemorySpace::kGlobal, 4);
  check("ld.global.v4.f32", MemorySpace::kGlobal, 16);
  check("ld.global.nc.u8", MemorySpace::kGlobal, 1);
  check("st.shared.v2.f64", MemorySpace::kShared, 16);
  check("ld.param.u64", MemorySpace::kParam, 8);
  check("st.local.v4.u32", MemorySpace::kLocal, 16);
  CHECK(ptx::classify_instruction("ld.f32").cls == InstructionClass::kOther);
  CHECK(ptx::classify_instruction("ld.const.f32").cls == InstructionClass::kOther);
}

TEST_CASE("type widths") {
  CHECK(ptx::type_width("f32") == 4u);
  CHECK(ptx::type_width("b8") == 1u);
  CHECK(ptx::type_width("u64") == 8u);
  CHECK(ptx::type_width("f16") == 2u);
  CHECK_FALSE(ptx::type_width("v4").has_value());
  CHECK_FALSE(ptx::type_width("global").has_value());
}

TEST_CASE("blocks split at labels and after branches") {
  const auto m = ptx::parse_ptx(wrap(
      "\tadd.s32 %r1, %r2, %r3;\n"
      "\t@%p1 bra L1;\n"
      "\tsub.s32 %r1, %r2, %r3;\n"
      "L1:\n"
      "\tret;\n"));
  const auto& k = m.kernels.at(0);
  REQUIRE(k.blocks.size() == 3);
  CHECK(k.blocks[0].counts.total == 2);
  CHECK(k.blocks[0].counts.control == 1);
  CHECK(k.blocks[0].instructions[1].predicated);
  CHECK(k.blocks[1].counts.arithmetic == 1);
  CHECK(k.blocks[2].labels == std::vector<std::string>{"L1"});
  CHECK(k.blocks[2].counts.control == 1);
  for (std::size_t i = 0; i < k.blocks.size(); ++i) CHECK(k.blocks[i].id == i);
}

TEST_CASE("empty blocks are dropped") {
  const auto m = ptx::parse_ptx(wrap("\tbra L1;\nL1:\nL2:\n\tret;\n"));
  const auto& k = m.kernels.at(0);
  REQUIRE(k.blocks.size() == 2);
  CHECK(k.blocks[1].labels == std::vector<std::string>{"L1", "L2"});
}

TEST_CASE("comments are ignored") {
  const auto m = ptx::parse_ptx(wrap(
      "\t// add.s32 %r1, %r1, %r1;\n"
      "\t/* mul.lo.s32 %r1, %r1, %r1;\n sub.s32 %r1, %r1, 1; */\n"
      "\tret; // trailing\n"));
  CHECK(m.kernels.at(0).blocks.at(0).counts.total == 1);
}

TEST_CASE("empty kernel body yields no blocks") {
  const auto m = ptx::parse_ptx(wrap(""));
  REQUIRE(m.kernels.size() == 1);
  CHECK(m.kernels[0].blocks.empty());
}

TEST_CASE("texture instructions are rejected") {
  CHECK_THROWS_AS(ptx::parse_ptx(wrap("\ttex.2d.v4.f32.f32 {%f1,%f2,%f3,%f4}, [t, {%f5,%f6}];\n")),
                  UnsupportedFeature);
  CHECK_THROWS_AS(ptx::parse_ptx(wrap("\ttxq.width.b32 %r1, [t];\n")), UnsupportedFeature);
}

TEST_CASE("syntax errors report the line") {
  try {
    ptx::parse_ptx(wrap("\tadd.s32 %r1, %r2, %r3;\n\tmul.lo.s32 %r1\n"));
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() >= 10);
    CHECK(e.kind() == "SyntaxError");
  }
  CHECK_THROWS_AS(ptx::parse_ptx(".visible .entry k(\n.param .u64 p\n"), SyntaxError);
  CHECK_THROWS_AS(ptx::parse_ptx("/* unterminated"), SyntaxError);
}

TEST_CASE("duplicate kernels are rejected") {
  CHECK_THROWS_AS(ptx::parse_ptx(wrap("\tret;\n") + ".visible .entry k(\n.param .u64 q\n)\n{\n\tret;\n}\n"),
                  SyntaxError);
}

TEST_CASE("summarize_block sums classes and bytes") {
  const std::vector<ptx::Classification> insts = {
      ptx::classify_instruction("ld.global.v4.f32"), ptx::classify_instruction("add.f32"),
      ptx::classify_instruction("st.shared.f32"), ptx::classify_instruction("popc.b32")};
  const auto s = ptx::summarize_block(insts);
  CHECK(s.counts.total == 4);
  CHECK(s.counts.arithmetic == 1);
  CHECK(s.mem.global_bytes == 16);
  CHECK(s.mem.shared_bytes == 4);
}

}  // namespace
}  // namespace kperf
