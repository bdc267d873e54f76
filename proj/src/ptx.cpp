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

#include "kperf/ptx.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <set>
#include <utility>

#include <fmt/core.h>

#include "kperf/error.hpp"
#include "kperf/tabular.hpp"

namespace kperf::ptx {
namespace {

using namespace std::string_view_literals;

constexpr std::array kArithmetic = {"add"sv, "sub"sv, "mul"sv, "mad"sv, "fma"sv,
                                    "div"sv, "rem"sv, "neg"sv, "abs"sv, "min"sv,
                                    "max"sv, "cvt"sv, "cvta"sv, "mov"sv};
constexpr std::array kSpecial = {"sqrt"sv, "rsqrt"sv, "rcp"sv, "sin"sv,
                                 "cos"sv,  "lg2"sv,   "ex2"sv, "tanh"sv};
constexpr std::array kLogic = {"and"sv, "or"sv,  "xor"sv, "not"sv,  "shl"sv,
                               "shr"sv, "setp"sv, "set"sv, "selp"sv, "slct"sv};
constexpr std::array kControl = {"bra"sv, "call"sv, "ret"sv, "exit"sv};
constexpr std::array kSync = {"bar"sv, "barrier"sv, "membar"sv,
                              "fence"sv, "atom"sv, "red"sv};
constexpr std::array kTexture = {"tex"sv, "tld4"sv, "txq"sv};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view key) {
  return std::find(set.begin(), set.end(), key) != set.end();
}

std::string_view base_mnemonic(std::string_view opcode) {
  return opcode.substr(0, opcode.find('.'));
}

// Replaces // and /* */ comments by spaces, keeping newlines so that line
// numbers survive. String literals are copied verbatim.
std::string strip_comments(std::string_view text) {
  std::string out(text);
  std::size_t i = 0;
  while (i < out.size()) {
    if (out[i] == '"') {
      for (++i; i < out.size() && out[i] != '"' && out[i] != '\n'; ++i) {
      }
      if (i < out.size()) ++i;
    } else if (out.compare(i, 2, "//") == 0) {
      for (; i < out.size() && out[i] != '\n'; ++i) out[i] = ' ';
    } else if (out.compare(i, 2, "/*") == 0) {
      const std::size_t start = i;
      for (; i < out.size() && out.compare(i, 2, "*/") != 0; ++i) {
        if (out[i] != '\n') out[i] = ' ';
      }
      if (i >= out.size()) {
        const auto line = 1 + std::count(out.begin(), out.begin() + start, '\n');
        throw SyntaxError(line, "unterminated block comment");
      }
      out[i] = out[i + 1] = ' ';
      i += 2;
    } else {
      ++i;
    }
  }
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         c == '.' || c == '%';
}

class Scanner {
 public:
  explicit Scanner(std::string text) : text_(std::move(text)) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }
  std::size_t line() const { return line_; }

  char get() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) get();
  }

  void skip_blanks() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
  }

  std::string read_word() {
    std::string word;
    while (!eof() && is_word_char(peek())) word += get();
    return word;
  }

  void skip_line() {
    while (!eof() && get() != '\n') {
    }
  }

  // Reads up to and including the terminating ';' and returns the text
  // before it. Braces inside the statement (vector operands) must balance.
  std::string read_statement(std::size_t start_line) {
    std::string body;
    int depth = 0;
    while (!eof()) {
      const char c = get();
      if (c == ';' && depth == 0) return body;
      if (c == '{') ++depth;
      if (c == '}' && --depth < 0) break;
      body += c;
    }
    throw SyntaxError(start_line, "missing ';' at end of statement");
  }

  // Skips a module-level statement: up to ';' outside any brace nesting.
  void skip_statement(std::size_t start_line) {
    int depth = 0;
    while (!eof()) {
      const char c = get();
      if (c == '{') ++depth;
      if (c == '}') --depth;
      if (c == ';' && depth == 0) return;
    }
    throw SyntaxError(start_line, "missing ';' at end of directive");
  }

  // Consumes a balanced {...} group; the scanner must be at '{'.
  void skip_braces(std::size_t start_line) {
    int depth = 0;
    while (!eof()) {
      const char c = get();
      if (c == '{') ++depth;
      if (c == '}' && --depth == 0) return;
    }
    throw SyntaxError(start_line, "unbalanced '{'");
  }

  // Skips a .func prototype (ends with ';') or definition (ends with '}').
  void skip_function(std::size_t start_line) {
    int parens = 0;
    while (!eof()) {
      const char c = peek();
      if (c == '(') ++parens;
      if (c == ')') --parens;
      if (parens == 0 && c == ';') {
        get();
        return;
      }
      if (parens == 0 && c == '{') {
        skip_braces(start_line);
        return;
      }
      get();
    }
    throw SyntaxError(start_line, "unterminated .func");
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

// Byte size of one ".param .type name[N]" declaration.
std::uint64_t param_decl_bytes(std::string_view decl, std::size_t line) {
  std::uint64_t width = 0;
  std::uint64_t count = 1;
  std::string_view name;
  for (auto token : split(decl, ' ')) {
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) {
      token.remove_prefix(1);
    }
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) {
      token.remove_suffix(1);
    }
    if (token.empty()) continue;
    if (token.front() == '.') {
      if (auto w = type_width(token.substr(1))) width = *w;
    } else {
      name = token;
    }
  }
  const auto open = name.find('[');
  if (open != std::string_view::npos) {
    const auto close = name.find(']', open);
    if (close == std::string_view::npos) throw SyntaxError(line, "malformed parameter array");
    const auto digits = name.substr(open + 1, close - open - 1);
    count = 0;
    if (!digits.empty()) {
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), count);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw SyntaxError(line, fmt::format("bad parameter array size '{}'", digits));
      }
    }
  }
  return width * count;
}

class BlockBuilder {
 public:
  void label(std::string name) {
    close();
    pending_labels_.push_back(std::move(name));
  }

  void add(Instruction instruction, const Classification& cls) {
    current_.push_back(std::move(instruction));
    classes_.push_back(cls);
    if (cls.cls == InstructionClass::kControl) close();
  }

  std::vector<BasicBlock> finish() {
    close();
    return std::move(blocks_);
  }

 private:
  void close() {
    if (current_.empty()) return;
    BasicBlock block;
    block.id = blocks_.size();
    block.labels = std::move(pending_labels_);
    block.instructions = std::move(current_);
    const BlockSummary summary = summarize_block(classes_);
    block.counts = summary.counts;
    block.mem = summary.mem;
    blocks_.push_back(std::move(block));
    pending_labels_.clear();
    current_.clear();
    classes_.clear();
  }

  std::vector<BasicBlock> blocks_;
  std::vector<std::string> pending_labels_;
  std::vector<Instruction> current_;
  std::vector<Classification> classes_;
};

bool is_line_directive(std::string_view word) {
  return word == ".version" || word == ".target" || word == ".address_size" ||
         word == ".file" || word == ".loc";
}

KernelCode parse_entry(Scanner& in, ParseReport& report) {
  const std::size_t entry_line = in.line();
  KernelCode kernel;
  in.skip_ws();
  if (in.peek() == '.' || !is_word_char(in.peek())) {
    throw SyntaxError(in.line(), "expected kernel name after .entry");
  }
  kernel.name = in.read_word();

  in.skip_ws();
  if (in.peek() == '(') {
    const std::size_t params_line = in.line();
    in.get();
    std::string params;
    while (!in.eof() && in.peek() != ')') params += in.get();
    if (in.eof()) throw SyntaxError(params_line, "unterminated parameter list");
    in.get();
    for (auto decl : split(params, ',')) {
      std::string flat(decl);
      std::replace_if(flat.begin(), flat.end(),
                      [](char c) { return std::isspace(static_cast<unsigned char>(c)); }, ' ');
      if (flat.find_first_not_of(' ') == std::string::npos) continue;
      kernel.param_bytes += param_decl_bytes(flat, params_line);
    }
  }

  // Performance-tuning directives (.maxntid, .reqntid, ...) before the body.
  while (true) {
    in.skip_ws();
    if (in.eof()) throw SyntaxError(entry_line, "kernel '" + kernel.name + "' has no body");
    if (in.peek() == '{') break;
    if (in.peek() != '.') {
      throw SyntaxError(in.line(), fmt::format("unexpected '{}' before kernel body", in.peek()));
    }
    in.read_word();
    in.skip_line();
    ++report.skipped_directives;
  }
  in.get();

  BlockBuilder blocks;
  int depth = 1;
  while (true) {
    in.skip_ws();
    if (in.eof()) throw SyntaxError(entry_line, "unterminated body of kernel '" + kernel.name + "'");
    const std::size_t line = in.line();
    const char c = in.peek();
    if (c == '{') {
      in.get();
      ++depth;
      continue;
    }
    if (c == '}') {
      in.get();
      if (--depth == 0) break;
      continue;
    }
    if (c == '.') {
      const std::string directive = in.read_word();
      if (is_line_directive(directive)) {
        in.skip_line();
      } else {
        in.read_statement(line);
      }
      ++report.skipped_directives;
      continue;
    }

    bool predicated = false;
    std::string first;
    if (c == '@') {
      in.get();
      if (in.peek() == '!') in.get();
      if (in.read_word().empty()) throw SyntaxError(line, "malformed predicate guard");
      predicated = true;
      in.skip_ws();
    } else if (is_word_char(c)) {
      first = in.read_word();
      in.skip_blanks();
      if (in.peek() == ':') {
        in.get();
        blocks.label(std::move(first));
        continue;
      }
    } else {
      throw SyntaxError(line, fmt::format("unexpected character '{}'", c));
    }

    std::string opcode = predicated ? in.read_word() : std::move(first);
    if (opcode.empty() || !std::isalpha(static_cast<unsigned char>(opcode.front()))) {
      throw SyntaxError(line, fmt::format("expected an instruction opcode, found '{}'", opcode));
    }
    if (contains(kTexture, base_mnemonic(opcode))) {
      throw UnsupportedFeature(
          fmt::format("texture instruction '{}' at line {} is not supported", opcode, line));
    }
    in.read_statement(line);
    const Classification cls = classify_instruction(opcode);
    if (cls.cls == InstructionClass::kOther) ++report.unclassified_instructions;
    blocks.add(Instruction{std::move(opcode), predicated, line}, cls);
  }

  kernel.blocks = blocks.finish();
  return kernel;
}

}  // namespace

std::string_view to_string(InstructionClass cls) {
  switch (cls) {
    case InstructionClass::kArithmetic: return "arithmetic";
    case InstructionClass::kSpecial: return "special";
    case InstructionClass::kLogic: return "logic";
    case InstructionClass::kControl: return "control";
    case InstructionClass::kSync: return "sync";
    case InstructionClass::kMemory: return "memory";
    case InstructionClass::kOther: return "other";
  }
  return "other";
}

std::string_view to_string(MemorySpace space) {
  switch (space) {
    case MemorySpace::kNone: return "none";
    case MemorySpace::kGlobal: return "global";
    case MemorySpace::kShared: return "shared";
    case MemorySpace::kParam: return "param";
    case MemorySpace::kLocal: return "local";
  }
  return "none";
}

std::optional<std::uint32_t> type_width(std::string_view suffix) {
  static constexpr std::array<std::pair<std::string_view, std::uint32_t>, 19> kWidths = {{
      {"b8", 1},  {"s8", 1},  {"u8", 1},  {"b16", 2},   {"s16", 2},    {"u16", 2},
      {"f16", 2}, {"bf16", 2}, {"b32", 4}, {"s32", 4},  {"u32", 4},    {"f32", 4},
      {"f16x2", 4}, {"bf16x2", 4}, {"b64", 8}, {"s64", 8}, {"u64", 8}, {"f64", 8},
      {"b128", 16},
  }};
  for (const auto& [name, width] : kWidths) {
    if (name == suffix) return width;
  }
  return std::nullopt;
}

Classification classify_instruction(std::string_view opcode) {
  const std::string_view base = base_mnemonic(opcode);
  if (contains(kArithmetic, base)) return {InstructionClass::kArithmetic};
  if (contains(kSpecial, base)) return {InstructionClass::kSpecial};
  if (contains(kLogic, base)) return {InstructionClass::kLogic};
  if (contains(kControl, base)) return {InstructionClass::kControl};
  if (contains(kSync, base)) return {InstructionClass::kSync};
  if (base != "ld" && base != "st") return {InstructionClass::kOther};

  MemorySpace space = MemorySpace::kNone;
  std::uint32_t width = 0;
  std::uint32_t arity = 1;
  const auto parts = split(opcode, '.');
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string_view part = parts[i];
    if (space == MemorySpace::kNone) {
      if (part == "global") space = MemorySpace::kGlobal;
      else if (part == "shared") space = MemorySpace::kShared;
      else if (part == "param") space = MemorySpace::kParam;
      else if (part == "local") space = MemorySpace::kLocal;
    }
    if (part == "v2") arity = 2;
    else if (part == "v4") arity = 4;
    else if (part == "v8") arity = 8;
    else if (auto w = type_width(part)) width = *w;
  }
  if (space == MemorySpace::kNone) return {InstructionClass::kOther};
  return {InstructionClass::kMemory, space, width * arity};
}

BlockSummary summarize_block(std::span<const Classification> instructions) {
  BlockSummary s;
  for (const Classification& c : instructions) {
    ++s.counts.total;
    switch (c.cls) {
      case InstructionClass::kArithmetic: ++s.counts.arithmetic; break;
      case InstructionClass::kSpecial: ++s.counts.special; break;
      case InstructionClass::kLogic: ++s.counts.logic; break;
      case InstructionClass::kControl: ++s.counts.control; break;
      case InstructionClass::kSync: ++s.counts.sync; break;
      case InstructionClass::kOther: break;
      case InstructionClass::kMemory:
        switch (c.space) {
          case MemorySpace::kGlobal: s.mem.global_bytes += c.bytes; break;
          case MemorySpace::kShared: s.mem.shared_bytes += c.bytes; break;
          case MemorySpace::kParam: s.mem.param_bytes += c.bytes; break;
          case MemorySpace::kLocal: s.mem.local_bytes += c.bytes; break;
          case MemorySpace::kNone: break;
        }
        break;
    }
  }
  return s;
}

const KernelCode* PtxModule::find(std::string_view name) const {
  for (const auto& k : kernels) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

PtxModule parse_ptx(std::string_view text, std::string source_id) {
  PtxModule module;
  module.source_id = std::move(source_id);
  Scanner in(strip_comments(text));
  std::set<std::string> names;

  while (true) {
    in.skip_ws();
    if (in.eof()) break;
    const std::size_t line = in.line();
    if (in.peek() != '.') {
      throw SyntaxError(line, fmt::format("unexpected '{}' outside of a kernel", in.peek()));
    }
    const std::string directive = in.read_word();
    if (directive == ".visible" || directive == ".weak" || directive == ".extern" ||
        directive == ".common") {
      continue;  // linkage prefix of the next directive
    }
    if (directive == ".entry") {
      KernelCode kernel = parse_entry(in, module.report);
      if (!names.insert(kernel.name).second) {
        throw SyntaxError(line, "duplicate kernel '" + kernel.name + "'");
      }
      module.kernels.push_back(std::move(kernel));
      continue;
    }
    ++module.report.skipped_directives;
    if (is_line_directive(directive)) {
      in.skip_line();
    } else if (directive == ".func") {
      in.skip_function(line);
    } else if (directive == ".section") {
      while (!in.eof() && in.peek() != '{') in.get();
      in.skip_braces(line);
    } else {
      in.skip_statement(line);
    }
  }
  return module;
}

}  // namespace kperf::ptx
