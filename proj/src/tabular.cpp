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

#include "kperf/tabular.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

#include "kperf/error.hpp"

namespace kperf {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

void check_field(std::string_view field) {
  if (field.find_first_of(",\n\r") != std::string_view::npos) {
    throw FormatError(fmt::format("field '{}' contains a separator", field));
  }
}

// Splits "# <format> v<version>: cols" into its three parts.
bool parse_header(std::string_view line, std::string& format, int& version,
                  std::vector<std::string>& columns) {
  if (line.size() < 2 || line[0] != '#') return false;
  line = trim(line.substr(1));
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) return false;
  std::string_view tag = trim(line.substr(0, colon));
  const auto space = tag.rfind(' ');
  if (space == std::string_view::npos) return false;
  std::string_view ver = tag.substr(space + 1);
  if (ver.size() < 2 || ver[0] != 'v') return false;
  ver.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(ver.data(), ver.data() + ver.size(), version);
  if (ec != std::errc() || ptr != ver.data() + ver.size()) return false;
  format = std::string(trim(tag.substr(0, space)));
  columns.clear();
  for (auto c : split(trim(line.substr(colon + 1)), ',')) {
    columns.emplace_back(trim(c));
  }
  return !format.empty();
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw FormatError(fmt::format("{}: missing column '{}'", source, name));
}

const std::string& Table::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  throw FormatError(fmt::format("{}: missing metadata '{}'", source, key));
}

std::string Table::where(std::size_t i) const {
  return fmt::format("{}:{}", source, i < row_lines.size() ? row_lines[i] : 0);
}

void write_table(std::ostream& out, const Table& table) {
  out << "# " << table.format << " v" << table.version << ": ";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    check_field(table.columns[i]);
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& [key, value] : table.metadata) {
    if (key.find_first_of("=\n") != std::string::npos ||
        value.find('\n') != std::string::npos) {
      throw FormatError(fmt::format("bad metadata entry '{}'", key));
    }
    out << "# " << key << '=' << value << '\n';
  }
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw FormatError(fmt::format("{} row has {} fields, expected {}",
                                    table.format, row.size(),
                                    table.columns.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      check_field(row[i]);
      out << (i ? "," : "") << row[i];
    }
    out << '\n';
  }
}

std::string to_string(const Table& table) {
  std::ostringstream out;
  write_table(out, table);
  return out.str();
}

Table read_table(std::istream& in, std::string_view format, int version,
                 std::initializer_list<std::string_view> columns,
                 std::string source) {
  Table table;
  table.source = std::move(source);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (!have_header) {
      if (view.empty()) continue;
      if (!parse_header(view, table.format, table.version, table.columns)) {
        throw FormatError(fmt::format("{}:{}: expected '# {} v{}: ...' header",
                                      table.source, line_no, format, version));
      }
      have_header = true;
      if (table.format != format) {
        throw FormatError(fmt::format("{}: expected format '{}', found '{}'",
                                      table.source, format, table.format));
      }
      if (table.version != version) {
        throw VersionMismatch(fmt::format("{}: {} version {} is not supported (expected {})",
                                          table.source, format, table.version, version));
      }
      if (columns.size() != 0) {
        bool same = columns.size() == table.columns.size();
        std::size_t i = 0;
        for (auto c : columns) {
          if (!same) break;
          same = table.columns[i++] == c;
        }
        if (!same) {
          throw FormatError(fmt::format("{}: unexpected column layout", table.source));
        }
      }
      continue;
    }
    if (view.empty()) continue;
    if (view.front() == '#') {
      view = trim(view.substr(1));
      const auto eq = view.find('=');
      if (eq != std::string_view::npos) {
        table.metadata.emplace_back(std::string(trim(view.substr(0, eq))),
                                    std::string(trim(view.substr(eq + 1))));
      }
      continue;
    }
    std::vector<std::string> row;
    for (auto field : split(view, ',')) row.emplace_back(trim(field));
    if (row.size() != table.columns.size()) {
      throw FormatError(fmt::format("{}:{}: {} fields, expected {}", table.source,
                                    line_no, row.size(), table.columns.size()));
    }
    table.rows.push_back(std::move(row));
    table.row_lines.push_back(line_no);
  }
  if (!have_header) {
    throw FormatError(fmt::format("{}: empty file, expected {} table", table.source, format));
  }
  return table;
}

Table read_table_file(const std::filesystem::path& path, std::string_view format,
                      int version, std::initializer_list<std::string_view> columns) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  return read_table(in, format, version, columns, path.string());
}

void write_table_file(const std::filesystem::path& path, const Table& table) {
  write_file(path, to_string(table));
}

std::string format_double(double value) {
  if (!std::isfinite(value)) {
    throw NonFiniteInput(fmt::format("cannot serialize non-finite value {}", value));
  }
  return fmt::format("{}", value);
}

double parse_double(std::string_view text, std::string_view where) {
  double value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw FormatError(fmt::format("{}: '{}' is not a finite number", where, text));
  }
  return value;
}

std::uint64_t parse_uint(std::string_view text, std::string_view where) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw FormatError(fmt::format("{}: '{}' is not a non-negative integer", where, text));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::string sha256_hex(std::string_view content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw Error("DigestError", "SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace kperf
