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

// Line-oriented tabular files shared by every kperf artifact.
//
//   # <format> v<version>: col_a,col_b,...
//   # key=value            (zero or more metadata lines)
//   a,b,...                (comma-separated records, no quoting)
//
// Fields may not contain commas or line breaks. Doubles are written in the
// shortest form that parses back to the identical value.

#ifndef KPERF_TABULAR_HPP_
#define KPERF_TABULAR_HPP_

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kperf {

struct Table {
  std::string format;
  int version = 1;
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row, filled by read_table.
  std::vector<std::size_t> row_lines;
  std::string source;

  // Index of `name` in `columns`; FormatError if absent.
  std::size_t column(std::string_view name) const;
  // Metadata value for `key`; FormatError if absent.
  const std::string& meta(std::string_view key) const;
  // "source:line" for diagnostics about row `i`.
  std::string where(std::size_t i) const;
};

void write_table(std::ostream& out, const Table& table);
std::string to_string(const Table& table);

// Parses a table and checks its format tag, version, and (when given) the
// exact column list. FormatError on mismatch, VersionMismatch on version.
Table read_table(std::istream& in, std::string_view format, int version,
                 std::initializer_list<std::string_view> columns = {},
                 std::string source = "<stream>");
Table read_table_file(const std::filesystem::path& path,
                      std::string_view format, int version,
                      std::initializer_list<std::string_view> columns = {});
void write_table_file(const std::filesystem::path& path, const Table& table);

std::string format_double(double value);
double parse_double(std::string_view text, std::string_view where);
std::uint64_t parse_uint(std::string_view text, std::string_view where);

std::vector<std::string_view> split(std::string_view text, char sep);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Lowercase hex SHA-256 of `content`.
std::string sha256_hex(std::string_view content);

}  // namespace kperf

#endif  // KPERF_TABULAR_HPP_
