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

#ifndef KPERF_ERROR_HPP_
#define KPERF_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kperf {

// Root of every error raised by the library. `kind()` is a stable
// machine-readable tag used by the CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string_view kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define KPERF_DEFINE_ERROR(Name)                                           \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& message) : Error(#Name, message) {}   \
  }

KPERF_DEFINE_ERROR(UnsupportedFeature);
KPERF_DEFINE_ERROR(KeyMismatch);
KPERF_DEFINE_ERROR(DuplicateKey);
KPERF_DEFINE_ERROR(EmptyGroup);
KPERF_DEFINE_ERROR(EmptySeries);
KPERF_DEFINE_ERROR(NonPositiveTarget);
KPERF_DEFINE_ERROR(EmptyDataset);
KPERF_DEFINE_ERROR(NonFiniteInput);
KPERF_DEFINE_ERROR(ArityMismatch);
KPERF_DEFINE_ERROR(VersionMismatch);
KPERF_DEFINE_ERROR(CorruptModel);
KPERF_DEFINE_ERROR(LengthMismatch);
KPERF_DEFINE_ERROR(NonPositiveTruth);
KPERF_DEFINE_ERROR(TooFewSamples);
KPERF_DEFINE_ERROR(FormatError);
KPERF_DEFINE_ERROR(InvalidArgument);
KPERF_DEFINE_ERROR(IoError);

#undef KPERF_DEFINE_ERROR

// Malformed PTX input; `line()` is 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& message);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Writes a one-line warning to stderr. Library code never aborts on warnings.
void warn(std::string_view message);

}  // namespace kperf

#endif  // KPERF_ERROR_HPP_
