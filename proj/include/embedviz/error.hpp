/*
 * Copyright 2026 The embedviz Authors.
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

#ifndef EMBEDVIZ_ERROR_HPP_
#define EMBEDVIZ_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace embedviz {

enum class ErrorKind {
  kInvalidArgument,
  kMissingFile,
  kBadLabel,
  kNonNumericFeature,
  kMissingLabelColumn,
  kMalformedCsv,
  kSingleClass,
  kBadFraction,
  kDegenerateRow,
  kNonFinite,
  kInsufficientMinority,
  kDimensionMismatch,
  kLengthMismatch,
  kDegenerateError,
  kBadModelFile,
  kIo,
};

inline std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kMissingFile: return "MissingFile";
    case ErrorKind::kBadLabel: return "BadLabel";
    case ErrorKind::kNonNumericFeature: return "NonNumericFeature";
    case ErrorKind::kMissingLabelColumn: return "MissingLabelColumn";
    case ErrorKind::kMalformedCsv: return "MalformedCsv";
    case ErrorKind::kSingleClass: return "SingleClass";
    case ErrorKind::kBadFraction: return "BadFraction";
    case ErrorKind::kDegenerateRow: return "DegenerateRow";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kInsufficientMinority: return "InsufficientMinority";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kDegenerateError: return "DegenerateError";
    case ErrorKind::kBadModelFile: return "BadModelFile";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

// All library failures are reported through this exception. row() and col()
// are 1-based positions when the failure is tied to a data cell, 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::size_t row = 0,
        std::size_t col = 0)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind),
        row_(row),
        col_(col) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

  // Same error with a stage prefix, used by the pipeline.
  Error annotated(std::string_view stage) const {
    Error copy(kind_, std::string(stage) + ": " + message_body(), row_, col_);
    return copy;
  }

 private:
  std::string message_body() const {
    std::string_view all = what();
    const auto prefix = error_kind_name(kind_).size() + 2;
    return std::string(all.substr(prefix));
  }

  ErrorKind kind_;
  std::size_t row_;
  std::size_t col_;
};

namespace detail {

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace detail

}  // namespace embedviz

#endif  // EMBEDVIZ_ERROR_HPP_
