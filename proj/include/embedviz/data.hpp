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

#ifndef EMBEDVIZ_DATA_HPP_
#define EMBEDVIZ_DATA_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "embedviz/error.hpp"
#include "embedviz/matrix.hpp"
#include "embedviz/random.hpp"

namespace embedviz {

inline constexpr int kSafe = -1;
inline constexpr int kFailed = +1;

// Labeled samples: an n x d feature matrix and n labels in {-1, +1}.
// Construction validates; instances are not modified afterwards.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Matrix samples, std::vector<int> labels, std::vector<std::string> feature_names = {})
      : samples_(std::move(samples)),
        labels_(std::move(labels)),
        feature_names_(std::move(feature_names)) {
    detail::require(samples_.rows() == labels_.size(), ErrorKind::kLengthMismatch,
                    "sample rows (" + std::to_string(samples_.rows()) + ") != labels (" +
                        std::to_string(labels_.size()) + ")");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] != kSafe && labels_[i] != kFailed) {
        throw Error(ErrorKind::kBadLabel, "label must be -1 or +1 at row " + std::to_string(i + 1), i + 1);
      }
    }
    for (std::size_t i = 0; i < samples_.rows(); ++i) {
      for (std::size_t j = 0; j < samples_.cols(); ++j) {
        if (!std::isfinite(samples_(i, j))) {
          throw Error(ErrorKind::kNonFinite, "non-finite feature", i + 1, j + 1);
        }
      }
    }
    detail::require(feature_names_.empty() || feature_names_.size() == samples_.cols(),
                    ErrorKind::kInvalidArgument, "feature_names length != feature count");
  }

  const Matrix& samples() const noexcept { return samples_; }
  std::span<const int> labels() const noexcept { return labels_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return samples_.cols(); }

  std::size_t count(int label) const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
  }
  bool has_both_classes() const { return count(kSafe) > 0 && count(kFailed) > 0; }

  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<int> labels;
    labels.reserve(indices.size());
    for (auto i : indices) labels.push_back(labels_[i]);
    return Dataset(samples_.select_rows(indices), std::move(labels), feature_names_);
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Matrix samples_;
  std::vector<int> labels_;
  std::vector<std::string> feature_names_;
};

// Train/test partition. The index vectors refer to rows of the input dataset
// and are sorted ascending.
struct SplitPair {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
  double test_fraction = 0.25;
};

using LabelColumn = std::variant<std::string, std::size_t>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

inline bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

// Shortest decimal that round-trips.
inline std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace detail

// Reads a comma-separated file with one header row. Rows keep file order.
inline Dataset load_csv(const std::filesystem::path& path,
                        const LabelColumn& label_column = std::string("label")) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kMissingFile, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kMalformedCsv, "empty file " + path.string());
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = detail::split_commas(line);

  std::size_t label_index = header.size();
  if (const auto* name = std::get_if<std::string>(&label_column)) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == *name) label_index = c;
    }
    if (label_index == header.size()) {
      throw Error(ErrorKind::kMissingLabelColumn, "no column named '" + *name + "'");
    }
  } else {
    label_index = std::get<std::size_t>(label_column);
    if (label_index >= header.size()) {
      throw Error(ErrorKind::kMissingLabelColumn,
                  "label column index " + std::to_string(label_index) + " out of range");
    }
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_index) names.emplace_back(header[c]);
  }

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto fields = detail::split_commas(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::kMalformedCsv,
                  "row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(header.size()),
                  row);
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double value = 0.0;
      const bool ok = detail::parse_double(fields[c], value);
      if (c == label_index) {
        if (!ok || (value != -1.0 && value != 1.0)) {
          throw Error(ErrorKind::kBadLabel,
                      "row " + std::to_string(row) + ": label '" + std::string(fields[c]) +
                          "' is not -1 or +1",
                      row);
        }
        labels.push_back(value > 0 ? kFailed : kSafe);
      } else {
        if (!ok) {
          throw Error(ErrorKind::kNonNumericFeature,
                      "row " + std::to_string(row) + ", column " + std::to_string(c + 1) +
                          ": '" + std::string(fields[c]) + "' is not a finite number",
                      row, c + 1);
        }
        values.push_back(value);
      }
    }
  }
  Matrix samples(labels.size(), names.size(), std::move(values));
  return Dataset(std::move(samples), std::move(labels), std::move(names));
}

// Writes features then a trailing "label" column.
inline void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (std::size_t j = 0; j < ds.dim(); ++j) {
    out << (ds.feature_names().empty() ? "f" + std::to_string(j + 1) : ds.feature_names()[j]) << ',';
  }
  out << "label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.samples().row(i)) out << detail::format_double(v) << ',';
    out << ds.labels()[i] << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

// Per-column min-max scaling to [0, 1]. Constant columns become 0.
inline Dataset normalize(const Dataset& ds) {
  detail::require(ds.size() >= 1, ErrorKind::kInvalidArgument, "normalize needs at least one row");
  const Matrix& x = ds.samples();
  Matrix out(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double lo = x(0, j), hi = x(0, j);
    for (std::size_t i = 1; i < x.rows(); ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      out(i, j) = range > 0.0 ? (x(i, j) - lo) / range : 0.0;
    }
  }
  return Dataset(std::move(out), std::vector<int>(ds.labels().begin(), ds.labels().end()),
                 ds.feature_names());
}

// Per-class test counts use round-half-up of count * test_fraction. Works on
// labels only, so any representation of the same rows splits identically.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split_indices(
    std::span<const int> labels, double test_fraction, std::uint64_t seed) {
  detail::require(test_fraction > 0.0 && test_fraction < 1.0, ErrorKind::kBadFraction,
                  "test_fraction must be in (0, 1)");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] > 0 ? 1 : 0].push_back(i);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw Error(ErrorKind::kSingleClass, "stratified split needs both classes");
  }
  Rng rng(seed);
  std::vector<std::size_t> train, test;
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    const auto n_test = static_cast<std::size_t>(
        std::floor(static_cast<double>(members.size()) * test_fraction + 0.5));
    test.insert(test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

inline SplitPair stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  auto [train, test] = stratified_split_indices(ds.labels(), test_fraction, seed);
  SplitPair pair{ds.subset(train), ds.subset(test), std::move(train), std::move(test), seed,
                 test_fraction};
  return pair;
}

// Majority (-1) rows ~ N(0, I); minority (+1) rows ~ N(separation * u, I) for
// a random unit direction u. Row order is shuffled.
inline Dataset generate_synthetic(std::size_t n, std::size_t d, double minority_fraction,
                                  double separation, std::uint64_t seed) {
  detail::require(n >= 4, ErrorKind::kInvalidArgument, "n must be >= 4");
  detail::require(d >= 2, ErrorKind::kInvalidArgument, "d must be >= 2");
  if (!(minority_fraction > 0.0 && minority_fraction < 0.5)) {
    throw Error(ErrorKind::kBadFraction, "minority_fraction must be in (0, 0.5)");
  }
  const auto n_pos = static_cast<std::size_t>(std::llround(static_cast<double>(n) * minority_fraction));
  if (n_pos == 0) throw Error(ErrorKind::kBadFraction, "minority_fraction too small for n");

  Rng rng(seed);
  std::vector<double> direction(d);
  double norm = 0.0;
  while (norm == 0.0) {
    for (auto& v : direction) v = rng.normal();
    norm = std::sqrt(dot(direction, direction));
  }
  for (auto& v : direction) v /= norm;

  std::vector<int> labels(n, kSafe);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_pos), kFailed);
  rng.shuffle(std::span<int>(labels));

  Matrix x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double shift = labels[i] == kFailed ? separation : 0.0;
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.normal() + shift * direction[j];
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j + 1));
  return Dataset(std::move(x), std::move(labels), std::move(names));
}

}  // namespace embedviz

#endif  // EMBEDVIZ_DATA_HPP_
