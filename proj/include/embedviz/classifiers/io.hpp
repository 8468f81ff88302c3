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

#ifndef EMBEDVIZ_CLASSIFIERS_IO_HPP_
#define EMBEDVIZ_CLASSIFIERS_IO_HPP_

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "embedviz/error.hpp"
#include "embedviz/matrix.hpp"

// Token-based text encoding used by model files. Doubles are written as
// C99 hex floats so a save/load cycle is exact.
namespace embedviz::model_io {

inline void put(std::ostream& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  out << buf;
}

inline void put(std::ostream& out, std::span<const double> values) {
  out << values.size();
  for (double v : values) {
    out << ' ';
    put(out, v);
  }
  out << '\n';
}

inline std::string token(std::istream& in) {
  std::string t;
  if (!(in >> t)) throw Error(ErrorKind::kBadModelFile, "unexpected end of model file");
  return t;
}

inline void expect(std::istream& in, const std::string& word) {
  const auto t = token(in);
  if (t != word) throw Error(ErrorKind::kBadModelFile, "expected '" + word + "', found '" + t + "'");
}

inline double get_double(std::istream& in) {
  const auto t = token(in);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw Error(ErrorKind::kBadModelFile, "bad number '" + t + "'");
  return v;
}

inline long long get_int(std::istream& in) {
  const auto t = token(in);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) throw Error(ErrorKind::kBadModelFile, "bad integer '" + t + "'");
  return v;
}

inline std::size_t get_size(std::istream& in) {
  const auto v = get_int(in);
  if (v < 0) throw Error(ErrorKind::kBadModelFile, "negative count");
  return static_cast<std::size_t>(v);
}

inline std::vector<double> get_vector(std::istream& in) {
  const auto n = get_size(in);
  std::vector<double> out(n);
  for (auto& v : out) v = get_double(in);
  return out;
}

inline void put_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  put(out, m.data());
}

inline Matrix get_matrix(std::istream& in) {
  const auto rows = get_size(in);
  const auto cols = get_size(in);
  auto data = get_vector(in);
  if (data.size() != rows * cols) throw Error(ErrorKind::kBadModelFile, "matrix size mismatch");
  return Matrix(rows, cols, std::move(data));
}

}  // namespace embedviz::model_io

#endif  // EMBEDVIZ_CLASSIFIERS_IO_HPP_
