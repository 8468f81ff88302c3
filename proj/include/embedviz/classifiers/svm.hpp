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

#ifndef EMBEDVIZ_CLASSIFIERS_SVM_HPP_
#define EMBEDVIZ_CLASSIFIERS_SVM_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <list>
#include <ostream>
#include <span>
#include <vector>

#include "embedviz/classifiers/io.hpp"
#include "embedviz/data.hpp"

namespace embedviz {

struct SvmParams {
  double gamma = 2.0;
  double C = 1.0;
  double tol = 1e-3;
  // Iteration cap is max_passes * n (at least 100000).
  std::size_t max_passes = 100;
  std::size_t cache_megabytes = 256;
};

struct SvmSolution {
  std::vector<double> alpha;
  double bias = 0.0;  // decision(x) = sum_i alpha_i y_i K(x_i, x) + bias
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

// Rows of the RBF Gram matrix, computed on demand and kept in an LRU cache.
class RbfKernelRows {
 public:
  RbfKernelRows(const Matrix& x, double gamma, std::size_t budget_bytes)
      : x_(x), gamma_(gamma), slot_of_(x.rows(), kNone) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.rows()) * sizeof(double);
    capacity_ = std::clamp<std::size_t>(budget_bytes / row_bytes, 2, std::max<std::size_t>(2, x.rows()));
  }

  double value(std::size_t i, std::size_t j) const {
    return std::exp(-gamma_ * squared_distance(x_.row(i), x_.row(j)));
  }

  std::span<const double> row(std::size_t i) {
    if (slot_of_[i] != kNone) {
      lru_.splice(lru_.begin(), lru_, positions_[slot_of_[i]]);
      return slots_[slot_of_[i]];
    }
    std::size_t slot;
    if (slots_.size() < capacity_) {
      slot = slots_.size();
      slots_.emplace_back(x_.rows());
      owner_.push_back(i);
      positions_.push_back(lru_.insert(lru_.begin(), slot));
    } else {
      slot = lru_.back();
      slot_of_[owner_[slot]] = kNone;
      owner_[slot] = i;
      lru_.splice(lru_.begin(), lru_, positions_[slot]);
    }
    slot_of_[i] = slot;
    auto& data = slots_[slot];
    for (std::size_t j = 0; j < x_.rows(); ++j) data[j] = j == i ? 1.0 : value(i, j);
    return data;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  const Matrix& x_;
  double gamma_;
  std::size_t capacity_;
  std::vector<std::vector<double>> slots_;
  std::vector<std::size_t> owner_;
  std::vector<std::list<std::size_t>::iterator> positions_;
  std::list<std::size_t> lru_;
  std::vector<std::size_t> slot_of_;
};

}  // namespace detail

// SMO on the C-SVM dual with maximal-violating-pair / second-order working
// set selection and an incrementally maintained gradient.
inline SvmSolution solve_svm_dual(const Matrix& x, std::span<const int> y, const SvmParams& params) {
  const std::size_t n = x.rows();
  const double C = params.C;
  constexpr double kTau = 1e-12;
  detail::RbfKernelRows kernel(x, params.gamma, params.cache_megabytes << 20);

  SvmSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 0.5 a'Qa - e'a
  auto& alpha = sol.alpha;
  auto yd = [&](std::size_t t) { return static_cast<double>(y[t]); };
  auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };

  const std::size_t max_iter = std::max<std::size_t>(100000, params.max_passes * n);
  while (sol.iterations < max_iter) {
    double g_max = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -yd(t) * grad[t] >= g_max) {
        g_max = -yd(t) * grad[t];
        i = t;
      }
    }
    if (i == n) {
      sol.converged = true;
      break;
    }
    const auto k_i = kernel.row(i);
    double g_max2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = yd(t) * grad[t];
      g_max2 = std::max(g_max2, v);
      const double b = g_max + v;
      if (b > 0.0) {
        double a = 2.0 - 2.0 * k_i[t];  // K_ii + K_tt - 2 K_it with K_tt = 1
        if (a <= 0.0) a = kTau;
        const double obj = -(b * b) / a;
        if (obj <= best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (g_max + g_max2 < params.tol || j == n) {
      sol.converged = true;
      break;
    }
    ++sol.iterations;

    const double k_ij = k_i[j];
    double quad = 2.0 - 2.0 * k_ij;
    if (quad <= 0.0) quad = kTau;
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double d_i = (alpha[i] - old_i) * yd(i);
    const double d_j = (alpha[j] - old_j) * yd(j);
    const auto k_i_again = kernel.row(i);
    const auto k_j = kernel.row(j);
    for (std::size_t t = 0; t < n; ++t) grad[t] += yd(t) * (k_i_again[t] * d_i + k_j[t] * d_j);
  }

  // Offset from free vectors, or the midpoint of the feasible interval.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = yd(t) * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else {
      free_sum += yg;
      ++n_free;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : 0.5 * (upper + lower);
  sol.bias = -rho;
  return sol;
}

// RBF-kernel SVM; the score is the signed decision value (threshold 0).
class SvmModel {
 public:
  static SvmModel fit(const Dataset& train, const SvmParams& params, SvmSolution* solution = nullptr) {
    detail::require(params.gamma > 0.0, ErrorKind::kInvalidArgument, "gamma must be > 0");
    detail::require(params.C > 0.0, ErrorKind::kInvalidArgument, "C must be > 0");
    auto sol = solve_svm_dual(train.samples(), train.labels(), params);
    SvmModel m;
    m.gamma_ = params.gamma;
    m.bias_ = sol.bias;
    m.converged_ = sol.converged;
    m.support_ = Matrix(0, train.dim());
    for (std::size_t t = 0; t < train.size(); ++t) {
      if (sol.alpha[t] > 0.0) {
        m.support_.append_row(train.samples().row(t));
        m.coef_.push_back(sol.alpha[t] * train.labels()[t]);
      }
    }
    if (solution) *solution = std::move(sol);
    return m;
  }

  double score(std::span<const double> query) const {
    double sum = bias_;
    for (std::size_t s = 0; s < support_.rows(); ++s) {
      sum += coef_[s] * std::exp(-gamma_ * squared_distance(query, support_.row(s)));
    }
    return sum;
  }

  static constexpr double threshold() { return 0.0; }
  bool converged() const { return converged_; }
  std::size_t support_count() const { return support_.rows(); }

  void save(std::ostream& out) const {
    out << "gamma ";
    model_io::put(out, gamma_);
    out << "\nbias ";
    model_io::put(out, bias_);
    out << '\n';
    model_io::put_matrix(out, support_);
    model_io::put(out, coef_);
  }

  static SvmModel load(std::istream& in) {
    SvmModel m;
    model_io::expect(in, "gamma");
    m.gamma_ = model_io::get_double(in);
    model_io::expect(in, "bias");
    m.bias_ = model_io::get_double(in);
    m.support_ = model_io::get_matrix(in);
    m.coef_ = model_io::get_vector(in);
    if (m.coef_.size() != m.support_.rows()) throw Error(ErrorKind::kBadModelFile, "SVM coefficient count");
    return m;
  }

 private:
  double gamma_ = 2.0;
  double bias_ = 0.0;
  bool converged_ = true;
  Matrix support_;
  std::vector<double> coef_;
};

}  // namespace embedviz

#endif  // EMBEDVIZ_CLASSIFIERS_SVM_HPP_
