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

#ifndef EMBEDVIZ_TSNE_HPP_
#define EMBEDVIZ_TSNE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "embedviz/data.hpp"
#include "embedviz/error.hpp"
#include "embedviz/matrix.hpp"
#include "embedviz/parallel.hpp"
#include "embedviz/random.hpp"

namespace embedviz {

// Exact (O(n^2)) t-SNE into two dimensions.
struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration_factor = 12.0;
  int exaggeration_iters = 250;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int momentum_switch_iter = 250;
  double init_stddev = 1e-4;
  std::uint64_t seed = 42;
  double calibration_tolerance = 1e-5;
  int calibration_max_steps = 64;
  // Per-coordinate step gains (+0.2 on sign change, x0.8 otherwise, floor 0.01).
  bool adaptive_gains = true;

  void validate(std::size_t n) const {
    using detail::require;
    require(perplexity >= 2.0, ErrorKind::kInvalidArgument, "perplexity must be >= 2");
    require(n >= 2 && perplexity <= static_cast<double>(n - 1), ErrorKind::kInvalidArgument,
            "perplexity " + std::to_string(perplexity) + " exceeds n - 1 = " +
                std::to_string(n == 0 ? 0 : n - 1));
    require(iterations >= 1, ErrorKind::kInvalidArgument, "iterations must be >= 1");
    require(learning_rate > 0 && early_exaggeration_factor > 0 && momentum_initial > 0 &&
                momentum_final > 0 && init_stddev > 0 && calibration_tolerance > 0,
            ErrorKind::kInvalidArgument, "t-SNE rates must be > 0");
    require(exaggeration_iters >= 0 && momentum_switch_iter >= 0 && calibration_max_steps >= 1,
            ErrorKind::kInvalidArgument, "t-SNE iteration counts must be non-negative");
  }
};

struct SigmaCalibration {
  double sigma = 0.0;
  std::vector<double> probs;
  double perplexity = 0.0;  // achieved 2^H
  bool converged = false;
  int steps = 0;
};

// Conditional Gaussian affinities p_{j|i}; row i sums to one, diagonal zero.
struct ConditionalAffinities {
  Matrix p_cond;
  std::vector<double> sigmas;
  std::size_t unconverged_rows = 0;
};

// Joint symmetric affinities p_ij; sums to one, zero diagonal.
struct AffinityMatrix {
  Matrix p;
};

struct LowDimAffinities {
  Matrix q;
  Matrix kernel;
};

struct Embedding {
  Matrix points;  // n x 2
  double final_kl = 0.0;
  std::vector<double> history;  // KL at the start of every iteration
  std::size_t unconverged_rows = 0;
  double perplexity = 0.0;
};

inline constexpr double kQFloor = 1e-12;

namespace detail {

// Perplexity exp(H) (H in nats) of the Gaussian row at bandwidth sigma.
// Distances are shifted by their minimum so tiny sigmas do not underflow.
inline double row_perplexity(std::span<const double> sq, double shift, double sigma,
                             std::vector<double>* probs) {
  const double beta = 1.0 / (2.0 * sigma * sigma);
  double sum = 0.0, weighted = 0.0;
  if (probs) probs->resize(sq.size());
  for (std::size_t j = 0; j < sq.size(); ++j) {
    const double delta = sq[j] - shift;
    const double w = std::exp(-beta * delta);
    sum += w;
    weighted += w * delta;
    if (probs) (*probs)[j] = w;
  }
  if (probs) {
    for (auto& p : *probs) p /= sum;
  }
  const double entropy = std::log(sum) + beta * weighted / sum;
  return std::exp(entropy);
}

}  // namespace detail

// Finds sigma with 2^H(p_{.|i}) = perplexity by bisection on log(sigma). The
// bracket is grown by doubling/halving from the RMS distance first.
inline SigmaCalibration calibrate_sigma(std::span<const double> sq_distances_row, double perplexity,
                                        double tol = 1e-5, int max_steps = 64) {
  const std::size_t m = sq_distances_row.size();
  detail::require(m >= 1, ErrorKind::kInvalidArgument, "empty distance row");
  detail::require(perplexity > 1.0 && perplexity <= static_cast<double>(m),
                  ErrorKind::kInvalidArgument,
                  "perplexity must lie in (1, " + std::to_string(m) + "]");
  double shift = std::numeric_limits<double>::infinity();
  double mean = 0.0;
  bool any_positive = false;
  for (double d : sq_distances_row) {
    detail::require(std::isfinite(d) && d >= 0.0, ErrorKind::kInvalidArgument,
                    "squared distances must be finite and >= 0");
    shift = std::min(shift, d);
    mean += d;
    any_positive = any_positive || d > 0.0;
  }
  if (!any_positive) throw Error(ErrorKind::kDegenerateRow, "all distances are zero");
  mean /= static_cast<double>(m);

  SigmaCalibration best;
  double best_gap = std::numeric_limits<double>::infinity();
  auto evaluate = [&](double sigma) {
    const double perp = detail::row_perplexity(sq_distances_row, shift, sigma, nullptr);
    if (std::abs(perp - perplexity) < best_gap) {
      best_gap = std::abs(perp - perplexity);
      best.sigma = sigma;
      best.perplexity = perp;
    }
    return perp;
  };

  double lo = std::sqrt(mean), hi = lo;
  double perp = evaluate(lo);
  if (perp > perplexity) {
    for (int k = 0; k < 1100 && best_gap >= tol && perp > perplexity && lo > 0.0; ++k) {
      hi = lo;
      lo *= 0.5;
      perp = evaluate(lo);
    }
  } else {
    for (int k = 0; k < 1100 && best_gap >= tol && perp < perplexity && std::isfinite(hi); ++k) {
      lo = hi;
      hi *= 2.0;
      perp = evaluate(hi);
    }
  }

  int steps = 0;
  while (best_gap >= tol && steps < max_steps && lo > 0.0 && std::isfinite(hi)) {
    const double mid = std::exp(0.5 * (std::log(lo) + std::log(hi)));
    ++steps;
    if (evaluate(mid) > perplexity) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  best.steps = steps;
  best.converged = best_gap < tol;
  best.perplexity = detail::row_perplexity(sq_distances_row, shift, best.sigma, &best.probs);
  return best;
}

// Pairwise squared Euclidean distances via |a|^2 + |b|^2 - 2 a.b, clamped at 0.
inline Matrix squared_distance_matrix(const Matrix& x) {
  const std::size_t n = x.rows();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = dot(x.row(i), x.row(i));
  Matrix d(n, n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        d(i, j) = i == j ? 0.0 : std::max(0.0, norms[i] + norms[j] - 2.0 * dot(x.row(i), x.row(j)));
      }
    }
  });
  return d;
}

inline ConditionalAffinities conditional_affinities(const Matrix& x, const TsneConfig& cfg) {
  const std::size_t n = x.rows();
  detail::require(n >= 3, ErrorKind::kInvalidArgument, "t-SNE needs at least 3 samples");
  cfg.validate(n);
  for (double v : x.data()) {
    detail::require(std::isfinite(v), ErrorKind::kNonFinite, "non-finite input feature");
  }
  const Matrix dist = squared_distance_matrix(x);
  ConditionalAffinities out{Matrix(n, n), std::vector<double>(n), 0};
  std::vector<char> converged(n, 1);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(n - 1);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0, k = 0; j < n; ++j) {
        if (j != i) row[k++] = dist(i, j);
      }
      SigmaCalibration cal;
      try {
        cal = calibrate_sigma(row, cfg.perplexity, cfg.calibration_tolerance,
                              cfg.calibration_max_steps);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDegenerateRow) throw;
        throw Error(ErrorKind::kDegenerateRow,
                    "row " + std::to_string(i + 1) + " coincides with every other sample", i + 1);
      }
      out.sigmas[i] = cal.sigma;
      converged[i] = cal.converged ? 1 : 0;
      for (std::size_t j = 0, k = 0; j < n; ++j) {
        out.p_cond(i, j) = j == i ? 0.0 : cal.probs[k++];
      }
    }
  });
  out.unconverged_rows = static_cast<std::size_t>(std::count(converged.begin(), converged.end(), 0));
  return out;
}

// p_ij = (p_{i|j} + p_{j|i}) / 2n.
inline AffinityMatrix symmetrize(const ConditionalAffinities& cond) {
  const Matrix& c = cond.p_cond;
  const std::size_t n = c.rows();
  const double denom = 2.0 * static_cast<double>(n);
  AffinityMatrix out{Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.p(i, j) = i == j ? 0.0 : (c(i, j) + c(j, i)) / denom;
    }
  }
  return out;
}

// Student-t kernel 1 / (1 + |y_i - y_j|^2), normalized over all off-diagonal pairs.
inline LowDimAffinities low_dim_affinities(const Matrix& y) {
  const std::size_t n = y.rows();
  detail::require(n >= 2, ErrorKind::kInvalidArgument, "need at least 2 map points");
  LowDimAffinities out{Matrix(n, n), Matrix(n, n)};
  std::vector<double> row_sums(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double k = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
      out.kernel(i, j) = k;
      row_sums[i] += k;
    }
  }
  double total = 0.0;
  for (double s : row_sums) total += s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.q(i, j) = out.kernel(i, j) / total;
  }
  return out;
}

// sum_{i != j} p_ij log(p_ij / max(q_ij, 1e-12)), natural log, 0 log 0 = 0.
inline double kl_divergence(const Matrix& p, const Matrix& q) {
  detail::require(p.rows() == q.rows() && p.cols() == q.cols(), ErrorKind::kDimensionMismatch,
                  "P and Q shapes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < p.cols(); ++j) {
      const double pij = p(i, j);
      if (i == j || pij <= 0.0) continue;
      row += pij * std::log(pij / std::max(q(i, j), kQFloor));
    }
    total += row;
  }
  return total;
}

inline double kl_divergence(const AffinityMatrix& p, const Matrix& q) {
  return kl_divergence(p.p, q);
}

// dKL/dy_i = 4 sum_j (p_ij - q_ij) kernel_ij (y_i - y_j).
inline Matrix tsne_gradient(const Matrix& p, const Matrix& q, const Matrix& kernel, const Matrix& y) {
  const std::size_t n = y.rows();
  detail::require(p.rows() == n && q.rows() == n && kernel.rows() == n,
                  ErrorKind::kDimensionMismatch, "gradient inputs have inconsistent shapes");
  Matrix grad(n, y.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double mult = (p(i, j) - q(i, j)) * kernel(i, j);
      for (std::size_t c = 0; c < y.cols(); ++c) grad(i, c) += mult * (y(i, c) - y(j, c));
    }
    for (std::size_t c = 0; c < y.cols(); ++c) grad(i, c) *= 4.0;
  }
  return grad;
}

inline Matrix tsne_gradient(const AffinityMatrix& p, const Matrix& q, const Matrix& kernel,
                            const Matrix& y) {
  return tsne_gradient(p.p, q, kernel, y);
}

namespace detail {

// One fused O(n^2) sweep over the map: gradient of KL(exaggeration * P || Q)
// and KL(P || Q) itself, without materializing Q. Rows are independent; every
// reduction happens per row and then in row order.
class TsneObjective {
 public:
  explicit TsneObjective(const Matrix& p)
      : p_(p), n_(p.rows()), upper_mass_(n_, 0.0), repulse_(n_, 2) {
    for (std::size_t i = 0; i < n_; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        const double pij = p(i, j);
        if (i == j || pij <= 0.0) continue;
        row += pij * std::log(pij);
        if (j > i) upper_mass_[i] += pij;
      }
      entropy_term_ += row;
    }
  }

  // Returns KL at y and fills grad (n x 2).
  double evaluate(const Matrix& y, double exaggeration, Matrix& grad) {
    std::vector<double> z_rows(n_), log_rows(n_), min_kernel(n_);
    parallel_for(n_, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const double yi0 = y(i, 0), yi1 = y(i, 1);
        const auto prow = p_.row(i);
        double z = 0.0, a0 = 0.0, a1 = 0.0, r0 = 0.0, r1 = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
          if (j == i) continue;
          const double dx = yi0 - y(j, 0), dy = yi1 - y(j, 1);
          const double k = 1.0 / (1.0 + dx * dx + dy * dy);
          z += k;
          const double pk = prow[j] * k;
          a0 += pk * dx;
          a1 += pk * dy;
          const double kk = k * k;
          r0 += kk * dx;
          r1 += kk * dy;
        }
        z_rows[i] = z;
        grad(i, 0) = a0;  // attractive part, finished below
        grad(i, 1) = a1;
        repulse_(i, 0) = r0;
        repulse_(i, 1) = r1;
        double logs = 0.0, kmin = 1.0;
        for (std::size_t j = i + 1; j < n_; ++j) {
          if (prow[j] <= 0.0) continue;
          const double dx = yi0 - y(j, 0), dy = yi1 - y(j, 1);
          const double k = 1.0 / (1.0 + dx * dx + dy * dy);
          logs += prow[j] * std::log(k);
          kmin = std::min(kmin, k);
        }
        log_rows[i] = logs;
        min_kernel[i] = kmin;
      }
    }, 8);
    double z = 0.0;
    for (double v : z_rows) z += v;
    const double log_z = std::log(z);
    double cross = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      grad(i, 0) = 4.0 * (exaggeration * grad(i, 0) - repulse_(i, 0) / z);
      grad(i, 1) = 4.0 * (exaggeration * grad(i, 1) - repulse_(i, 1) / z);
      if (min_kernel[i] / z >= kQFloor) {
        cross += log_rows[i] - upper_mass_[i] * log_z;
      } else {
        cross += floored_row(y, i, z);
      }
    }
    return entropy_term_ - 2.0 * cross;
  }

 private:
  double floored_row(const Matrix& y, std::size_t i, double z) const {
    double sum = 0.0;
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double pij = p_(i, j);
      if (pij <= 0.0) continue;
      const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
      const double q = (1.0 / (1.0 + dx * dx + dy * dy)) / z;
      sum += pij * std::log(std::max(q, kQFloor));
    }
    return sum;
  }

  const Matrix& p_;
  std::size_t n_;
  std::vector<double> upper_mass_;
  double entropy_term_ = 0.0;
  Matrix repulse_;
};

}  // namespace detail

// Momentum gradient descent on KL(P || Q) starting from Y ~ N(0, init_stddev^2).
// P is multiplied by the exaggeration factor for the first exaggeration_iters.
inline Embedding run_tsne_from_affinities(const AffinityMatrix& affinities, const TsneConfig& cfg) {
  const Matrix& p = affinities.p;
  const std::size_t n = p.rows();
  cfg.validate(n);
  detail::require(n >= 3, ErrorKind::kInvalidArgument, "t-SNE needs at least 3 samples");

  Rng rng(cfg.seed);
  Matrix y(n, 2);
  for (auto& v : y.data()) v = rng.normal(0.0, cfg.init_stddev);

  detail::TsneObjective objective(p);
  Matrix grad(n, 2), update(n, 2), gains(n, 2, 1.0);
  Embedding out;
  out.perplexity = cfg.perplexity;
  out.history.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const double exaggeration = iter < cfg.exaggeration_iters ? cfg.early_exaggeration_factor : 1.0;
    const double momentum = iter < cfg.momentum_switch_iter ? cfg.momentum_initial : cfg.momentum_final;
    out.history.push_back(objective.evaluate(y, exaggeration, grad));

    auto g = grad.data();
    auto u = update.data();
    auto gain = gains.data();
    auto coords = y.data();
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (cfg.adaptive_gains) {
        gain[k] = (g[k] > 0.0) != (u[k] > 0.0) ? gain[k] + 0.2 : gain[k] * 0.8;
        gain[k] = std::max(gain[k], 0.01);
      }
      u[k] = momentum * u[k] - cfg.learning_rate * gain[k] * g[k];
      coords[k] += u[k];
    }
    double mean0 = 0.0, mean1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean0 += y(i, 0);
      mean1 += y(i, 1);
    }
    mean0 /= static_cast<double>(n);
    mean1 /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y(i, 0) -= mean0;
      y(i, 1) -= mean1;
    }
    if (!std::isfinite(mean0) || !std::isfinite(mean1)) {
      throw Error(ErrorKind::kNonFinite, "map coordinates diverged at iteration " +
                                             std::to_string(iter + 1) +
                                             "; lower the learning rate");
    }
  }
  out.final_kl = objective.evaluate(y, 1.0, grad);
  for (double v : y.data()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNonFinite, "map coordinates are not finite");
  }
  out.points = std::move(y);
  return out;
}

inline AffinityMatrix joint_affinities(const Matrix& x, const TsneConfig& cfg) {
  return symmetrize(conditional_affinities(x, cfg));
}

inline Embedding run_tsne(const Matrix& x, const TsneConfig& cfg) {
  const auto cond = conditional_affinities(x, cfg);
  Embedding out = run_tsne_from_affinities(symmetrize(cond), cfg);
  out.unconverged_rows = cond.unconverged_rows;
  return out;
}

// One embedding per perplexity value, each with its own derived seed.
inline std::vector<Embedding> perplexity_sweep(const Matrix& x, const TsneConfig& cfg,
                                               std::span<const double> values) {
  for (double v : values) {
    detail::require(v >= 2.0 && v <= static_cast<double>(x.rows()) - 1.0,
                    ErrorKind::kInvalidArgument,
                    "sweep perplexity " + std::to_string(v) + " outside [2, n - 1]");
  }
  std::vector<Embedding> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    TsneConfig run_cfg = cfg;
    run_cfg.perplexity = values[i];
    run_cfg.seed = derive_seed(cfg.seed, i);
    out.push_back(run_tsne(x, run_cfg));
  }
  return out;
}

inline void write_embedding_csv(const Matrix& points, std::span<const int> labels,
                                const std::filesystem::path& path) {
  detail::require(points.cols() == 2 && points.rows() == labels.size(),
                  ErrorKind::kDimensionMismatch, "embedding export needs n x 2 points and n labels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "x,y,label\n";
  for (std::size_t i = 0; i < points.rows(); ++i) {
    out << detail::format_double(points(i, 0)) << ',' << detail::format_double(points(i, 1)) << ','
        << labels[i] << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace embedviz

#endif  // EMBEDVIZ_TSNE_HPP_
