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

#ifndef EMBEDVIZ_CLASSIFIERS_MLP_HPP_
#define EMBEDVIZ_CLASSIFIERS_MLP_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "embedviz/classifiers/io.hpp"
#include "embedviz/data.hpp"
#include "embedviz/parallel.hpp"
#include "embedviz/random.hpp"

namespace embedviz {

inline constexpr std::size_t kMlpPenaltyBatch = 200;

struct MlpParams {
  std::size_t hidden_units = 100;
  double alpha = 1.0;  // L2 strength; penalty is alpha / (2 min(n, 200)) * |W|^2
  std::size_t max_epochs = 1000;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;
};

// One hidden ReLU layer and a sigmoid output unit. All parameters live in one
// flat vector: [W1 (inputs x hidden, row-major), b1, w2, b2].
struct MlpNetwork {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> params;

  std::size_t w1_offset() const { return 0; }
  std::size_t b1_offset() const { return inputs * hidden; }
  std::size_t w2_offset() const { return inputs * hidden + hidden; }
  std::size_t b2_offset() const { return inputs * hidden + 2 * hidden; }
  std::size_t size() const { return inputs * hidden + 2 * hidden + 1; }

  // Glorot-uniform initialization for weights and biases.
  static MlpNetwork initialize(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
    MlpNetwork net{inputs, hidden, {}};
    net.params.resize(net.size());
    Rng rng(seed);
    const double bound1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
    const double bound2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
    for (std::size_t k = 0; k < net.w2_offset(); ++k) net.params[k] = rng.uniform(-bound1, bound1);
    for (std::size_t k = net.w2_offset(); k < net.size(); ++k) net.params[k] = rng.uniform(-bound2, bound2);
    return net;
  }

  // Pre-sigmoid output for one sample. hidden_out receives ReLU activations.
  double logit(std::span<const double> x, std::span<double> hidden_out) const {
    const double* w1 = params.data() + w1_offset();
    const double* b1 = params.data() + b1_offset();
    std::copy(b1, b1 + hidden, hidden_out.begin());
    for (std::size_t k = 0; k < inputs; ++k) {
      const double xk = x[k];
      const double* wrow = w1 + k * hidden;
      for (std::size_t h = 0; h < hidden; ++h) hidden_out[h] += xk * wrow[h];
    }
    const double* w2 = params.data() + w2_offset();
    double z = params[b2_offset()];
    for (std::size_t h = 0; h < hidden; ++h) {
      hidden_out[h] = std::max(0.0, hidden_out[h]);
      z += hidden_out[h] * w2[h];
    }
    return z;
  }

  double output(std::span<const double> x) const {
    std::vector<double> h(hidden);
    const double z = logit(x, h);
    return 1.0 / (1.0 + std::exp(-z));
  }
};

namespace detail {

// log(1 + e^z) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline constexpr std::size_t kMlpChunkRows = 64;

}  // namespace detail

// Mean log-loss over rows plus alpha / (2 n) * sum of squared weights (biases
// are not penalized). targets are 0/1. Fills grad (same layout as params).
// Rows are processed in fixed 64-row chunks whose partial gradients are summed
// in chunk order, so the result is independent of the worker count.
inline double mlp_loss_and_gradient(const MlpNetwork& net, const Matrix& x, std::span<const double> targets,
                                    double alpha, std::vector<double>& grad) {
  const std::size_t n = x.rows();
  const std::size_t chunks = (n + detail::kMlpChunkRows - 1) / detail::kMlpChunkRows;
  std::vector<std::vector<double>> partial(chunks);
  std::vector<double> partial_loss(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t begin, std::size_t end) {
    std::vector<double> h(net.hidden), dh(net.hidden);
    for (std::size_t c = begin; c < end; ++c) {
      auto& g = partial[c];
      g.assign(net.size(), 0.0);
      double* gw1 = g.data() + net.w1_offset();
      double* gb1 = g.data() + net.b1_offset();
      double* gw2 = g.data() + net.w2_offset();
      const double* w2 = net.params.data() + net.w2_offset();
      const std::size_t row_end = std::min(n, (c + 1) * detail::kMlpChunkRows);
      for (std::size_t i = c * detail::kMlpChunkRows; i < row_end; ++i) {
        const auto xi = x.row(i);
        const double z = net.logit(xi, h);
        partial_loss[c] += detail::softplus(z) - targets[i] * z;
        const double dz = 1.0 / (1.0 + std::exp(-z)) - targets[i];
        g[net.b2_offset()] += dz;
        for (std::size_t u = 0; u < net.hidden; ++u) {
          gw2[u] += dz * h[u];
          dh[u] = h[u] > 0.0 ? dz * w2[u] : 0.0;
          gb1[u] += dh[u];
        }
        for (std::size_t k = 0; k < net.inputs; ++k) {
          const double xk = xi[k];
          if (xk == 0.0) continue;
          double* grow = gw1 + k * net.hidden;
          for (std::size_t u = 0; u < net.hidden; ++u) grow[u] += xk * dh[u];
        }
      }
    }
  }, 1);

  grad.assign(net.size(), 0.0);
  double loss = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    loss += partial_loss[c];
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += partial[c][k];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  // L2 is scaled per reference minibatch rather than per sample.
  const double penalty_scale = 1.0 / static_cast<double>(std::min(n, kMlpPenaltyBatch));
  double penalty = 0.0;
  for (std::size_t k = 0; k < grad.size(); ++k) {
    grad[k] *= inv_n;
    const bool is_weight = k < net.b1_offset() || (k >= net.w2_offset() && k < net.b2_offset());
    if (is_weight) {
      penalty += net.params[k] * net.params[k];
      grad[k] += alpha * penalty_scale * net.params[k];
    }
  }
  return loss * inv_n + 0.5 * alpha * penalty_scale * penalty;
}

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
};

// One full-batch Adam update. Returns the loss before the update.
inline double mlp_backprop_step(MlpNetwork& net, AdamState& adam, const Matrix& x,
                                std::span<const double> targets, const MlpParams& params) {
  std::vector<double> grad;
  const double loss = mlp_loss_and_gradient(net, x, targets, params.alpha, grad);
  if (adam.m.size() != net.size()) {
    adam.m.assign(net.size(), 0.0);
    adam.v.assign(net.size(), 0.0);
    adam.step = 0;
  }
  ++adam.step;
  const double t = static_cast<double>(adam.step);
  const double step_size = params.learning_rate * std::sqrt(1.0 - std::pow(params.beta2, t)) /
                           (1.0 - std::pow(params.beta1, t));
  for (std::size_t k = 0; k < grad.size(); ++k) {
    adam.m[k] = params.beta1 * adam.m[k] + (1.0 - params.beta1) * grad[k];
    adam.v[k] = params.beta2 * adam.v[k] + (1.0 - params.beta2) * grad[k] * grad[k];
    net.params[k] -= step_size * adam.m[k] / (std::sqrt(adam.v[k]) + params.epsilon);
  }
  return loss;
}

class MlpModel {
 public:
  static MlpModel fit(const Dataset& train, const MlpParams& params) {
    detail::require(params.hidden_units >= 1 && params.max_epochs >= 1, ErrorKind::kInvalidArgument,
                    "MLP needs >= 1 hidden unit and >= 1 epoch");
    detail::require(params.alpha >= 0.0 && params.learning_rate > 0.0, ErrorKind::kInvalidArgument,
                    "MLP alpha must be >= 0 and learning_rate > 0");
    std::vector<double> targets(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) targets[i] = train.labels()[i] == kFailed ? 1.0 : 0.0;
    MlpModel m;
    m.net_ = MlpNetwork::initialize(train.dim(), params.hidden_units, params.seed);
    AdamState adam;
    for (std::size_t epoch = 0; epoch < params.max_epochs; ++epoch) {
      m.final_loss_ = mlp_backprop_step(m.net_, adam, train.samples(), targets, params);
    }
    return m;
  }

  double score(std::span<const double> query) const { return net_.output(query); }
  static constexpr double threshold() { return 0.5; }
  const MlpNetwork& network() const { return net_; }
  double final_loss() const { return final_loss_; }

  void save(std::ostream& out) const {
    out << "layers " << net_.inputs << ' ' << net_.hidden << '\n';
    model_io::put(out, net_.params);
  }
  static MlpModel load(std::istream& in) {
    MlpModel m;
    model_io::expect(in, "layers");
    m.net_.inputs = model_io::get_size(in);
    m.net_.hidden = model_io::get_size(in);
    m.net_.params = model_io::get_vector(in);
    if (m.net_.params.size() != m.net_.size()) throw Error(ErrorKind::kBadModelFile, "MLP parameter count");
    return m;
  }

 private:
  MlpNetwork net_;
  double final_loss_ = 0.0;
};

}  // namespace embedviz

#endif  // EMBEDVIZ_CLASSIFIERS_MLP_HPP_
