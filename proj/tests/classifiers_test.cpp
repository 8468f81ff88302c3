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

#include "embedviz/classifiers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "test_util.hpp"

namespace embedviz {
namespace {

double training_accuracy(const TrainedModel& model, const Dataset& ds) {
  const auto pred = model.predict(ds.samples());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) hits += pred[i] == ds.labels()[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

Dataset xor_data(std::uint64_t seed) {
  Rng rng(seed);
  const double corners[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  Matrix x(100, 2);
  std::vector<int> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    const auto& c = corners[i % 4];
    x(i, 0) = c[0] + rng.normal(0.0, 0.05);
    x(i, 1) = c[1] + rng.normal(0.0, 0.05);
    y[i] = (c[0] != c[1]) ? kFailed : kSafe;
  }
  return Dataset(std::move(x), std::move(y));
}

double mlp_gradient_error(std::uint64_t seed, double alpha) {
  Rng rng(seed);
  const std::size_t n = 12, d = 3;
  Matrix x(n, d);
  for (auto& v : x.data()) v = rng.normal();
  std::vector<double> t(n);
  for (auto& v : t) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
  auto net = MlpNetwork::initialize(d, 3, seed);
  for (auto& p : net.params) p = rng.normal();
  std::vector<double> grad, scratch;
  mlp_loss_and_gradient(net, x, t, alpha, grad);
  double diff = 0, norm_a = 0, norm_b = 0;
  for (std::size_t k = 0; k < net.size(); ++k) {
    const double saved = net.params[k];
    const double h = 1e-6;
    net.params[k] = saved + h;
    const double up = mlp_loss_and_gradient(net, x, t, alpha, scratch);
    net.params[k] = saved - h;
    const double down = mlp_loss_and_gradient(net, x, t, alpha, scratch);
    net.params[k] = saved;
    const double fd = (up - down) / (2 * h);
    diff += (fd - grad[k]) * (fd - grad[k]);
    norm_a += fd * fd;
    norm_b += grad[k] * grad[k];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm_a), std::sqrt(norm_b));
}

TEST(DecisionTree, OneDimensionalThreshold) {
  Matrix x(20, 1);
  std::vector<int> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    x(i, 0) = static_cast<double>(i) - 9.5;
    y[i] = x(i, 0) < 0 ? kSafe : kFailed;
  }
  const Dataset ds(std::move(x), std::move(y));
  const auto model = fit(ClassifierSpec::of(ClassifierKind::kDecisionTree), ds);
  EXPECT_EQ(training_accuracy(model, ds), 1.0);
  const auto& tree = std::get<DecisionTreeModel>(model.model());
  EXPECT_EQ(tree.depth(), 1u);
  EXPECT_EQ(tree.nodes()[0].threshold, 0.0);
}

TEST(DecisionTree, DepthIsBounded) {
  const auto ds = generate_synthetic(300, 4, 0.3, 0.5, 3);
  auto spec = ClassifierSpec::of(ClassifierKind::kDecisionTree);
  spec.tree.max_depth = 3;
  const auto model = fit(spec, ds);
  EXPECT_LE(std::get<DecisionTreeModel>(model.model()).depth(), 3u);
}

TEST(Svm, SeparatesClustersAndSatisfiesKkt) {
  const auto ds = testing::two_clusters(40, 2, 5.0, 0.7, 8);
  SvmSolution sol;
  const auto svm = SvmModel::fit(ds, SvmParams{}, &sol);
  EXPECT_TRUE(sol.converged);
  double balance = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_GE(sol.alpha[i], 0.0);
    EXPECT_LE(sol.alpha[i], 1.0);
    balance += sol.alpha[i] * ds.labels()[i];
  }
  EXPECT_LE(std::abs(balance), 1e-6);
  EXPECT_GT(svm.support_count(), 0u);
  EXPECT_EQ(training_accuracy(fit(ClassifierSpec::of(ClassifierKind::kSvmRbf), ds), ds), 1.0);
}

TEST(Svm, KktOnOverlappingData) {
  // Overlap forces bounded multipliers.
  const auto ds = generate_synthetic(200, 3, 0.3, 1.0, 5);
  SvmSolution sol;
  SvmModel::fit(ds, SvmParams{}, &sol);
  EXPECT_TRUE(sol.converged);
  double balance = 0;
  std::size_t at_bound = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_GE(sol.alpha[i], 0.0);
    EXPECT_LE(sol.alpha[i], 1.0);
    at_bound += sol.alpha[i] == 1.0 ? 1 : 0;
    balance += sol.alpha[i] * ds.labels()[i];
  }
  EXPECT_GT(at_bound, 0u);
  EXPECT_LE(std::abs(balance), 1e-6);
}

TEST(Mlp, LearnsXor) {
  const auto ds = xor_data(1);
  EXPECT_GE(training_accuracy(fit(ClassifierSpec::of(ClassifierKind::kMlp), ds), ds), 0.95);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_LT(mlp_gradient_error(seed, 1.0), 1e-4) << seed;
    EXPECT_LT(mlp_gradient_error(seed, 0.0), 1e-4) << seed;
  }
}

TEST(Mlp, PenaltyVanishesAtZeroAlpha) {
  Rng rng(2);
  Matrix x(8, 2);
  for (auto& v : x.data()) v = rng.normal();
  const std::vector<double> t{1, 0, 1, 0, 1, 1, 0, 0};
  const auto net = MlpNetwork::initialize(2, 4, 7);
  std::vector<double> g0, g1;
  const double l0 = mlp_loss_and_gradient(net, x, t, 0.0, g0);
  const double l1 = mlp_loss_and_gradient(net, x, t, 1.0, g1);
  double weights_sq = 0;
  for (std::size_t k = 0; k < net.size(); ++k) {
    const bool is_weight = k < net.b1_offset() || (k >= net.w2_offset() && k < net.b2_offset());
    if (is_weight) {
      weights_sq += net.params[k] * net.params[k];
      EXPECT_NEAR(g1[k] - g0[k], net.params[k] / 8.0, 1e-12);
    } else {
      EXPECT_EQ(g1[k], g0[k]);
    }
  }
  EXPECT_NEAR(l1 - l0, weights_sq / 16.0, 1e-12);

  // Pure log-loss: mean of log(1 + e^z) - t z.
  double expected = 0;
  std::vector<double> h(4);
  for (std::size_t i = 0; i < 8; ++i) {
    const double z = net.logit(x.row(i), h);
    expected += std::log1p(std::exp(z)) - t[i] * z;
  }
  EXPECT_NEAR(l0, expected / 8.0, 1e-12);
}

TEST(Mlp, ZeroNetworkGivesEqualHiddenGradients) {
  MlpNetwork net{2, 3, std::vector<double>(2 * 3 + 2 * 3 + 1, 0.0)};
  const Matrix x{{1, 2}, {-1, -2}, {0.5, -0.5}, {-0.5, 0.5}};
  const std::vector<double> t{1, 0, 1, 0};
  std::vector<double> g;
  mlp_loss_and_gradient(net, x, t, 1.0, g);
  for (std::size_t u = 1; u < 3; ++u) {
    EXPECT_EQ(g[net.w2_offset() + u], g[net.w2_offset()]);
    EXPECT_EQ(g[net.b1_offset() + u], g[net.b1_offset()]);
  }
  EXPECT_EQ(g[net.b2_offset()], 0.0);
}

TEST(Knn, MajorityOfThree) {
  const Dataset ds(Matrix{{0, 0}, {0, 1}, {5, 5}}, {-1, -1, 1});
  const auto model = fit(ClassifierSpec::of(ClassifierKind::kKnn), ds);
  const std::vector<double> q{0, 0.5};
  EXPECT_EQ(model.predict_one(q), kSafe);
  EXPECT_DOUBLE_EQ(model.score_one(q), 1.0 / 3.0);
}

TEST(Knn, ScoreIsPositiveFraction) {
  const Dataset ds(Matrix{{0}, {1}, {2}, {10}}, {1, 1, -1, -1});
  const auto model = fit(ClassifierSpec::of(ClassifierKind::kKnn), ds);
  EXPECT_DOUBLE_EQ(model.score_one(std::vector<double>{0.9}), 2.0 / 3.0);
  EXPECT_EQ(model.predict_one(std::vector<double>{0.9}), kFailed);
}

TEST(Knn, SingleClassTrainingSet) {
  const Dataset ds(Matrix{{0}, {1}, {2}}, {1, 1, 1});
  const auto model = fit(ClassifierSpec::of(ClassifierKind::kKnn), ds);
  for (double q : {-100.0, 0.5, 7.0}) EXPECT_EQ(model.predict_one(std::vector<double>{q}), kFailed);
}

TEST(Knn, DistanceTiesPreferLowerIndex) {
  const Dataset ds(Matrix{{-1}, {1}, {-2}, {2}}, {1, -1, 1, -1});
  auto spec = ClassifierSpec::of(ClassifierKind::kKnn);
  spec.knn.k = 1;
  EXPECT_EQ(fit(spec, ds).predict_one(std::vector<double>{0}), kFailed);
}

TEST(AdaBoost, StageWeights) {
  EXPECT_EQ(adaboost_stage_weight(0.5), 0.0);
  EXPECT_NEAR(adaboost_stage_weight(0.25), 0.5493061443340549, 1e-15);
  EXPECT_NEAR(adaboost_stage_weight(0.75), -0.5493061443340549, 1e-15);
  for (double e : {0.0, 1.0, -0.1, 1.5}) {
    try {
      adaboost_stage_weight(e);
      FAIL() << e;
    } catch (const Error& err) {
      EXPECT_EQ(err.kind(), ErrorKind::kDegenerateError);
    }
  }
}

TEST(AdaBoost, ScoreIsWeightedVoteSum) {
  const auto ds = generate_synthetic(120, 2, 0.4, 2.0, 6);
  const auto model = fit(ClassifierSpec::of(ClassifierKind::kAdaBoost), ds);
  const auto& boost = std::get<AdaBoostModel>(model.model());
  const std::vector<double> q{0.3, -0.2};
  double sum = 0;
  for (std::size_t t = 0; t < boost.stumps().size(); ++t) {
    sum += boost.alphas()[t] * (boost.stumps()[t].score(q) >= 0.5 ? 1 : -1);
  }
  EXPECT_DOUBLE_EQ(model.score_one(q), sum);
}

TEST(AdaBoost, StopsOnPerfectStump) {
  const Dataset ds(Matrix{{0}, {1}, {2}, {3}}, {-1, -1, 1, 1});
  const auto model = fit(ClassifierSpec::of(ClassifierKind::kAdaBoost), ds);
  const auto& boost = std::get<AdaBoostModel>(model.model());
  EXPECT_EQ(boost.stumps().size(), 1u);
  EXPECT_GT(boost.alphas()[0], 0.0);
}

TEST(RandomForest, SingleUnbaggedTreeEqualsDecisionTree) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = generate_synthetic(150, 4, 0.3, 1.5, seed);
    auto rf = ClassifierSpec::of(ClassifierKind::kRandomForest);
    rf.forest.n_estimators = 1;
    rf.forest.bootstrap = false;
    rf.forest.max_features = ds.dim();
    rf.forest.seed = seed;
    const auto forest = fit(rf, ds);
    const auto tree = fit(ClassifierSpec::of(ClassifierKind::kDecisionTree), ds);
    const auto probe = generate_synthetic(200, 4, 0.3, 1.5, seed + 100);
    EXPECT_EQ(forest.predict(probe.samples()), tree.predict(probe.samples()));
    EXPECT_EQ(std::get<RandomForestModel>(forest.model()).trees()[0],
              std::get<DecisionTreeModel>(tree.model()));
  }
}

std::string serialized(const TrainedModel& m) {
  std::ostringstream out;
  m.save(out);
  return out.str();
}

TEST(Determinism, ForestAndMlpBitwiseForFixedSeed) {
  const auto ds = generate_synthetic(120, 3, 0.3, 2.0, 4);
  for (auto kind : {ClassifierKind::kRandomForest, ClassifierKind::kMlp}) {
    auto spec = ClassifierSpec::of(kind);
    spec.mlp.max_epochs = 50;
    EXPECT_EQ(serialized(fit(spec, ds)), serialized(fit(spec, ds)));
    spec.forest.seed = spec.mlp.seed = 7;
    EXPECT_NE(serialized(fit(spec, ds)), serialized(fit(ClassifierSpec::of(kind), ds)));
  }
}

class AllKinds : public ::testing::TestWithParam<ClassifierKind> {};

TEST_P(AllKinds, SeparatedClustersTrainingAccuracy) {
  const auto ds = testing::two_clusters(100, 2, 6.0, 1.0, 12);
  EXPECT_GE(training_accuracy(fit(ClassifierSpec::of(GetParam()), ds), ds), 0.95);
}

TEST_P(AllKinds, ScoreAndPredictAgree) {
  const auto ds = generate_synthetic(80, 2, 0.3, 1.0, 13);
  const auto model = fit(ClassifierSpec::of(GetParam()), ds);
  Rng rng(14);
  Matrix probe(300, 2);
  for (auto& v : probe.data()) v = rng.normal(0.0, 3.0);
  const auto scores = model.predict_score(probe);
  const auto labels = model.predict(probe);
  for (std::size_t i = 0; i < probe.rows(); ++i) {
    EXPECT_TRUE(std::isfinite(scores[i]));
    EXPECT_TRUE(labels[i] == kSafe || labels[i] == kFailed);
    EXPECT_EQ(labels[i] == kFailed, scores[i] >= model.threshold());
  }
}

TEST_P(AllKinds, SaveLoadRoundTrip) {
  const auto ds = generate_synthetic(60, 3, 0.3, 1.5, 15);
  auto spec = ClassifierSpec::of(GetParam());
  spec.mlp.max_epochs = 30;
  const auto model = fit(spec, ds);
  std::istringstream in(serialized(model));
  const auto back = TrainedModel::load(in);
  EXPECT_EQ(back.kind(), model.kind());
  EXPECT_EQ(back.dim(), 3u);
  EXPECT_EQ(back.predict_score(ds.samples()), model.predict_score(ds.samples()));
  EXPECT_EQ(serialized(back), serialized(model));
}

TEST_P(AllKinds, DimensionMismatch) {
  const auto ds = generate_synthetic(40, 3, 0.3, 1.5, 16);
  auto spec = ClassifierSpec::of(GetParam());
  spec.mlp.max_epochs = 5;
  const auto model = fit(spec, ds);
  try {
    model.predict(Matrix(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
}

TEST_P(AllKinds, SingleClassPolicy) {
  const Dataset ds(Matrix{{0}, {1}, {2}}, {-1, -1, -1});
  if (GetParam() == ClassifierKind::kKnn) {
    EXPECT_NO_THROW(fit(ClassifierSpec::of(GetParam()), ds));
  } else {
    try {
      fit(ClassifierSpec::of(GetParam()), ds);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kSingleClass);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Classifiers, AllKinds, ::testing::ValuesIn(kAllClassifierKinds),
                         [](const auto& info) { return std::string(classifier_name(info.param)); });

TEST(ClassifierNames, ParseAliases) {
  for (auto kind : kAllClassifierKinds) EXPECT_EQ(parse_classifier_kind(classifier_name(kind)), kind);
  EXPECT_EQ(parse_classifier_kind("svm_rbf"), ClassifierKind::kSvmRbf);
  EXPECT_EQ(parse_classifier_kind("random_forest"), ClassifierKind::kRandomForest);
  EXPECT_FALSE(parse_classifier_kind("lasso").has_value());
}

TEST(ModelFile, RejectsGarbage) {
  std::istringstream in("not-a-model 1\n");
  try {
    TrainedModel::load(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBadModelFile);
  }
}

}  // namespace
}  // namespace embedviz
