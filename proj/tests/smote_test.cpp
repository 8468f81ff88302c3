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

#include "embedviz/smote.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace embedviz {
namespace {

Dataset imbalanced(std::size_t n_major, std::size_t n_minor, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n_major + n_minor, d);
  std::vector<int> y(n_major + n_minor, kSafe);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (i >= n_major) y[i] = kFailed;
    for (std::size_t c = 0; c < d; ++c) x(i, c) = rng.normal(i >= n_major ? 2.0 : 0.0, 1.0);
  }
  return Dataset(std::move(x), std::move(y));
}

TEST(Smote, TwoMinorityPointsStayOnDiagonal) {
  const Dataset train(Matrix{{0, 0}, {1, 1}, {5, 0}, {6, 0}, {7, 0}, {8, 0}}, {1, 1, -1, -1, -1, -1});
  SmoteConfig cfg;
  cfg.k_neighbors = 1;
  const auto out = smote_oversample(train, cfg);
  ASSERT_EQ(out.size(), 8u);
  for (std::size_t s = 6; s < 8; ++s) {
    EXPECT_EQ(out.samples()(s, 0), out.samples()(s, 1));
    EXPECT_GE(out.samples()(s, 0), 0.0);
    EXPECT_LT(out.samples()(s, 0), 1.0);
    EXPECT_EQ(out.labels()[s], kFailed);
  }
}

TEST(Smote, BalancesSixHundredToOneHundred) {
  const auto train = imbalanced(600, 100, 3, 1);
  const auto out = smote_oversample(train, {});
  EXPECT_EQ(out.count(kSafe), 600u);
  EXPECT_EQ(out.count(kFailed), 600u);
  EXPECT_EQ(testing::smote_violation(train, out), "");
}

TEST(Smote, PartialTargetRatio) {
  const auto train = imbalanced(301, 40, 2, 2);
  SmoteConfig cfg;
  cfg.target_ratio = 0.5;
  const auto out = smote_oversample(train, cfg);
  EXPECT_EQ(out.count(kFailed), 151u);
  EXPECT_EQ(testing::smote_violation(train, out, 0.5), "");
}

TEST(Smote, MajorityCanBeNegativeOrPositive) {
  const auto train = imbalanced(20, 80, 2, 3);  // +1 is the majority here
  const auto result = smote_oversample_detailed(train, {});
  EXPECT_EQ(result.minority_label, kSafe);
  EXPECT_EQ(result.data.count(kSafe), 80u);
  EXPECT_EQ(testing::smote_violation(train, result.data), "");
}

TEST(Smote, Errors) {
  try {
    smote_oversample(imbalanced(10, 1, 2, 4), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientMinority);
  }
  try {
    smote_oversample(Dataset(Matrix{{0}, {1}}, {1, 1}), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSingleClass);
  }
  SmoteConfig bad;
  bad.target_ratio = 1.5;
  EXPECT_THROW(smote_oversample(imbalanced(10, 3, 2, 4), bad), Error);
}

TEST(Smote, ClampsNeighbourCountWithWarning) {
  const auto result = smote_oversample_detailed(imbalanced(30, 3, 2, 5), {});
  EXPECT_EQ(result.k_used, 2u);
  ASSERT_EQ(result.warnings.size(), 1u);
  EXPECT_NE(result.warnings[0].find("clamped"), std::string::npos);
}

TEST(Smote, ReproducibleForSeed) {
  const auto train = imbalanced(200, 25, 4, 6);
  SmoteConfig cfg;
  cfg.seed = 9;
  EXPECT_EQ(smote_oversample(train, cfg), smote_oversample(train, cfg));
  SmoteConfig other = cfg;
  other.seed = 10;
  EXPECT_NE(smote_oversample(train, other), smote_oversample(train, cfg));
}

TEST(Smote, AlreadyBalancedIsUnchanged) {
  const auto train = imbalanced(20, 20, 2, 7);
  EXPECT_EQ(smote_oversample(train, {}), train);
}

TEST(Smote, PropertyOverRandomSets) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t minor = 2 + rng.below(30);
    const std::size_t major = minor + rng.below(150);
    const auto train = imbalanced(major, minor, 1 + rng.below(4), rng.next_u64());
    SmoteConfig cfg;
    cfg.k_neighbors = 1 + rng.below(7);
    cfg.seed = rng.next_u64();
    EXPECT_EQ(testing::smote_violation(train, smote_oversample(train, cfg)), "") << trial;
  }
}

TEST(NearestWithin, TiesBrokenByIndex) {
  const Matrix x{{0}, {1}, {-1}, {2}};
  const std::vector<std::size_t> members{0, 1, 2, 3};
  const auto nn = nearest_within(x, members, 2);
  EXPECT_EQ(nn[0], (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(nn[3], (std::vector<std::size_t>{1, 0}));
}

}  // namespace
}  // namespace embedviz
