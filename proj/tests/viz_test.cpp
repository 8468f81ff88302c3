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

#include "embedviz/viz.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

#include "test_util.hpp"

namespace embedviz {
namespace {

using testing::count_occurrences;

const Matrix kTenPoints{{0.0, 0.0}, {1.5, -2.0}, {3.25, 4.0}, {-1.0, 2.5}, {2.0, 2.0},
                        {-3.5, -1.25}, {0.75, 0.5}, {4.0, -3.0}, {-2.0, 3.75}, {1.0, 1.0}};
const std::vector<int> kTenLabels{-1, -1, 1, -1, 1, -1, -1, 1, -1, 1};

TEST(ScatterSvg, NoPointsStillHasAxes) {
  const std::string svg = scatter_svg(Matrix(0, 2), std::vector<int>{});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("class=\"axes\""), std::string::npos);
  EXPECT_EQ(count_occurrences(svg, "<circle"), 0u);
}

TEST(ScatterSvg, TwoPointsTwoLegendEntries) {
  const std::string svg = scatter_svg(Matrix{{0, 0}, {1, 1}}, std::vector<int>{-1, 1});
  EXPECT_EQ(count_occurrences(svg, "class=\"pt\""), 2u);
  EXPECT_EQ(count_occurrences(svg, "class=\"legend-marker\""), 2u);
  EXPECT_NE(svg.find("#440154"), std::string::npos);
  EXPECT_NE(svg.find("#fde725"), std::string::npos);
}

TEST(ScatterSvg, OneClassOneLegendEntry) {
  const std::string svg = scatter_svg(Matrix{{0, 0}, {1, 1}}, std::vector<int>{-1, -1});
  EXPECT_EQ(count_occurrences(svg, "class=\"legend-marker\""), 1u);
}

TEST(ScatterSvg, MatchesGoldenFile) {
  ScatterStyle style;
  style.title = "ten points";
  const std::string svg = scatter_svg(kTenPoints, kTenLabels, style);
  const std::filesystem::path golden = std::filesystem::path(EMBEDVIZ_GOLDEN_DIR) / "scatter_10.svg";
  if (std::getenv("EMBEDVIZ_UPDATE_GOLDEN")) testing::write_file(golden, svg);
  ASSERT_TRUE(std::filesystem::exists(golden));
  EXPECT_EQ(svg, testing::read_file(golden));
  EXPECT_EQ(count_occurrences(svg, "class=\"pt\""), 10u);
}

TEST(ScatterSvg, RejectsBadInput) {
  EXPECT_THROW(scatter_svg(Matrix{{0, 0}}, std::vector<int>{}), Error);
  EXPECT_THROW(scatter_svg(Matrix{{0, std::nan("")}}, std::vector<int>{1}), Error);
}

TrainedModel knn_on_three() {
  const Dataset ds(Matrix{{0, 0}, {0, 1}, {5, 5}}, {-1, -1, 1});
  return fit(ClassifierSpec::of(ClassifierKind::kKnn), ds);
}

TEST(DecisionSurface, ResolutionTwoHasFourCellCentres) {
  const auto grid = decision_surface(knn_on_three(), PlotBounds{0, 4, 0, 2}, 2);
  EXPECT_EQ(grid.scores.rows() * grid.scores.cols(), 4u);
  EXPECT_EQ(grid.cell_x(0), 1.0);
  EXPECT_EQ(grid.cell_x(1), 3.0);
  EXPECT_EQ(grid.cell_y(0), 0.5);
  EXPECT_EQ(grid.cell_y(1), 1.5);
}

TEST(DecisionSurface, CellScoresMatchDirectEvaluation) {
  const auto model = knn_on_three();
  const auto grid = decision_surface(model, PlotBounds{-1, 6, -1, 6}, 7);
  for (std::size_t r = 0; r < 7; ++r) {
    for (std::size_t c = 0; c < 7; ++c) {
      const std::vector<double> q{grid.cell_x(c), grid.cell_y(r)};
      EXPECT_EQ(grid.scores(r, c), model.score_one(q));
    }
  }
  // Cell (1, 1) has centre (0.5, 0.5) and contains training point (0, 1)'s neighbourhood.
  EXPECT_DOUBLE_EQ(grid.scores(1, 1), 1.0 / 3.0);
  EXPECT_EQ(grid.threshold, 0.5);
}

TEST(DecisionSurface, RequiresTwoDimensionalModel) {
  const Dataset ds(Matrix{{0, 0, 0}, {1, 1, 1}}, {-1, 1});
  const auto model = fit(ClassifierSpec::of(ClassifierKind::kKnn), ds);
  try {
    decision_surface(model, PlotBounds{}, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
}

TEST(SurfaceSvg, UniformGridHasNoRegionRuns) {
  const Dataset ds(Matrix{{0, 0}, {1, 1}, {2, 2}}, {1, 1, 1});
  const auto grid = decision_surface(fit(ClassifierSpec::of(ClassifierKind::kKnn), ds), PlotBounds{}, 10);
  const std::string svg = surface_svg(grid, ds.samples(), ds.labels(), Matrix(0, 2), std::vector<int>{});
  EXPECT_EQ(count_occurrences(svg, "class=\"region\""), 0u);
  EXPECT_EQ(count_occurrences(svg, "class=\"background\""), 1u);
  EXPECT_NE(svg.find("fill=\"#c6d8f6\"/>"), std::string::npos);
}

TEST(SurfaceSvg, EmptyTestSetOnlySolidMarkers) {
  // k = 1 so the two classes own separate regions.
  auto spec = ClassifierSpec::of(ClassifierKind::kKnn);
  spec.knn.k = 1;
  const auto model = fit(spec, Dataset(Matrix{{0, 0}, {0, 1}, {5, 5}}, {-1, -1, 1}));
  const auto grid = decision_surface(model, PlotBounds{-1, 6, -1, 6}, 20);
  const Matrix train{{0, 0}, {0, 1}, {5, 5}};
  const std::vector<int> labels{-1, -1, 1};
  const std::string svg = surface_svg(grid, train, labels, Matrix(0, 2), std::vector<int>{});
  EXPECT_EQ(count_occurrences(svg, "class=\"train\""), 3u);
  EXPECT_EQ(count_occurrences(svg, "class=\"test\""), 0u);
  EXPECT_EQ(count_occurrences(svg, "fill-opacity"), 0u);
  EXPECT_GT(count_occurrences(svg, "class=\"region\""), 0u);
}

TEST(SurfaceSvg, EveryPointAppearsOnce) {
  const auto model = knn_on_three();
  const auto grid = decision_surface(model, PlotBounds{-1, 6, -1, 6}, 20);
  const Matrix test{{1, 1}, {4, 4}};
  const std::vector<int> test_labels{-1, 1};
  const std::string svg =
      surface_svg(grid, Matrix{{0, 0}, {0, 1}, {5, 5}}, std::vector<int>{-1, -1, 1}, test, test_labels);
  EXPECT_EQ(count_occurrences(svg, "class=\"train\""), 3u);
  EXPECT_EQ(count_occurrences(svg, "class=\"test\""), 2u);
  EXPECT_EQ(count_occurrences(svg, "fill-opacity=\"0.35\""), 2u);
  EXPECT_EQ(svg, surface_svg(grid, Matrix{{0, 0}, {0, 1}, {5, 5}}, std::vector<int>{-1, -1, 1}, test,
                             test_labels));
}

TEST(PanelGrid, SixClassifiersTimesTwoOptionsIsTwelvePanels) {
  const auto ds = testing::two_clusters(40, 2, 3.0, 1.0, 2);
  const auto bounds = bounds_with_margin({&ds.samples()}, 0.1);
  std::size_t total = 0;
  for (int option : {3, 4}) {
    std::vector<std::string> panels;
    for (const auto& spec : default_classifier_specs()) {
      auto s = spec;
      s.mlp.max_epochs = 20;
      const auto grid = decision_surface(fit(s, ds), bounds, 8);
      panels.push_back(surface_svg(grid, ds.samples(), ds.labels(), Matrix(0, 2), std::vector<int>{}));
    }
    const auto svg = panel_grid_svg(panels, 3, 360, 360, "option " + std::to_string(option));
    EXPECT_EQ(count_occurrences(svg, "<svg class=\"panel\""), 6u);
    EXPECT_EQ(count_occurrences(svg, "xmlns="), 1u);
    total += count_occurrences(svg, "<svg class=\"panel\"");
  }
  EXPECT_EQ(total, 12u);
}

TEST(Bounds, MarginAroundAllSets) {
  const Matrix a{{0, 0}, {10, 5}};
  const Matrix b{{-10, 0}};
  const auto bounds = bounds_with_margin({&a, &b}, 0.1);
  EXPECT_DOUBLE_EQ(bounds.x_min, -12.0);
  EXPECT_DOUBLE_EQ(bounds.x_max, 12.0);
  EXPECT_DOUBLE_EQ(bounds.y_min, -0.5);
  EXPECT_DOUBLE_EQ(bounds.y_max, 5.5);
}

}  // namespace
}  // namespace embedviz
