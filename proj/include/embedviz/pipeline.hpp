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

#ifndef EMBEDVIZ_PIPELINE_HPP_
#define EMBEDVIZ_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "embedviz/classifiers.hpp"
#include "embedviz/data.hpp"
#include "embedviz/metrics.hpp"
#include "embedviz/metrics_table.hpp"
#include "embedviz/smote.hpp"
#include "embedviz/tsne.hpp"
#include "embedviz/viz.hpp"

namespace embedviz {

// Option 1: input space. Option 2: input space + SMOTE on the training rows.
// Option 3: t-SNE map. Option 4: t-SNE map + SMOTE on the training rows.
struct PipelineConfig {
  int option = 1;
  TsneConfig tsne = [] {
    TsneConfig c;
    c.perplexity = 100.0;
    return c;
  }();
  SmoteConfig smote;
  double test_fraction = 0.25;
  std::uint64_t split_seed = 42;
  std::vector<ClassifierSpec> classifiers = default_classifier_specs();
  std::filesystem::path output_dir;  // empty: no artifacts are written
  bool write_figures = true;
  std::size_t surface_resolution = 200;
  std::function<void(const std::string&)> progress;

  static bool uses_tsne(int option) { return option == 3 || option == 4; }
  static bool uses_smote(int option) { return option == 2 || option == 4; }

  // Sets the split, t-SNE, SMOTE, forest and MLP seeds from one value.
  PipelineConfig& with_seed(std::uint64_t seed) {
    split_seed = seed;
    tsne.seed = seed;
    smote.seed = seed;
    for (auto& spec : classifiers) {
      spec.forest.seed = seed;
      spec.mlp.seed = seed;
    }
    return *this;
  }

  void validate() const {
    detail::require(option >= 1 && option <= 4, ErrorKind::kInvalidArgument, "option must be 1, 2, 3 or 4");
    detail::require(!classifiers.empty(), ErrorKind::kInvalidArgument, "no classifiers configured");
  }
};

struct OptionResult {
  int option = 0;
  std::vector<MetricsReport> reports;
  std::vector<TrainedModel> models;
  Dataset train;  // exactly what every fit call saw
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  // Source row of every training row handed to fit; -1 for synthetic rows.
  std::vector<long long> train_sources;
  std::optional<Embedding> embedding;
  std::size_t synthesized = 0;
};

struct PipelineResult {
  MetricsTable table;
  std::vector<OptionResult> options;
};

namespace detail {

template <typename F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw e.annotated(name);
  }
}

inline void note(const PipelineConfig& cfg, const std::string& message) {
  if (cfg.progress) cfg.progress(message);
}

inline std::string figure_title(int option, std::string_view what) {
  return "option " + std::to_string(option) + ": " + std::string(what);
}

inline void write_option_figures(const OptionResult& result, const PipelineConfig& cfg) {
  const auto& dir = cfg.output_dir;
  const int o = result.option;
  const std::string balance = PipelineConfig::uses_smote(o) ? "balanced training set (SMOTE)"
                                                            : "imbalanced training set";
  ScatterStyle scatter;
  scatter.title = figure_title(o, balance);
  write_text_file(dir / ("fig4_option" + std::to_string(o) + "_train.svg"),
                  scatter_svg(result.train.samples(), result.train.labels(), scatter));

  const auto bounds = bounds_with_margin({&result.train.samples(), &result.test.samples()}, 0.1);
  std::vector<std::string> panels;
  for (const auto& model : result.models) {
    const auto grid = decision_surface(model, bounds, cfg.surface_resolution);
    SurfaceStyle style;
    style.title = std::string(classifier_name(model.kind()));
    panels.push_back(surface_svg(grid, result.train.samples(), result.train.labels(), result.test.samples(),
                                 result.test.labels(), style));
  }
  const SurfaceStyle defaults;
  write_text_file(dir / ("fig5_option" + std::to_string(o) + "_surfaces.svg"),
                  panel_grid_svg(panels, 3, defaults.width, defaults.height,
                                 figure_title(o, "decision surfaces, " + balance)));
}

}  // namespace detail

// Runs one option end to end. For options 3 and 4 the t-SNE map is fit on all
// rows before the split; pass precomputed to reuse a map across options.
inline OptionResult run_option(const Dataset& ds, const PipelineConfig& cfg,
                               const Embedding* precomputed = nullptr) {
  cfg.validate();
  if (!ds.has_both_classes()) throw Error(ErrorKind::kSingleClass, "dataset needs both classes");
  const int o = cfg.option;
  const std::string tag = "option " + std::to_string(o);
  OptionResult result;
  result.option = o;

  const Dataset normalized = detail::stage(tag + " / normalize", [&] { return normalize(ds); });
  Dataset representation = normalized;
  if (PipelineConfig::uses_tsne(o)) {
    if (precomputed) {
      result.embedding = *precomputed;
    } else {
      detail::note(cfg, tag + ": t-SNE on " + std::to_string(ds.size()) + " rows");
      result.embedding = detail::stage(tag + " / t-SNE", [&] { return run_tsne(normalized.samples(), cfg.tsne); });
    }
    detail::require(result.embedding->points.rows() == ds.size(), ErrorKind::kDimensionMismatch,
                    "embedding row count differs from dataset");
    representation = Dataset(result.embedding->points,
                             std::vector<int>(ds.labels().begin(), ds.labels().end()), {"x", "y"});
  }

  auto [train_idx, test_idx] = detail::stage(tag + " / split", [&] {
    return stratified_split_indices(representation.labels(), cfg.test_fraction, cfg.split_seed);
  });
  result.train_indices = std::move(train_idx);
  result.test_indices = std::move(test_idx);
  result.test = representation.subset(result.test_indices);
  Dataset train = representation.subset(result.train_indices);
  result.train_sources.assign(result.train_indices.begin(), result.train_indices.end());

  if (PipelineConfig::uses_smote(o)) {
    auto smote = detail::stage(tag + " / SMOTE", [&] { return smote_oversample_detailed(train, cfg.smote); });
    for (const auto& w : smote.warnings) detail::note(cfg, tag + ": SMOTE " + w);
    result.synthesized = smote.synthesized;
    result.train_sources.resize(smote.data.size(), -1);
    train = std::move(smote.data);
  }
  result.train = std::move(train);

  const std::set<long long> test_rows(result.test_indices.begin(), result.test_indices.end());
  for (long long src : result.train_sources) {
    detail::require(src < 0 || !test_rows.count(src), ErrorKind::kInvalidArgument,
                    "test row leaked into training data");
  }

  for (const auto& spec : cfg.classifiers) {
    const std::string name(classifier_name(spec.kind));
    detail::note(cfg, tag + ": fitting " + name + " on " + std::to_string(result.train.size()) + " rows");
    auto model = detail::stage(tag + " / fit " + name, [&] { return fit(spec, result.train); });
    const auto scores = model.predict_score(result.test.samples());
    std::vector<int> predicted(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      predicted[i] = scores[i] >= model.threshold() ? kFailed : kSafe;
    }
    result.reports.push_back(detail::stage(tag + " / evaluate " + name, [&] {
      return evaluate_predictions(result.test.labels(), predicted, scores, name, o);
    }));
    result.models.push_back(std::move(model));
  }

  if (!cfg.output_dir.empty()) {
    detail::stage(tag + " / artifacts", [&] {
      std::filesystem::create_directories(cfg.output_dir);
      const auto suffix = "_opt" + std::to_string(o);
      if (result.embedding) {
        write_embedding_csv(result.embedding->points, ds.labels(), cfg.output_dir / ("embedding" + suffix + ".csv"));
      }
      if (PipelineConfig::uses_smote(o)) write_csv(result.train, cfg.output_dir / ("train_resampled" + suffix + ".csv"));
      for (const auto& model : result.models) {
        model.save_file(cfg.output_dir / ("model" + suffix + "_" + std::string(classifier_name(model.kind())) + ".txt"));
      }
      if (cfg.write_figures && PipelineConfig::uses_tsne(o)) detail::write_option_figures(result, cfg);
    });
  }
  return result;
}

// Runs the requested options with shared seeds. One t-SNE map serves
// options 3 and 4. Writes metrics_table.{csv,json} when output_dir is set.
inline PipelineResult run_all(const Dataset& ds, const PipelineConfig& base,
                              std::span<const int> options = std::span<const int>()) {
  static constexpr int kAll[] = {1, 2, 3, 4};
  if (options.empty()) options = kAll;
  PipelineResult out;
  std::optional<Embedding> shared;
  for (int o : options) {
    PipelineConfig cfg = base;
    cfg.option = o;
    auto result = run_option(ds, cfg, shared ? &*shared : nullptr);
    if (result.embedding && !shared) shared = result.embedding;
    for (const auto& r : result.reports) out.table.add(r);
    out.options.push_back(std::move(result));
  }
  if (!base.output_dir.empty()) {
    std::filesystem::create_directories(base.output_dir);
    write_metrics_table(out.table, base.output_dir);
  }
  return out;
}

// One scatter per perplexity value, written as fig3_perplexity_<value>.svg.
inline std::vector<Embedding> write_perplexity_sweep(const Dataset& ds, const TsneConfig& tsne,
                                                     std::span<const double> values,
                                                     const std::filesystem::path& dir) {
  const Dataset normalized = normalize(ds);
  auto embeddings = perplexity_sweep(normalized.samples(), tsne, values);
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    ScatterStyle style;
    style.title = "t-SNE map, perplexity " + detail::format_double(values[i]);
    write_text_file(dir / ("fig3_perplexity_" + detail::format_double(values[i]) + ".svg"),
                    scatter_svg(embeddings[i].points, ds.labels(), style));
  }
  return embeddings;
}

}  // namespace embedviz

#endif  // EMBEDVIZ_PIPELINE_HPP_
