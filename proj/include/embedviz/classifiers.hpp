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

#ifndef EMBEDVIZ_CLASSIFIERS_HPP_
#define EMBEDVIZ_CLASSIFIERS_HPP_

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "embedviz/classifiers/adaboost.hpp"
#include "embedviz/classifiers/knn.hpp"
#include "embedviz/classifiers/mlp.hpp"
#include "embedviz/classifiers/svm.hpp"
#include "embedviz/classifiers/tree.hpp"
#include "embedviz/data.hpp"
#include "embedviz/parallel.hpp"

namespace embedviz {

enum class ClassifierKind { kKnn, kSvmRbf, kDecisionTree, kRandomForest, kMlp, kAdaBoost };

inline constexpr std::array<ClassifierKind, 6> kAllClassifierKinds = {
    ClassifierKind::kKnn, ClassifierKind::kSvmRbf, ClassifierKind::kDecisionTree,
    ClassifierKind::kRandomForest, ClassifierKind::kMlp, ClassifierKind::kAdaBoost};

// Display names, as used in the metrics table.
inline std::string_view classifier_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kKnn: return "KNN";
    case ClassifierKind::kSvmRbf: return "SVM";
    case ClassifierKind::kDecisionTree: return "DT";
    case ClassifierKind::kRandomForest: return "RF";
    case ClassifierKind::kMlp: return "MLP";
    case ClassifierKind::kAdaBoost: return "AdaBoost";
  }
  return "?";
}

// Accepts display names and a few aliases, case-insensitively.
inline std::optional<ClassifierKind> parse_classifier_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "knn") return ClassifierKind::kKnn;
  if (lower == "svm" || lower == "svm_rbf" || lower == "rbf-svm") return ClassifierKind::kSvmRbf;
  if (lower == "dt" || lower == "tree" || lower == "decision_tree") return ClassifierKind::kDecisionTree;
  if (lower == "rf" || lower == "forest" || lower == "random_forest") return ClassifierKind::kRandomForest;
  if (lower == "mlp") return ClassifierKind::kMlp;
  if (lower == "adaboost" || lower == "ada") return ClassifierKind::kAdaBoost;
  return std::nullopt;
}

// Hyperparameters for every kind; only the block matching kind is used.
// Defaults are k=3; gamma=2, C=1; depth 5; 10 trees of depth 5 with one
// feature per split; one hidden layer with alpha=1 for 1000 epochs; 50 stumps.
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kKnn;
  KnnParams knn;
  SvmParams svm;
  TreeParams tree;
  ForestParams forest;
  MlpParams mlp;
  AdaBoostParams adaboost;

  static ClassifierSpec of(ClassifierKind kind) {
    ClassifierSpec spec;
    spec.kind = kind;
    return spec;
  }
};

inline std::vector<ClassifierSpec> default_classifier_specs() {
  std::vector<ClassifierSpec> specs;
  for (auto kind : kAllClassifierKinds) specs.push_back(ClassifierSpec::of(kind));
  return specs;
}

class TrainedModel {
 public:
  using Variant = std::variant<KnnModel, SvmModel, DecisionTreeModel, RandomForestModel, MlpModel,
                               AdaBoostModel>;

  TrainedModel(ClassifierKind kind, std::size_t dim, std::size_t n_train, Variant model,
               bool converged = true)
      : kind_(kind), dim_(dim), n_train_(n_train), model_(std::move(model)), converged_(converged) {}

  ClassifierKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t n_train() const noexcept { return n_train_; }
  bool converged() const noexcept { return converged_; }
  const Variant& model() const noexcept { return model_; }

  // 0.5 for probability-like scores, 0 for margins.
  double threshold() const {
    return std::visit([](const auto& m) { return m.threshold(); }, model_);
  }

  double score_one(std::span<const double> x) const {
    if (x.size() != dim_) {
      throw Error(ErrorKind::kDimensionMismatch, "model expects " + std::to_string(dim_) +
                                                     " features, got " + std::to_string(x.size()));
    }
    return std::visit([&](const auto& m) { return m.score(x); }, model_);
  }

  int predict_one(std::span<const double> x) const {
    return score_one(x) >= threshold() ? kFailed : kSafe;
  }

  std::vector<double> predict_score(const Matrix& x) const {
    check_dim(x);
    std::vector<double> out(x.rows());
    parallel_for(x.rows(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) out[i] = score_one(x.row(i));
    }, 64);
    return out;
  }

  std::vector<int> predict(const Matrix& x) const {
    const auto scores = predict_score(x);
    const double t = threshold();
    std::vector<int> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= t ? kFailed : kSafe;
    return out;
  }

  // Text format, first line "embedviz-model 1".
  void save(std::ostream& out) const {
    out << "embedviz-model 1\n"
        << "kind " << classifier_name(kind_) << "\n"
        << "dim " << dim_ << "\n"
        << "n_train " << n_train_ << "\n"
        << "converged " << (converged_ ? 1 : 0) << "\n";
    std::visit([&](const auto& m) { m.save(out); }, model_);
    out << "end\n";
  }

  static TrainedModel load(std::istream& in) {
    model_io::expect(in, "embedviz-model");
    if (model_io::get_int(in) != 1) throw Error(ErrorKind::kBadModelFile, "unsupported model version");
    model_io::expect(in, "kind");
    const auto name = model_io::token(in);
    const auto kind = parse_classifier_kind(name);
    if (!kind) throw Error(ErrorKind::kBadModelFile, "unknown classifier kind '" + name + "'");
    model_io::expect(in, "dim");
    const auto dim = model_io::get_size(in);
    model_io::expect(in, "n_train");
    const auto n_train = model_io::get_size(in);
    model_io::expect(in, "converged");
    const bool converged = model_io::get_int(in) != 0;
    Variant model = load_variant(*kind, in, dim);
    model_io::expect(in, "end");
    return TrainedModel(*kind, dim, n_train, std::move(model), converged);
  }

  void save_file(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
    save(out);
  }

  static TrainedModel load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kMissingFile, "cannot open " + path.string());
    return load(in);
  }

 private:
  static Variant load_variant(ClassifierKind kind, std::istream& in, std::size_t dim) {
    switch (kind) {
      case ClassifierKind::kKnn: return KnnModel::load(in);
      case ClassifierKind::kSvmRbf: return SvmModel::load(in);
      case ClassifierKind::kDecisionTree: return DecisionTreeModel::load(in, dim);
      case ClassifierKind::kRandomForest: return RandomForestModel::load(in, dim);
      case ClassifierKind::kMlp: return MlpModel::load(in);
      case ClassifierKind::kAdaBoost: return AdaBoostModel::load(in, dim);
    }
    throw Error(ErrorKind::kBadModelFile, "unknown kind");
  }

  void check_dim(const Matrix& x) const {
    if (x.cols() != dim_ && x.rows() > 0) {
      throw Error(ErrorKind::kDimensionMismatch, "model expects " + std::to_string(dim_) +
                                                     " features, got " + std::to_string(x.cols()));
    }
  }

  ClassifierKind kind_;
  std::size_t dim_;
  std::size_t n_train_;
  Variant model_;
  bool converged_;
};

// Deterministic given the seeds inside spec. KNN accepts single-class
// training sets; every other kind requires both classes.
inline TrainedModel fit(const ClassifierSpec& spec, const Dataset& train) {
  detail::require(train.dim() >= 1, ErrorKind::kInvalidArgument, "training data has no features");
  detail::require(train.size() >= 1, ErrorKind::kInvalidArgument, "training data is empty");
  if (spec.kind != ClassifierKind::kKnn && !train.has_both_classes()) {
    throw Error(ErrorKind::kSingleClass,
                std::string(classifier_name(spec.kind)) + " needs both classes in training data");
  }
  const std::size_t d = train.dim(), n = train.size();
  switch (spec.kind) {
    case ClassifierKind::kKnn:
      return TrainedModel(spec.kind, d, n, KnnModel::fit(train, spec.knn));
    case ClassifierKind::kSvmRbf: {
      auto m = SvmModel::fit(train, spec.svm);
      const bool converged = m.converged();
      return TrainedModel(spec.kind, d, n, std::move(m), converged);
    }
    case ClassifierKind::kDecisionTree:
      return TrainedModel(spec.kind, d, n, DecisionTreeModel::fit(train, spec.tree));
    case ClassifierKind::kRandomForest:
      return TrainedModel(spec.kind, d, n, RandomForestModel::fit(train, spec.forest));
    case ClassifierKind::kMlp:
      return TrainedModel(spec.kind, d, n, MlpModel::fit(train, spec.mlp));
    case ClassifierKind::kAdaBoost:
      return TrainedModel(spec.kind, d, n, AdaBoostModel::fit(train, spec.adaboost));
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown classifier kind");
}

inline std::vector<int> predict(const TrainedModel& model, const Matrix& x) { return model.predict(x); }

inline std::vector<double> predict_score(const TrainedModel& model, const Matrix& x) {
  return model.predict_score(x);
}

}  // namespace embedviz

#endif  // EMBEDVIZ_CLASSIFIERS_HPP_
