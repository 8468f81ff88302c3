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

// embedviz command-line frontend.
//
//   embedviz synth --n 8000 --d 49 --minority 0.1329 --out data.csv
//   embedviz run --input data.csv --options 1,2,3,4 --out-dir results
//   embedviz embed --input data.csv --perplexity 100 --out map.csv
//
// Exit status: 0 success, 1 usage error, 2 data or I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "embedviz/embedviz.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace embedviz;

namespace {

struct Globals {
  std::uint64_t seed = 42;
  fs::path out_dir = ".";
  bool quiet = false;
};

// "label" selects a column by name; a bare integer selects it by 0-based index.
LabelColumn label_column_from(const std::string& text) {
  if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
    return static_cast<std::size_t>(std::stoull(text));
  }
  return text;
}

fs::path output_path(const Globals& g, const std::string& explicit_path, const std::string& fallback) {
  if (!explicit_path.empty()) return explicit_path;
  fs::create_directories(g.out_dir);
  return g.out_dir / fallback;
}

void progress(const Globals& g, const std::string& message) {
  if (!g.quiet) std::cerr << "[embedviz] " << message << '\n';
}

struct ClassifierFlags {
  std::size_t k = 3;
  double gamma = 2.0;
  double C = 1.0;
  std::size_t max_depth = 5;
  std::size_t n_estimators = 10;
  std::size_t max_features = 1;
  double alpha = 1.0;
  std::size_t epochs = 1000;
  std::size_t boost_rounds = 50;

  void attach(CLI::App* cmd) {
    cmd->add_option("--k", k, "KNN neighbours")->capture_default_str();
    cmd->add_option("--gamma", gamma, "RBF kernel width")->capture_default_str();
    cmd->add_option("--C", C, "SVM box constraint")->capture_default_str();
    cmd->add_option("--max-depth", max_depth, "tree and forest depth")->capture_default_str();
    cmd->add_option("--n-estimators", n_estimators, "trees in the forest")->capture_default_str();
    cmd->add_option("--max-features", max_features, "features tried per forest split")->capture_default_str();
    cmd->add_option("--alpha", alpha, "MLP L2 strength")->capture_default_str();
    cmd->add_option("--epochs", epochs, "MLP epochs")->capture_default_str();
    cmd->add_option("--boost-rounds", boost_rounds, "AdaBoost stumps")->capture_default_str();
  }

  ClassifierSpec spec(ClassifierKind kind, std::uint64_t seed) const {
    auto s = ClassifierSpec::of(kind);
    s.knn.k = k;
    s.svm.gamma = gamma;
    s.svm.C = C;
    s.tree.max_depth = s.forest.max_depth = max_depth;
    s.forest.n_estimators = n_estimators;
    s.forest.max_features = max_features;
    s.forest.seed = seed;
    s.mlp.alpha = alpha;
    s.mlp.max_epochs = epochs;
    s.mlp.seed = seed;
    s.adaboost.n_estimators = boost_rounds;
    return s;
  }
};

// Reads label,predicted,score columns (any order, extra columns ignored).
MetricsReport metrics_from_predictions(const fs::path& path, const std::string& name, int option) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kMissingFile, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kMalformedCsv, "empty file " + path.string());
  const auto header = detail::split_commas(line);
  std::size_t cols[3] = {header.size(), header.size(), header.size()};
  const char* wanted[3] = {"label", "predicted", "score"};
  for (std::size_t c = 0; c < header.size(); ++c) {
    for (int w = 0; w < 3; ++w) {
      if (detail::trim(header[c]) == wanted[w]) cols[w] = c;
    }
  }
  for (int w = 0; w < 3; ++w) {
    if (cols[w] == header.size()) {
      throw Error(ErrorKind::kMissingLabelColumn, std::string("predictions file lacks a '") + wanted[w] + "' column");
    }
  }
  std::vector<int> truth, predicted;
  std::vector<double> scores;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto fields = detail::split_commas(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::kMalformedCsv, "row " + std::to_string(row) + " has the wrong field count", row);
    }
    double v[3];
    for (int w = 0; w < 3; ++w) {
      if (!detail::parse_double(detail::trim(fields[cols[w]]), v[w])) {
        throw Error(ErrorKind::kNonNumericFeature,
                    "row " + std::to_string(row) + ": '" + std::string(fields[cols[w]]) + "' is not a number", row,
                    cols[w] + 1);
      }
    }
    truth.push_back(static_cast<int>(v[0]));
    predicted.push_back(static_cast<int>(v[1]));
    scores.push_back(v[2]);
    if (v[0] != truth.back() || v[1] != predicted.back()) {
      throw Error(ErrorKind::kBadLabel, "row " + std::to_string(row) + ": labels must be -1 or +1", row);
    }
  }
  return evaluate_predictions(truth, predicted, scores, name, option);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embedviz: t-SNE maps, SMOTE and six classifiers for imbalanced binary data"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "seed for split, t-SNE, SMOTE, forest and MLP")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for outputs")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "suppress progress messages");

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic two-Gaussian dataset");
  std::size_t synth_n = 0, synth_d = 0;
  double minority = 0.0, separation = 3.0;
  std::string synth_out;
  synth->add_option("--n", synth_n, "rows")->required();
  synth->add_option("--d", synth_d, "features")->required();
  synth->add_option("--minority", minority, "fraction of +1 rows")->required();
  synth->add_option("--separation", separation, "distance between class means")->capture_default_str();
  synth->add_option("--out", synth_out, "output CSV (default <out-dir>/synthetic.csv)");

  // run
  auto* run = app.add_subcommand("run", "run the full pipeline for one or more options");
  std::string input, label_column = "label";
  std::vector<int> options{1, 2, 3, 4};
  double perplexity = 100.0, test_fraction = 0.25;
  int iterations = 1000;
  std::vector<double> sweep;
  std::size_t resolution = 200, smote_k = 5;
  bool no_figures = false;
  ClassifierFlags cflags;
  std::vector<std::string> classifier_names;
  run->add_option("--input", input, "input CSV with a label column")->required()->check(CLI::ExistingFile);
  run->add_option("--options", options, "pipeline options to run")->delimiter(',')->check(CLI::Range(1, 4));
  run->add_option("--label-column", label_column, "label column name or 0-based index")->capture_default_str();
  run->add_option("--perplexity", perplexity, "t-SNE perplexity")->capture_default_str();
  run->add_option("--iterations", iterations, "t-SNE iterations")->capture_default_str();
  run->add_option("--test-fraction", test_fraction, "stratified test share")->capture_default_str();
  run->add_option("--sweep", sweep, "also write t-SNE maps for these perplexities")->delimiter(',');
  run->add_option("--resolution", resolution, "decision-surface grid size")->capture_default_str();
  run->add_option("--smote-k", smote_k, "SMOTE neighbours")->capture_default_str();
  run->add_option("--classifiers", classifier_names, "subset of KNN,SVM,DT,RF,MLP,AdaBoost")->delimiter(',');
  run->add_flag("--no-figures", no_figures, "skip SVG output");
  cflags.attach(run);

  // embed
  auto* embed = app.add_subcommand("embed", "compute a 2-D t-SNE map");
  std::string embed_out;
  embed->add_option("--input", input, "input CSV")->required()->check(CLI::ExistingFile);
  embed->add_option("--label-column", label_column, "label column name or 0-based index")->capture_default_str();
  embed->add_option("--perplexity", perplexity, "t-SNE perplexity")->capture_default_str();
  embed->add_option("--iterations", iterations, "t-SNE iterations")->capture_default_str();
  embed->add_option("--sweep", sweep, "write one scatter SVG per perplexity")->delimiter(',');
  embed->add_option("--out", embed_out, "output CSV (default <out-dir>/embedding.csv)");

  // smote
  auto* smote = app.add_subcommand("smote", "oversample the minority class of a CSV");
  std::string smote_out;
  double ratio = 1.0;
  smote->add_option("--input", input, "input CSV")->required()->check(CLI::ExistingFile);
  smote->add_option("--label-column", label_column, "label column name or 0-based index")->capture_default_str();
  smote->add_option("--k", smote_k, "SMOTE neighbours")->capture_default_str();
  smote->add_option("--ratio", ratio, "minority/majority ratio after resampling")->capture_default_str();
  smote->add_option("--out", smote_out, "output CSV (default <out-dir>/resampled.csv)");

  // classify
  auto* classify = app.add_subcommand("classify", "fit one classifier and score a test CSV");
  std::string train_path, test_path, classifier = "MLP";
  classify->add_option("--train", train_path, "training CSV")->required()->check(CLI::ExistingFile);
  classify->add_option("--test", test_path, "test CSV")->required()->check(CLI::ExistingFile);
  classify->add_option("--classifier", classifier, "KNN, SVM, DT, RF, MLP or AdaBoost")->capture_default_str();
  classify->add_option("--label-column", label_column, "label column name or 0-based index")->capture_default_str();
  cflags.attach(classify);

  // metrics
  auto* metrics = app.add_subcommand("metrics", "score a predictions CSV (label,predicted,score)");
  std::string predictions, metrics_out, metrics_name;
  metrics->add_option("--predictions", predictions, "predictions CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--name", metrics_name, "classifier name recorded in the report");
  metrics->add_option("--out", metrics_out, "write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    std::cerr << app.help();
    return 1;
  }

  auto parse_kind = [](const std::string& name) {
    const auto kind = parse_classifier_kind(name);
    if (!kind) throw CLI::ValidationError("--classifier", "unknown classifier '" + name + "'");
    return *kind;
  };

  try {
    if (*synth) {
      const auto ds = generate_synthetic(synth_n, synth_d, minority, separation, g.seed);
      const auto path = output_path(g, synth_out, "synthetic.csv");
      write_csv(ds, path);
      progress(g, "wrote " + std::to_string(ds.size()) + " rows (" + std::to_string(ds.count(kFailed)) +
                      " positive) to " + path.string());
    } else if (*run) {
      const auto ds = load_csv(input, label_column_from(label_column));
      PipelineConfig cfg;
      if (!classifier_names.empty()) {
        cfg.classifiers.clear();
        for (const auto& name : classifier_names) cfg.classifiers.push_back(cflags.spec(parse_kind(name), g.seed));
      } else {
        for (auto& spec : cfg.classifiers) spec = cflags.spec(spec.kind, g.seed);
      }
      cfg.with_seed(g.seed);
      cfg.tsne.perplexity = perplexity;
      cfg.tsne.iterations = iterations;
      cfg.test_fraction = test_fraction;
      cfg.smote.k_neighbors = smote_k;
      cfg.surface_resolution = resolution;
      cfg.write_figures = !no_figures;
      cfg.output_dir = g.out_dir;
      cfg.progress = [&](const std::string& m) { progress(g, m); };
      progress(g, "loaded " + std::to_string(ds.size()) + " rows x " + std::to_string(ds.dim()) + " features");
      const auto result = run_all(ds, cfg, options);
      if (!sweep.empty()) write_perplexity_sweep(ds, cfg.tsne, sweep, g.out_dir);
      std::cout << metrics_table_text(result.table);
    } else if (*embed) {
      const auto ds = load_csv(input, label_column_from(label_column));
      TsneConfig cfg;
      cfg.perplexity = perplexity;
      cfg.iterations = iterations;
      cfg.seed = g.seed;
      const auto normalized = normalize(ds);
      progress(g, "t-SNE on " + std::to_string(ds.size()) + " rows, perplexity " + detail::format_double(perplexity));
      const auto emb = run_tsne(normalized.samples(), cfg);
      const auto path = output_path(g, embed_out, "embedding.csv");
      write_embedding_csv(emb.points, ds.labels(), path);
      if (emb.unconverged_rows > 0) {
        progress(g, std::to_string(emb.unconverged_rows) + " rows missed the perplexity tolerance");
      }
      progress(g, "final KL " + detail::format_double(emb.final_kl) + ", wrote " + path.string());
      if (!sweep.empty()) {
        fs::create_directories(g.out_dir);
        write_perplexity_sweep(ds, cfg, sweep, g.out_dir);
      }
    } else if (*smote) {
      const auto ds = load_csv(input, label_column_from(label_column));
      SmoteConfig cfg;
      cfg.k_neighbors = smote_k;
      cfg.target_ratio = ratio;
      cfg.seed = g.seed;
      const auto result = smote_oversample_detailed(ds, cfg);
      for (const auto& w : result.warnings) progress(g, "warning: " + w);
      const auto path = output_path(g, smote_out, "resampled.csv");
      write_csv(result.data, path);
      progress(g, "added " + std::to_string(result.synthesized) + " synthetic rows, wrote " + path.string());
    } else if (*classify) {
      const auto kind = parse_kind(classifier);
      const auto train = load_csv(train_path, label_column_from(label_column));
      const auto test = load_csv(test_path, label_column_from(label_column));
      const auto model = fit(cflags.spec(kind, g.seed), train);
      const auto scores = model.predict_score(test.samples());
      const std::string name(classifier_name(kind));
      fs::create_directories(g.out_dir);
      std::ofstream out(g.out_dir / ("predictions_" + name + ".csv"), std::ios::binary);
      out << "label,predicted,score\n";
      std::vector<int> predicted(scores.size());
      for (std::size_t i = 0; i < scores.size(); ++i) {
        predicted[i] = scores[i] >= model.threshold() ? kFailed : kSafe;
        out << test.labels()[i] << ',' << predicted[i] << ',' << detail::format_double(scores[i]) << '\n';
      }
      if (!out) throw Error(ErrorKind::kIo, "cannot write predictions to " + g.out_dir.string());
      model.save_file(g.out_dir / ("model_" + name + ".txt"));
      if (test.has_both_classes()) {
        std::cout << report_to_json(evaluate_predictions(test.labels(), predicted, scores, name)).dump(2) << '\n';
      }
    } else if (*metrics) {
      const auto report = metrics_from_predictions(predictions, metrics_name, 0);
      const auto text = report_to_json(report).dump(2) + "\n";
      if (metrics_out.empty()) {
        std::cout << text;
      } else {
        write_text_file(metrics_out, text);
      }
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
