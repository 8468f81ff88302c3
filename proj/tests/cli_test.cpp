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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "embedviz/embedviz.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace embedviz {
namespace {

using testing::read_file;
using testing::TempDir;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult cli(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string command = std::string("\"") + EMBEDVIZ_CLI_PATH + "\" " + args + " > \"" + out.string() +
                              "\" 2> \"" + err.string() + "\"";
  const int status = std::system(command.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

TEST(Cli, SynthPaperShape) {
  TempDir dir;
  const auto path = (dir / "data.csv").string();
  const auto r = cli(dir, "synth --n 8000 --d 49 --minority 0.1329 --seed 1 --out " + path);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ds = load_csv(path);
  EXPECT_EQ(ds.size(), 8000u);
  EXPECT_EQ(ds.dim(), 49u);
  EXPECT_EQ(ds.count(kFailed), 1063u);
  EXPECT_EQ(ds, generate_synthetic(8000, 49, 0.1329, 3.0, 1));
}

TEST(Cli, RunWithoutInputIsUsageError) {
  TempDir dir;
  const auto r = cli(dir, "run --options 1,2");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--input"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, UnknownFlagAndSubcommandAreUsageErrors) {
  TempDir dir;
  EXPECT_EQ(cli(dir, "synth --n 10 --d 2 --minority 0.2 --bogus 1").code, 1);
  EXPECT_EQ(cli(dir, "frobnicate").code, 1);
  EXPECT_EQ(cli(dir, "").code, 1);
}

TEST(Cli, DataErrorsExitTwoWithOneLine) {
  TempDir dir;
  testing::write_file(dir / "bad.csv", "a,label\n1,-1\n2,7\n");
  const auto r = cli(dir, "embed --input " + (dir / "bad.csv").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_NE(r.err.find("row 2"), std::string::npos);

  EXPECT_EQ(cli(dir, "synth --n 100 --d 3 --minority 0.7").code, 2);
}

TEST(Cli, EmbedIsByteDeterministic) {
  TempDir dir;
  write_csv(generate_synthetic(120, 5, 0.2, 3.0, 2), dir / "d.csv");
  const std::string input = " --input " + (dir / "d.csv").string() + " --perplexity 100 --seed 7 --quiet";
  ASSERT_EQ(cli(dir, "embed" + input + " --out " + (dir / "a.csv").string()).code, 0);
  ASSERT_EQ(cli(dir, "embed" + input + " --out " + (dir / "b.csv").string()).code, 0);
  const auto a = read_file(dir / "a.csv");
  EXPECT_EQ(a, read_file(dir / "b.csv"));
  EXPECT_EQ(a.rfind("x,y,label\n", 0), 0u);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 121);
}

TEST(Cli, QuietOnlySilencesProgress) {
  TempDir dir;
  write_csv(generate_synthetic(60, 3, 0.25, 3.0, 3), dir / "d.csv");
  const std::string base = "smote --input " + (dir / "d.csv").string() + " --out-dir " + dir.path().string();
  const auto loud = cli(dir, base);
  ASSERT_EQ(loud.code, 0) << loud.err;
  const auto first = read_file(dir / "resampled.csv");
  const auto quiet = cli(dir, base + " --quiet");
  ASSERT_EQ(quiet.code, 0);
  EXPECT_FALSE(loud.err.empty());
  EXPECT_TRUE(quiet.err.empty());
  EXPECT_EQ(first, read_file(dir / "resampled.csv"));
  const auto balanced = load_csv(dir / "resampled.csv");
  EXPECT_EQ(balanced.count(kFailed), balanced.count(kSafe));
}

TEST(Cli, ClassifyThenMetrics) {
  TempDir dir;
  const auto ds = generate_synthetic(200, 3, 0.3, 3.0, 4);
  const auto split = stratified_split(ds, 0.25, 1);
  write_csv(split.train, dir / "train.csv");
  write_csv(split.test, dir / "test.csv");
  const auto r = cli(dir, "classify --classifier SVM --train " + (dir / "train.csv").string() + " --test " +
                              (dir / "test.csv").string() + " --out-dir " + dir.path().string());
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(std::filesystem::exists(dir / "predictions_SVM.csv"));
  const auto model = TrainedModel::load_file(dir / "model_SVM.txt");
  EXPECT_EQ(model.kind(), ClassifierKind::kSvmRbf);

  const auto m = cli(dir, "metrics --predictions " + (dir / "predictions_SVM.csv").string() + " --name SVM");
  ASSERT_EQ(m.code, 0) << m.err;
  const auto report = report_from_json(nlohmann::ordered_json::parse(m.out));
  const auto direct = report_from_json(nlohmann::ordered_json::parse(r.out));
  EXPECT_EQ(report.auc, direct.auc);
  EXPECT_EQ(report.balanced_accuracy, direct.balanced_accuracy);
  EXPECT_EQ(report.confusion.total(), split.test.size());

  EXPECT_EQ(cli(dir, "classify --classifier lasso --train " + (dir / "train.csv").string() + " --test " +
                         (dir / "test.csv").string()).code,
            1);
}

TEST(Cli, RunWritesArtifacts) {
  TempDir dir;
  write_csv(generate_synthetic(120, 4, 0.2, 3.0, 5), dir / "d.csv");
  const auto r = cli(dir, "run --input " + (dir / "d.csv").string() + " --options 1,3 --perplexity 20 --iterations 200" +
                              " --classifiers KNN,DT --resolution 16 --quiet --out-dir " + (dir / "out").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("option 3"), std::string::npos);
  for (const char* name : {"metrics_table.csv", "metrics_table.json", "embedding_opt3.csv",
                           "fig4_option3_train.svg", "fig5_option3_surfaces.svg", "model_opt1_KNN.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / name)) << name;
  }
  EXPECT_EQ(cli(dir, "run --input " + (dir / "d.csv").string() + " --options 5").code, 1);
}

}  // namespace
}  // namespace embedviz
