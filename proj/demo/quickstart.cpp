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

// Generates a small imbalanced dataset, runs all four pipeline options and
// prints the metrics table. Figures and models go to ./quickstart_out.

#include <iostream>

#include "embedviz/embedviz.hpp"

int main() {
  using namespace embedviz;
  const Dataset ds = generate_synthetic(600, 10, 0.13, 3.0, 7);
  std::cout << ds.size() << " rows, " << ds.count(kFailed) << " failed\n";

  PipelineConfig cfg;
  cfg.tsne.perplexity = 30;
  cfg.output_dir = "quickstart_out";
  cfg.progress = [](const std::string& m) { std::cerr << m << '\n'; };

  const PipelineResult result = run_all(ds, cfg);
  std::cout << metrics_table_text(result.table);

  const auto* mlp3 = result.table.find("MLP", 3);
  const auto* mlp4 = result.table.find("MLP", 4);
  std::cout << "MLP balanced accuracy on the map: " << mlp3->balanced_accuracy << " -> "
            << mlp4->balanced_accuracy << " with SMOTE\n";
  return 0;
}
