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

#ifndef EMBEDVIZ_METRICS_TABLE_HPP_
#define EMBEDVIZ_METRICS_TABLE_HPP_

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "embedviz/error.hpp"
#include "embedviz/metrics.hpp"

namespace embedviz {

// Classifier rows x option blocks x five metrics (pre, rec, f1, acc, auc).
class MetricsTable {
 public:
  MetricsTable() = default;
  explicit MetricsTable(std::vector<MetricsReport> reports) : reports_(std::move(reports)) {}

  void add(MetricsReport report) { reports_.push_back(std::move(report)); }
  const std::vector<MetricsReport>& reports() const { return reports_; }

  std::vector<int> options() const {
    std::vector<int> out;
    for (const auto& r : reports_) {
      if (std::find(out.begin(), out.end(), r.option) == out.end()) out.push_back(r.option);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // First-appearance order.
  std::vector<std::string> classifiers() const {
    std::vector<std::string> out;
    for (const auto& r : reports_) {
      if (std::find(out.begin(), out.end(), r.classifier) == out.end()) out.push_back(r.classifier);
    }
    return out;
  }

  const MetricsReport* find(const std::string& classifier, int option) const {
    for (const auto& r : reports_) {
      if (r.classifier == classifier && r.option == option) return &r;
    }
    return nullptr;
  }

 private:
  std::vector<MetricsReport> reports_;
};

namespace detail {

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline constexpr const char* kMetricColumns[] = {"pre", "rec", "f1", "acc", "auc"};

inline std::array<double, 5> metric_values(const MetricsReport& r) {
  return {r.precision, r.recall, r.f1, r.balanced_accuracy, r.auc};
}

}  // namespace detail

// Two-decimal CSV, one row per classifier, columns opt<k>_<metric>.
inline std::string metrics_table_csv(const MetricsTable& table) {
  std::ostringstream out;
  const auto options = table.options();
  out << "classifier";
  for (int o : options) {
    for (const char* m : detail::kMetricColumns) out << ",opt" << o << '_' << m;
  }
  out << '\n';
  for (const auto& name : table.classifiers()) {
    out << name;
    for (int o : options) {
      const auto* r = table.find(name, o);
      for (std::size_t k = 0; k < 5; ++k) out << ',' << (r ? detail::fixed2(detail::metric_values(*r)[k]) : "");
    }
    out << '\n';
  }
  return out.str();
}

// Aligned plain-text rendering of the same layout.
inline std::string metrics_table_text(const MetricsTable& table) {
  std::ostringstream out;
  const auto options = table.options();
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-10s", "");
  out << buf;
  for (int o : options) {
    std::snprintf(buf, sizeof(buf), "| option %-27d", o);
    out << buf;
  }
  out << "\n";
  std::snprintf(buf, sizeof(buf), "%-10s", "classifier");
  out << buf;
  for (std::size_t b = 0; b < options.size(); ++b) {
    out << "| ";
    for (const char* m : detail::kMetricColumns) {
      std::snprintf(buf, sizeof(buf), "%-7s", m);
      out << buf;
    }
  }
  out << "\n";
  for (const auto& name : table.classifiers()) {
    std::snprintf(buf, sizeof(buf), "%-10s", name.c_str());
    out << buf;
    for (int o : options) {
      out << "| ";
      const auto* r = table.find(name, o);
      for (std::size_t k = 0; k < 5; ++k) {
        std::snprintf(buf, sizeof(buf), "%-7s", r ? detail::fixed2(detail::metric_values(*r)[k]).c_str() : "-");
        out << buf;
      }
    }
    out << "\n";
  }
  return out.str();
}

inline nlohmann::ordered_json report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["classifier"] = r.classifier;
  j["option"] = r.option;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["balanced_accuracy"] = r.balanced_accuracy;
  j["auc"] = r.auc;
  j["confusion"] = {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"tn", r.confusion.tn},
                    {"fn", r.confusion.fn}};
  return j;
}

inline MetricsReport report_from_json(const nlohmann::ordered_json& j) {
  MetricsReport r;
  r.classifier = j.at("classifier").get<std::string>();
  r.option = j.at("option").get<int>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.balanced_accuracy = j.at("balanced_accuracy").get<double>();
  r.auc = j.at("auc").get<double>();
  const auto& c = j.at("confusion");
  r.confusion = {c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(),
                 c.at("tn").get<std::size_t>(), c.at("fn").get<std::size_t>()};
  return r;
}

// Full-precision JSON: {"options": [...], "classifiers": [...], "reports": [...]}.
inline nlohmann::ordered_json metrics_table_json(const MetricsTable& table) {
  nlohmann::ordered_json j;
  j["options"] = table.options();
  j["classifiers"] = table.classifiers();
  j["metrics"] = {"precision", "recall", "f1", "balanced_accuracy", "auc"};
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : table.reports()) j["reports"].push_back(report_to_json(r));
  return j;
}

inline MetricsTable metrics_table_from_json(const nlohmann::ordered_json& j) {
  MetricsTable table;
  for (const auto& r : j.at("reports")) table.add(report_from_json(r));
  return table;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

inline void write_metrics_table(const MetricsTable& table, const std::filesystem::path& dir) {
  write_text_file(dir / "metrics_table.csv", metrics_table_csv(table));
  write_text_file(dir / "metrics_table.json", metrics_table_json(table).dump(2) + "\n");
}

}  // namespace embedviz

#endif  // EMBEDVIZ_METRICS_TABLE_HPP_
