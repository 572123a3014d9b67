// Copyright 2026 The leakbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LEAKBENCH_REPORT_HPP
#define LEAKBENCH_REPORT_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "leakbench/common.hpp"

namespace leakbench {

// One experiment cell: factor settings, seed, and every metric the attack
// promises (absent values stay null-flagged). Timestamps live outside row
// content so reruns are byte-identical.
struct ReportRow {
  std::string attack;
  std::string factor = "baseline";
  std::string level = "baseline";
  std::uint64_t seed = 0;
  std::map<std::string, std::optional<double>> metrics;
  std::map<std::string, std::string> notes;  // non-numeric row fields (e.g. trigger_hash)
  bool failed = false;
  std::string error;
};

// Fixed metric registry per attack; emission order follows these lists.
inline const std::vector<std::string>& metric_registry(const std::string& attack) {
  static const std::map<std::string, std::vector<std::string>> registry = {
      {"s2mia", {"roc_auc", "pr_auc", "accuracy", "precision", "recall", "f1"}},
      {"mbmia",
       {"roc_auc", "f1", "accuracy", "precision", "recall", "retrieval_recall",
        "mean_mask_accuracy"}},
      {"dea-exposure",
       {"mean_exposure", "median_exposure", "rank1_rate", "mean_distributional", "templates"}},
      {"dea-extract", {"exact_match", "any_match", "none_rate", "truncated_rate", "probes"}},
      {"backdoor", {"asr", "ca", "ca_clean_baseline", "decoy_asr", "ratio"}},
      {"aia",
       {"top1", "top3", "top1_sex", "top3_sex", "top1_city", "top3_city", "top1_relationship",
        "top3_relationship", "top1_age", "top3_age", "top1_education", "top3_education",
        "top1_occupation", "top3_occupation", "top1_birthplace", "top3_birthplace",
        "top1_income", "top3_income"}},
  };
  auto it = registry.find(attack);
  if (it == registry.end()) throw ValidationError("unknown attack for registry: " + attack);
  return it->second;
}

// Every registry key present; unknown keys rejected.
inline void finalize_row(ReportRow& row) {
  const auto& keys = metric_registry(row.attack);
  for (const auto& [k, v] : row.metrics) {
    bool known = false;
    for (const auto& key : keys) {
      if (key == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ValidationError("metric not in registry for " + row.attack + ": " + k);
  }
  for (const auto& key : keys) {
    if (!row.metrics.contains(key)) row.metrics[key] = std::nullopt;
  }
}

inline std::string format_metric(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

inline nlohmann::json row_to_json(const ReportRow& row) {
  nlohmann::json j;
  j["attack"] = row.attack;
  j["factor"] = row.factor;
  j["level"] = row.level;
  j["seed"] = row.seed;
  j["failed"] = row.failed;
  if (row.failed) j["error"] = row.error;
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [k, v] : row.metrics) {
    if (v) {
      metrics[k] = *v;
    } else {
      metrics[k] = nullptr;
    }
  }
  j["metrics"] = metrics;
  if (!row.notes.empty()) j["notes"] = row.notes;
  return j;
}

inline ReportRow row_from_json(const nlohmann::json& j) {
  ReportRow row;
  row.attack = j.at("attack").get<std::string>();
  row.factor = j.at("factor").get<std::string>();
  row.level = j.at("level").get<std::string>();
  row.seed = j.at("seed").get<std::uint64_t>();
  row.failed = j.value("failed", false);
  row.error = j.value("error", "");
  for (const auto& [k, v] : j.at("metrics").items()) {
    row.metrics[k] = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  }
  if (j.contains("notes")) {
    row.notes = j.at("notes").get<std::map<std::string, std::string>>();
  }
  return row;
}

inline void emit_jsonl(const std::vector<ReportRow>& rows, const std::string& path) {
  if (rows.empty()) throw ValidationError("emit_report: no rows");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for write: " + path);
  for (const auto& row : rows) out << row_to_json(row).dump() << "\n";
}

inline std::vector<ReportRow> load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::vector<ReportRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(row_from_json(nlohmann::json::parse(line)));
  }
  return rows;
}

// CSV with a stable column order, floats at 4 decimals, and a trailing
// summary block of per-(factor, level) means across seeds.
inline void emit_csv(const std::vector<ReportRow>& rows, const std::string& path) {
  if (rows.empty()) throw ValidationError("emit_report: no rows");
  const auto& keys = metric_registry(rows.front().attack);
  for (const auto& row : rows) {
    if (row.attack != rows.front().attack) {
      throw ValidationError("emit_csv: rows mix attacks; emit one report per attack");
    }
  }

  std::ofstream out(path);
  if (!out) throw DataError("cannot open for write: " + path);
  out << "attack,factor,level,seed";
  for (const auto& k : keys) out << "," << k;
  out << "\n";
  for (const auto& row : rows) {
    out << row.attack << "," << row.factor << "," << row.level << "," << row.seed;
    for (const auto& k : keys) out << "," << format_metric(row.metrics.at(k));
    out << "\n";
  }

  // per-level means across seeds
  out << "\n# summary (mean across seeds)\n";
  out << "factor,level,seeds";
  for (const auto& k : keys) out << "," << k;
  out << "\n";
  std::vector<std::pair<std::string, std::string>> levels;
  for (const auto& row : rows) {
    auto key = std::make_pair(row.factor, row.level);
    bool seen = false;
    for (const auto& l : levels) {
      if (l == key) {
        seen = true;
        break;
      }
    }
    if (!seen) levels.push_back(key);
  }
  for (const auto& [factor, level] : levels) {
    std::size_t n = 0;
    std::map<std::string, std::pair<double, std::size_t>> sums;
    for (const auto& row : rows) {
      if (row.factor != factor || row.level != level || row.failed) continue;
      ++n;
      for (const auto& k : keys) {
        if (auto v = row.metrics.at(k)) {
          sums[k].first += *v;
          sums[k].second += 1;
        }
      }
    }
    out << factor << "," << level << "," << n;
    for (const auto& k : keys) {
      auto it = sums.find(k);
      if (it == sums.end() || it->second.second == 0) {
        out << ",";
      } else {
        out << "," << format_metric(it->second.first / static_cast<double>(it->second.second));
      }
    }
    out << "\n";
  }
}

inline void emit_report(const std::vector<ReportRow>& rows, const std::string& format,
                        const std::string& path) {
  if (format == "csv") {
    emit_csv(rows, path);
  } else if (format == "jsonl") {
    emit_jsonl(rows, path);
  } else {
    throw ValidationError("unknown report format: " + format);
  }
}

}  // namespace leakbench

#endif  // LEAKBENCH_REPORT_HPP
