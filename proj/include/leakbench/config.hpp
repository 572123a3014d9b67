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

#ifndef LEAKBENCH_CONFIG_HPP
#define LEAKBENCH_CONFIG_HPP

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "leakbench/common.hpp"
#include "leakbench/extract.hpp"
#include "leakbench/rag.hpp"

namespace leakbench {

inline constexpr int kConfigSchemaVersion = 1;

struct BackendSpec {
  std::string kind = "ngram";  // ngram | copy-generator | http | mock
  int order = 5;
  std::string mock = "uniform";  // uniform | fixed | constant
  std::string fixed_text = "No records were consulted for this reply.";
  std::string endpoint_host;
  int endpoint_port = 0;
  int timeout_ms = 5000;
  int retries = 2;
};

struct ExplicitPlant {
  std::string type;
  std::string value;
  int bracket = 1;
};

struct CorpusSpec {
  int docs = 400;
  int words_min = 40;
  int words_max = 70;
  double phone_decoy_rate = 0.6;
  // Auto-planted canaries: per (type, bracket) combination.
  std::vector<std::string> canary_types = {"PHONE", "EMAIL"};
  std::vector<int> brackets = {1, 2, 4, 8, 16};
  int canaries_per_bracket = 3;
  std::vector<ExplicitPlant> plant;  // replaces auto canaries when non-empty
  std::string load_path;             // when set, corpus is loaded instead of synthesized
};

// Paper-baseline defaults: N=501, m=10, gamma=0.5, K=5, 80% members,
// search budget (20, 20000, 50, 10), scoring batch 64.
struct ExperimentConfig {
  std::string attack;  // s2mia | mbmia | dea-exposure | dea-extract | backdoor | aia
  std::vector<std::uint64_t> seeds = {42};
  std::string out;
  BackendSpec backend;
  CorpusSpec corpus;

  // dea
  int pool_size_n = 501;
  int templates_per_type = 5;
  SearchBudget budget;
  int scoring_batch = 64;
  unsigned workers = 1;
  bool log_plaintext = false;

  // mia
  int mask_count_m = 10;
  double gamma = 0.5;
  int retrieval_k = 5;
  double membership_ratio = 0.8;
  int samples = 200;
  double generator_error_rate = 0.0;
  std::string prompt_style = "regular";
  std::string index_kind = "bm25";
  std::string mia_dataset;  // attack dataset file; synthesized when empty

  // backdoor
  double poison_ratio = 0.05;
  std::string trigger = "badmagic7";
  std::string trigger_target = "OVERRIDE-ACCEPTED-7Q";
  std::string trigger_position = "suffix";
  int probe_count = 40;

  // aia
  int aia_users = 50;

  void validate() const {
    static const std::vector<std::string> attacks = {"s2mia", "mbmia",    "dea-exposure",
                                                     "dea-extract", "backdoor", "aia"};
    bool ok = false;
    for (const auto& a : attacks) ok = ok || a == attack;
    if (!ok) throw ValidationError("config field 'attack' must be one of s2mia|mbmia|dea-exposure|dea-extract|backdoor|aia");
    if (seeds.empty()) throw ValidationError("config field 'seeds' must be non-empty");
    if (pool_size_n < 2) throw ValidationError("config field 'n' (pool size) must be >= 2");
    if (templates_per_type < 1 || templates_per_type > 15) {
      throw ValidationError("config field 'templates' must be in [1, 15]");
    }
    if (mask_count_m < 1) throw ValidationError("config field 'm' must be >= 1");
    if (gamma <= 0.0 || gamma > 1.0) throw ValidationError("config field 'gamma' must be in (0, 1]");
    if (retrieval_k < 1) throw ValidationError("config field 'k' must be >= 1");
    if (membership_ratio <= 0.0 || membership_ratio >= 1.0) {
      throw ValidationError("config field 'membership_ratio' must be in (0, 1)");
    }
    if (samples < 4) throw ValidationError("config field 'samples' must be >= 4");
    if (generator_error_rate < 0.0 || generator_error_rate > 1.0) {
      throw ValidationError("config field 'error_rate' must be in [0, 1]");
    }
    if (poison_ratio <= 0.0 || poison_ratio > 0.5) {
      throw ValidationError("config field 'poison_ratio' must be in (0, 0.5]");
    }
    if (probe_count < 1) throw ValidationError("config field 'probes' must be >= 1");
    if (aia_users < 1) throw ValidationError("config field 'users' must be >= 1");
    if (corpus.docs < 1) throw ValidationError("config field 'corpus.docs' must be >= 1");
    if (corpus.words_min < 1 || corpus.words_max < corpus.words_min) {
      throw ValidationError("config fields 'corpus.words_min/words_max' are inconsistent");
    }
    budget.validate();
    prompt_style_from_name(prompt_style);
    if (index_kind != "bm25" && index_kind != "hashed-cosine") {
      throw ValidationError("config field 'index' must be bm25 or hashed-cosine");
    }
    if (backend.kind != "ngram" && backend.kind != "copy-generator" && backend.kind != "http" &&
        backend.kind != "mock") {
      throw ValidationError("config field 'backend.kind' must be ngram|copy-generator|http|mock");
    }
    if (backend.kind == "ngram" && backend.order < 1) {
      throw ValidationError("config field 'backend.order' must be >= 1");
    }
  }
};

namespace detail {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  const int version = j.value("schema_version", kConfigSchemaVersion);
  if (version != kConfigSchemaVersion) {
    throw ValidationError("config field 'schema_version' unsupported: " + std::to_string(version));
  }
  ExperimentConfig c;
  detail::read_field(j, "attack", c.attack);
  detail::read_field(j, "seeds", c.seeds);
  detail::read_field(j, "out", c.out);
  detail::read_field(j, "n", c.pool_size_n);
  detail::read_field(j, "templates", c.templates_per_type);
  detail::read_field(j, "workers", c.workers);
  detail::read_field(j, "batch", c.scoring_batch);
  detail::read_field(j, "log_plaintext", c.log_plaintext);
  detail::read_field(j, "m", c.mask_count_m);
  detail::read_field(j, "gamma", c.gamma);
  detail::read_field(j, "k", c.retrieval_k);
  detail::read_field(j, "membership_ratio", c.membership_ratio);
  detail::read_field(j, "samples", c.samples);
  detail::read_field(j, "error_rate", c.generator_error_rate);
  detail::read_field(j, "prompt_style", c.prompt_style);
  detail::read_field(j, "index", c.index_kind);
  detail::read_field(j, "dataset", c.mia_dataset);
  detail::read_field(j, "poison_ratio", c.poison_ratio);
  detail::read_field(j, "trigger", c.trigger);
  detail::read_field(j, "trigger_target", c.trigger_target);
  detail::read_field(j, "trigger_position", c.trigger_position);
  detail::read_field(j, "probes", c.probe_count);
  detail::read_field(j, "users", c.aia_users);
  if (j.contains("budget")) {
    const auto& b = j.at("budget");
    detail::read_field(b, "max_depth", c.budget.max_depth);
    detail::read_field(b, "max_nodes", c.budget.max_nodes);
    detail::read_field(b, "top_k", c.budget.top_k_per_node);
    detail::read_field(b, "results", c.budget.result_count);
  }
  if (j.contains("backend")) {
    const auto& b = j.at("backend");
    detail::read_field(b, "kind", c.backend.kind);
    detail::read_field(b, "order", c.backend.order);
    detail::read_field(b, "mock", c.backend.mock);
    detail::read_field(b, "fixed_text", c.backend.fixed_text);
    detail::read_field(b, "host", c.backend.endpoint_host);
    detail::read_field(b, "port", c.backend.endpoint_port);
    detail::read_field(b, "timeout_ms", c.backend.timeout_ms);
    detail::read_field(b, "retries", c.backend.retries);
  }
  if (j.contains("corpus")) {
    const auto& b = j.at("corpus");
    detail::read_field(b, "docs", c.corpus.docs);
    detail::read_field(b, "words_min", c.corpus.words_min);
    detail::read_field(b, "words_max", c.corpus.words_max);
    detail::read_field(b, "phone_decoy_rate", c.corpus.phone_decoy_rate);
    detail::read_field(b, "canary_types", c.corpus.canary_types);
    detail::read_field(b, "brackets", c.corpus.brackets);
    detail::read_field(b, "canaries_per_bracket", c.corpus.canaries_per_bracket);
    detail::read_field(b, "load", c.corpus.load_path);
    if (b.contains("plant")) {
      for (const auto& p : b.at("plant")) {
        ExplicitPlant plant;
        plant.type = p.at("type").get<std::string>();
        plant.value = p.at("value").get<std::string>();
        plant.bracket = p.value("bracket", 1);
        pii_type_from_name(plant.type);
        c.corpus.plant.push_back(std::move(plant));
      }
    }
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

// Exactly one varying factor per grid.
struct FactorGrid {
  ExperimentConfig base;
  std::string factor;
  std::vector<nlohmann::json> levels;
};

}  // namespace leakbench

#endif  // LEAKBENCH_CONFIG_HPP
