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

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "leakbench/experiment.hpp"

namespace {

using namespace leakbench;

// Exit codes: 0 success, 1 validation, 2 backend failure, 3 partial grid.
constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kBackend = 2;
constexpr int kPartialGrid = 3;

struct GlobalOptions {
  std::string config_path;
  std::string out;
  std::string backend_kind;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool log_plaintext = false;
};

ExperimentConfig effective_config(const GlobalOptions& opts, const std::string& attack) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
  if (!attack.empty()) cfg.attack = attack;
  if (opts.seed_set) cfg.seeds = {opts.seed};
  if (!opts.out.empty()) cfg.out = opts.out;
  if (!opts.backend_kind.empty()) cfg.backend.kind = opts.backend_kind;
  if (opts.log_plaintext) cfg.log_plaintext = true;
  cfg.validate();
  return cfg;
}

int run_single_attack(const GlobalOptions& opts, const std::string& attack) {
  const auto cfg = effective_config(opts, attack);
  const std::string out = cfg.out.empty() ? attack + "-report" : cfg.out;

  const bool is_dea = cfg.attack.rfind("dea", 0) == 0;
  const bool is_mia = cfg.attack == "s2mia" || cfg.attack == "mbmia";
  ProbeLogger logger(is_dea ? out + ".probes.jsonl" : "", cfg.seeds.front(), cfg.log_plaintext);
  MiaSampleLogger sample_log(is_mia ? out + ".samples.jsonl" : "");
  auto rows = run_experiment(cfg, out + ".rows.jsonl", &logger, "baseline", "baseline",
                             &sample_log);
  emit_csv(rows, out + ".csv");

  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (r.failed) ++failed;
  }
  std::cout << "wrote " << rows.size() << " row(s) to " << out << ".csv\n";
  if (cfg.attack == "aia") {
    // Score report: one row per (model, attribute, k).
    const std::string model = cfg.backend.kind == "http" ? "http" : "rule-mock";
    std::ofstream attr_csv(out + ".attributes.csv");
    attr_csv << "model,attribute,k,accuracy\n";
    for (const auto& row : rows) {
      for (const auto& attr : aia_attributes()) {
        for (int k : {1, 3}) {
          const auto key = "top" + std::to_string(k) + "_" + attr;
          if (auto v = row.metrics.at(key)) {
            attr_csv << model << "," << attr << "," << k << "," << format_metric(v) << "\n";
          }
        }
      }
    }
  }
  return failed == 0 ? kOk : kBackend;
}

int run_corpus_gen(const GlobalOptions& opts) {
  auto cfg = effective_config(opts, "dea-exposure");
  const std::string out = cfg.out.empty() ? "corpus.jsonl" : cfg.out;
  const auto canaries = make_canaries(cfg.corpus, cfg.seeds.front());
  const Corpus corpus = plant_and_synthesize(cfg, canaries, cfg.seeds.front());
  save_corpus(corpus, out);
  std::cout << "wrote " << corpus.size() << " documents to " << out << "\n";
  if (cfg.log_plaintext) {
    for (const auto& c : canaries) {
      std::cout << pii_type_name(c.type) << " x" << c.bracket << ": " << c.value << "\n";
    }
  }
  return kOk;
}

int run_grid_command(const GlobalOptions& opts, const std::string& factor_arg,
                     const std::string& levels_arg) {
  if (opts.config_path.empty()) throw ValidationError("grid requires --config");
  std::ifstream in(opts.config_path);
  if (!in) throw ValidationError("cannot open config: " + opts.config_path);
  nlohmann::json j = nlohmann::json::parse(in);

  FactorGrid grid;
  grid.base = config_from_json(j);
  if (opts.seed_set) grid.base.seeds = {opts.seed};
  if (j.contains("grid")) {
    grid.factor = j.at("grid").at("factor").get<std::string>();
    for (const auto& level : j.at("grid").at("levels")) grid.levels.push_back(level);
  }
  if (!factor_arg.empty()) grid.factor = factor_arg;
  if (!levels_arg.empty()) {
    grid.levels.clear();
    for (const auto& level : nlohmann::json::parse(levels_arg)) grid.levels.push_back(level);
  }
  if (grid.factor.empty()) throw ValidationError("grid requires a factor (config grid.factor or --factor)");

  const std::string out = !opts.out.empty() ? opts.out
                          : !grid.base.out.empty() ? grid.base.out
                                                   : "grid-report";
  auto outcome = run_grid(grid, out + ".rows.jsonl");
  emit_csv(outcome.rows, out + ".csv");
  std::cout << "wrote " << outcome.rows.size() << " row(s) to " << out << ".csv\n";
  if (outcome.failed_cells > 0) {
    std::cerr << outcome.failed_cells << " cell(s) failed\n";
    return kPartialGrid;
  }
  return kOk;
}

int run_report(const GlobalOptions& opts, const std::string& rows_path,
               const std::string& format) {
  auto rows = load_jsonl(rows_path);
  const std::string out = opts.out.empty() ? "report." + format : opts.out;
  emit_report(rows, format, out);
  std::cout << "wrote " << rows.size() << " row(s) to " << out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leakbench: privacy-attack evaluation toolkit for autoregressive language models"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags are accepted after the subcommand

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "experiment config file (JSON)");
  app.add_option("--out", opts.out, "output path stem");
  app.add_option("--backend", opts.backend_kind, "backend kind override");
  auto* seed_opt = app.add_option("--seed", opts.seed, "master seed override");
  app.add_flag("--log-plaintext", opts.log_plaintext,
               "log secret values in plaintext (test corpora only)");

  auto* corpus_gen = app.add_subcommand("corpus-gen", "synthesize a planted corpus");
  auto* dea_score = app.add_subcommand("dea-score", "exposure measurement over planted canaries");
  auto* dea_extract = app.add_subcommand("dea-extract", "best-first extraction of high-exposure canaries");
  auto* mia_s2 = app.add_subcommand("mia-s2", "similarity-based membership inference");
  auto* mia_mask = app.add_subcommand("mia-mask", "mask-based membership inference");
  auto* backdoor = app.add_subcommand("backdoor", "data-poisoning backdoor evaluation");
  auto* aia = app.add_subcommand("aia", "attribute-inference scoring harness");
  auto* grid = app.add_subcommand("grid", "run a one-factor ablation grid");
  std::string factor_arg, levels_arg;
  grid->add_option("--factor", factor_arg, "factor to vary (overrides config)");
  grid->add_option("--levels", levels_arg, "levels as a JSON array (overrides config)");
  auto* report = app.add_subcommand("report", "re-emit a report from saved rows");
  std::string rows_path, format = "csv";
  report->add_option("rows", rows_path, "rows JSONL file")->required();
  report->add_option("--format", format, "csv or jsonl");

  try {
    app.parse(argc, argv);
    opts.seed_set = seed_opt->count() > 0;

    if (corpus_gen->parsed()) return run_corpus_gen(opts);
    if (dea_score->parsed()) return run_single_attack(opts, "dea-exposure");
    if (dea_extract->parsed()) return run_single_attack(opts, "dea-extract");
    if (mia_s2->parsed()) return run_single_attack(opts, "s2mia");
    if (mia_mask->parsed()) return run_single_attack(opts, "mbmia");
    if (backdoor->parsed()) return run_single_attack(opts, "backdoor");
    if (aia->parsed()) return run_single_attack(opts, "aia");
    if (grid->parsed()) return run_grid_command(opts, factor_arg, levels_arg);
    if (report->parsed()) return run_report(opts, rows_path, format);
    return kValidation;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const leakbench::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const leakbench::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
}
