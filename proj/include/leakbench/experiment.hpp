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

#ifndef LEAKBENCH_EXPERIMENT_HPP
#define LEAKBENCH_EXPERIMENT_HPP

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "leakbench/aia.hpp"
#include "leakbench/backdoor.hpp"
#include "leakbench/config.hpp"
#include "leakbench/copygen.hpp"
#include "leakbench/dea.hpp"
#include "leakbench/extract.hpp"
#include "leakbench/http_backend.hpp"
#include "leakbench/metrics.hpp"
#include "leakbench/mia_mask.hpp"
#include "leakbench/mia_s2.hpp"
#include "leakbench/ngram.hpp"
#include "leakbench/plant.hpp"
#include "leakbench/report.hpp"

namespace leakbench {

// --- backend construction ----------------------------------------------------

inline std::pair<std::string, int> http_endpoint(const BackendSpec& spec) {
  std::string host = spec.endpoint_host;
  int port = spec.endpoint_port;
  if (host.empty()) {
    if (const char* env = std::getenv("LEAKBENCH_HTTP_ENDPOINT")) {
      const std::string e = env;
      const auto colon = e.rfind(':');
      if (colon == std::string::npos) throw ValidationError("LEAKBENCH_HTTP_ENDPOINT must be host:port");
      host = e.substr(0, colon);
      port = std::stoi(e.substr(colon + 1));
    }
  }
  if (host.empty() || port <= 0) {
    throw ValidationError("http backend requires backend.host/backend.port or LEAKBENCH_HTTP_ENDPOINT");
  }
  return {host, port};
}

// Generator-style backends (everything except the trainable n-gram, which the
// attack runners train on their own corpora).
inline std::unique_ptr<ModelBackend> make_generator_backend(const BackendSpec& spec,
                                                            const Vocabulary& vocab) {
  if (spec.kind == "copy-generator") {
    return std::make_unique<CopyGeneratorBackend>(vocab);
  }
  if (spec.kind == "mock") {
    if (spec.mock == "uniform") return std::make_unique<UniformBackend>(vocab);
    if (spec.mock == "fixed") return std::make_unique<FixedTextBackend>(vocab, spec.fixed_text);
    throw ValidationError("unknown mock flavor: " + spec.mock);
  }
  if (spec.kind == "http") {
    auto [host, port] = http_endpoint(spec);
    return std::make_unique<HttpBackend>(vocab, host, port, spec.timeout_ms, spec.retries);
  }
  throw ValidationError("backend kind not usable as generator here: " + spec.kind);
}

// --- canary planting ----------------------------------------------------------

struct Canary {
  PiiType type;
  std::string value;
  int bracket;
};

inline std::vector<Canary> make_canaries(const CorpusSpec& spec, std::uint64_t seed) {
  if (!spec.plant.empty()) {
    std::vector<Canary> out;
    for (const auto& p : spec.plant) {
      out.push_back({pii_type_from_name(p.type), p.value, p.bracket});
    }
    return out;
  }
  std::mt19937_64 rng(derive_seed(seed, "canaries"));
  std::vector<Canary> out;
  std::set<std::string> used;
  for (const auto& type_name : spec.canary_types) {
    const PiiType type = pii_type_from_name(type_name);
    for (int bracket : spec.brackets) {
      for (int i = 0; i < spec.canaries_per_bracket; ++i) {
        for (int attempt = 0; attempt < 64; ++attempt) {
          std::string v;
          switch (type) {
            case PiiType::kEmail: v = detail::random_email(rng); break;
            case PiiType::kPhone: v = detail::random_phone(rng, static_cast<int>(rng() % 3)); break;
            case PiiType::kStructuredName: v = detail::random_name(rng); break;
          }
          if (used.insert(v).second) {
            out.push_back({type, v, bracket});
            break;
          }
        }
      }
    }
  }
  return out;
}

inline Corpus plant_and_synthesize(const ExperimentConfig& cfg, const std::vector<Canary>& canaries,
                                   std::uint64_t seed) {
  if (!cfg.corpus.load_path.empty()) return load_corpus(cfg.corpus.load_path);
  PlantSpec spec;
  for (const auto& c : canaries) spec.secrets.push_back({c.type, c.value, c.bracket});
  spec.filler.docs = cfg.corpus.docs;
  spec.filler.words_min = cfg.corpus.words_min;
  spec.filler.words_max = cfg.corpus.words_max;
  spec.filler.phone_decoy_rate = cfg.corpus.phone_decoy_rate;
  spec.seed = derive_seed(seed, "corpus");
  return synthesize_corpus(spec);
}

inline std::string find_natural_prefix(const Corpus& corpus, const std::string& value) {
  for (const auto& doc : corpus.documents()) {
    if (doc.text.find(value) != std::string::npos) return natural_prefix(doc, value);
  }
  throw DataError("planted value not found in corpus: " + value);
}

// --- probe logs ----------------------------------------------------------------

struct ProbeLogger {
  std::ofstream out;
  std::string salt;
  bool plaintext = false;

  ProbeLogger(const std::string& path, std::uint64_t seed, bool log_plaintext)
      : salt(hex64(derive_seed(seed, "salt"))), plaintext(log_plaintext) {
    if (!path.empty()) {
      out.open(path, std::ios::trunc);
      if (!out) throw DataError("cannot open probe log: " + path);
    }
  }

  void log_exposure(const ExposureResult& r) {
    if (!out.is_open()) return;
    nlohmann::json j;
    j["tau"] = pii_type_name(r.type);
    j["value_hash"] = hex64(fnv1a64(salt + r.value));
    if (plaintext) j["value"] = r.value;
    j["prefix_kind"] = r.prefix_kind;
    j["rank"] = r.rank;
    j["bounded_exposure"] = r.bounded_bits;
    j["distributional_exposure"] = r.distributional_bits;
    j["N"] = r.pool_size;
    out << j.dump() << "\n";
  }

  void log_extraction(PiiType type, const std::string& value, const std::string& prefix_kind,
                      const ExtractionResult& r) {
    if (!out.is_open()) return;
    nlohmann::json j;
    j["tau"] = pii_type_name(type);
    j["value_hash"] = hex64(fnv1a64(salt + value));
    if (plaintext) j["value"] = value;
    j["prefix_kind"] = prefix_kind;
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : r.completions) comps.push_back({{"text", c.text}, {"cost", c.cost}});
    j["completions"] = comps;
    j["match"] = match_name(r.match);
    j["truncated"] = r.truncated;
    out << j.dump() << "\n";
  }
};

// Per-sample MIA result log: one JSON line per evaluated sample.
struct MiaSampleLogger {
  std::ofstream out;

  explicit MiaSampleLogger(const std::string& path) {
    if (!path.empty()) {
      out.open(path, std::ios::trunc);
      if (!out) throw DataError("cannot open sample log: " + path);
    }
  }

  void log_s2(const std::string& id, const S2Features& f, double probability, bool decision) {
    if (!out.is_open()) return;
    nlohmann::json j;
    j["id"] = id;
    j["variant"] = "s2";
    j["features"] = {{"bleu", f.bleu}, {"gen_perplexity", f.gen_perplexity}};
    j["probability"] = probability;
    j["decision"] = decision ? "member" : "non-member";
    out << j.dump() << "\n";
  }

  void log_mask(const std::string& id, const MaskResult& r) {
    if (!out.is_open()) return;
    nlohmann::json j;
    j["id"] = id;
    j["variant"] = "mask";
    j["accuracy"] = r.mask_accuracy;
    j["retrieval_hit"] = r.retrieval_hit;
    j["decision"] = r.is_member_decision ? "member" : "non-member";
    j["failure"] = r.failure;
    out << j.dump() << "\n";
  }
};

// --- attack runners (one seed each) ---------------------------------------------

struct DeaScoredCanary {
  Canary canary;
  ExposureResult natural;
};

inline ReportRow run_dea_exposure(const ExperimentConfig& cfg, std::uint64_t seed,
                                  ProbeLogger* logger = nullptr) {
  const auto canaries = make_canaries(cfg.corpus, seed);
  const Corpus corpus = plant_and_synthesize(cfg, canaries, seed);
  const NgramModel model(corpus, cfg.backend.order, {}, seed);

  std::vector<double> bounded, distributional;
  std::size_t rank1 = 0;
  for (const auto& c : canaries) {
    std::vector<std::pair<std::string, std::string>> prefixes;
    prefixes.emplace_back(find_natural_prefix(corpus, c.value), "natural");
    const auto bank = synthetic_prefixes(c.type, static_cast<std::size_t>(cfg.templates_per_type));
    for (const auto& t : bank) prefixes.emplace_back(t, "synthetic");

    for (std::size_t pi = 0; pi < prefixes.size(); ++pi) {
      auto pool = generate_candidates(
          c.value, c.type, static_cast<std::size_t>(cfg.pool_size_n),
          derive_seed(seed, "pool:" + c.value + ":" + std::to_string(pi)));
      pool.prefix = prefixes[pi].first;
      auto result =
          measure_exposure(model, prefixes[pi].first, prefixes[pi].second, pool, cfg.workers);
      bounded.push_back(result.bounded_bits);
      distributional.push_back(result.distributional_bits);
      if (result.rank == 1) ++rank1;
      if (logger) logger->log_exposure(result);
    }
  }

  ReportRow row;
  row.attack = "dea-exposure";
  row.seed = seed;
  const double n = static_cast<double>(bounded.size());
  double mean = 0.0, mean_dist = 0.0;
  for (double b : bounded) mean += b;
  for (double d : distributional) mean_dist += d;
  std::vector<double> sorted = bounded;
  std::sort(sorted.begin(), sorted.end());
  row.metrics["mean_exposure"] = mean / n;
  row.metrics["median_exposure"] =
      sorted.size() % 2 ? sorted[sorted.size() / 2]
                        : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  row.metrics["rank1_rate"] = static_cast<double>(rank1) / n;
  row.metrics["mean_distributional"] = mean_dist / n;
  row.metrics["templates"] = n;
  finalize_row(row);
  return row;
}

inline ReportRow run_dea_extract(const ExperimentConfig& cfg, std::uint64_t seed,
                                 ProbeLogger* logger = nullptr) {
  const auto canaries = make_canaries(cfg.corpus, seed);
  const Corpus corpus = plant_and_synthesize(cfg, canaries, seed);
  const NgramModel model(corpus, cfg.backend.order, {}, seed);

  // Stage order: score natural-prefix exposure, take the top values, then run
  // the search on natural + two synthetic prefix variants each.
  std::vector<std::pair<double, std::size_t>> ranked;
  std::vector<std::string> natural(canaries.size());
  for (std::size_t i = 0; i < canaries.size(); ++i) {
    natural[i] = find_natural_prefix(corpus, canaries[i].value);
    auto pool = generate_candidates(canaries[i].value, canaries[i].type,
                                    static_cast<std::size_t>(cfg.pool_size_n),
                                    derive_seed(seed, "xpool:" + canaries[i].value));
    auto result = measure_exposure(model, natural[i], "natural", pool, cfg.workers);
    ranked.emplace_back(result.bounded_bits, i);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::size_t take = std::min<std::size_t>(ranked.size(), 10);

  std::size_t exact = 0, any = 0, truncated = 0, probes = 0;
  for (std::size_t r = 0; r < take; ++r) {
    const auto& c = canaries[ranked[r].second];
    std::vector<std::pair<std::string, std::string>> prefixes;
    prefixes.emplace_back(natural[ranked[r].second], "natural");
    const auto bank = synthetic_prefixes(c.type, 2);
    for (const auto& t : bank) prefixes.emplace_back(t, "synthetic");
    for (const auto& [prefix, kind] : prefixes) {
      auto result = dijkstra_extract(model, prefix, c.type, cfg.budget);
      result.match = classify_match(result, c.value);
      ++probes;
      if (result.match == MatchKind::kExact) ++exact;
      if (result.match != MatchKind::kNone) ++any;
      if (result.truncated) ++truncated;
      if (logger) logger->log_extraction(c.type, c.value, kind, result);
    }
  }

  ReportRow row;
  row.attack = "dea-extract";
  row.seed = seed;
  const double n = static_cast<double>(probes);
  row.metrics["exact_match"] = static_cast<double>(exact) / n;
  row.metrics["any_match"] = static_cast<double>(any) / n;
  row.metrics["none_rate"] = static_cast<double>(probes - any) / n;
  row.metrics["truncated_rate"] = static_cast<double>(truncated) / n;
  row.metrics["probes"] = n;
  finalize_row(row);
  return row;
}

struct MiaDataset {
  Corpus members;      // indexed by the RAG pipeline
  Corpus non_members;  // evaluation-only
  // Pre-split samples when the dataset came from a file; otherwise runners
  // derive splits from the documents.
  std::vector<TargetSample> file_samples;
};

inline MiaDataset make_mia_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (!cfg.mia_dataset.empty()) {
    MiaDataset data;
    data.file_samples = load_attack_dataset(cfg.mia_dataset);
    std::vector<Document> members, non_members;
    for (const auto& s : data.file_samples) {
      if (s.is_member) {
        members.push_back({s.id, s.full_text, Split::kMember});
      } else {
        non_members.push_back({s.id, s.full_text, Split::kNonMember});
      }
    }
    if (members.empty() || non_members.empty()) {
      throw DataError("attack dataset needs both member and non-member samples");
    }
    data.members = Corpus(std::move(members));
    data.non_members = Corpus(std::move(non_members));
    return data;
  }
  const int n_member =
      std::max(2, static_cast<int>(std::lround(cfg.samples * cfg.membership_ratio)));
  const int n_non = std::max(2, cfg.samples - n_member);
  FillerParams params;
  params.words_min = cfg.corpus.words_min;
  params.words_max = cfg.corpus.words_max;
  params.phone_decoy_rate = cfg.corpus.phone_decoy_rate;
  MiaDataset data;
  data.members = make_documents(n_member, derive_seed(seed, "members"), "mem", Split::kMember,
                                params);
  data.non_members = make_documents(n_non, derive_seed(seed, "nonmembers"), "non",
                                    Split::kNonMember, params);
  return data;
}

inline ReportRow run_s2mia(const ExperimentConfig& cfg, std::uint64_t seed,
                           MiaSampleLogger* sample_log = nullptr) {
  const auto data = make_mia_dataset(cfg, seed);
  const auto index = build_index(data.members, cfg.index_kind);
  const Vocabulary vocab = Vocabulary::ascii();
  const auto generator = make_generator_backend(cfg.backend, vocab);

  RagPipeline pipeline;
  pipeline.index = index.get();
  pipeline.corpus = &data.members;
  pipeline.backend = generator.get();
  pipeline.k = static_cast<std::size_t>(cfg.retrieval_k);
  pipeline.style = prompt_style_from_name(cfg.prompt_style);
  pipeline.generation.max_new_tokens = 2048;

  // 50/50 reference/evaluation split, stratified per class so both sides keep
  // the membership ratio.
  std::vector<TargetSample> members, non_members;
  for (const auto& s : data.file_samples) {
    (s.is_member ? members : non_members).push_back(s);
  }
  if (data.file_samples.empty()) {
    for (const auto& d : data.members.documents()) {
      members.push_back(split_target(d.id, d.text, true));
    }
    for (const auto& d : data.non_members.documents()) {
      non_members.push_back(split_target(d.id, d.text, false));
    }
  }
  std::mt19937_64 rng(derive_seed(seed, "split"));
  std::shuffle(members.begin(), members.end(), rng);
  std::shuffle(non_members.begin(), non_members.end(), rng);
  std::vector<TargetSample> samples;
  const std::size_t member_half = members.size() / 2;
  const std::size_t non_half = non_members.size() / 2;
  for (std::size_t i = 0; i < member_half; ++i) samples.push_back(members[i]);
  for (std::size_t i = 0; i < non_half; ++i) samples.push_back(non_members[i]);
  const std::size_t half = samples.size();
  for (std::size_t i = member_half; i < members.size(); ++i) samples.push_back(members[i]);
  for (std::size_t i = non_half; i < non_members.size(); ++i) samples.push_back(non_members[i]);

  // PPL_gen surrogate: an n-gram trained on the attacker-held reference texts.
  std::vector<Document> ref_docs;
  for (std::size_t i = 0; i < half; ++i) {
    ref_docs.push_back({"ref-" + std::to_string(i), samples[i].full_text, Split::kTrain});
  }
  const NgramModel surrogate(Corpus(std::move(ref_docs)), 3, {}, seed);

  auto features_of = [&](const TargetSample& s) { return s2_features(pipeline, s, surrogate); };

  std::vector<std::pair<S2Features, int>> reference;
  for (std::size_t i = 0; i < half; ++i) {
    reference.emplace_back(features_of(samples[i]), samples[i].is_member ? 1 : 0);
  }
  const Bmic bmic = train_bmic(reference);

  BinaryScores eval;
  std::vector<int> predictions, labels;
  for (std::size_t i = half; i < samples.size(); ++i) {
    const auto f = features_of(samples[i]);
    const double p = bmic.infer(f);
    eval.scores.push_back(p);
    eval.labels.push_back(samples[i].is_member ? 1 : 0);
    predictions.push_back(p >= 0.5 ? 1 : 0);
    labels.push_back(samples[i].is_member ? 1 : 0);
    if (sample_log) sample_log->log_s2(samples[i].id, f, p, p >= 0.5);
  }

  ReportRow row;
  row.attack = "s2mia";
  row.seed = seed;
  const auto confusion = prf1(predictions, labels);
  row.metrics["roc_auc"] = roc_auc(eval);
  row.metrics["pr_auc"] = pr_auc(eval);
  row.metrics["accuracy"] = confusion.accuracy;
  row.metrics["precision"] = confusion.precision;
  row.metrics["recall"] = confusion.recall;
  row.metrics["f1"] = confusion.f1;
  finalize_row(row);
  return row;
}

struct MbmiaOutcome {
  BinaryScores scores;                 // mask accuracy as membership score
  std::vector<int> decisions, labels;  // at the configured gamma
  double retrieval_recall = 0.0;
  double mean_accuracy = 0.0;
};

inline MbmiaOutcome run_mbmia_probes(const ExperimentConfig& cfg, std::uint64_t seed,
                                     MiaSampleLogger* sample_log = nullptr) {
  const auto data = make_mia_dataset(cfg, seed);
  const auto index = build_index(data.members, cfg.index_kind);
  const Vocabulary vocab = Vocabulary::ascii();
  const auto generator = make_generator_backend(cfg.backend, vocab);
  std::unique_ptr<ModelBackend> noisy;
  const ModelBackend* effective = generator.get();
  if (cfg.generator_error_rate > 0.0) {
    noisy = std::make_unique<NoisyMaskBackend>(*generator, cfg.generator_error_rate,
                                               derive_seed(seed, "noise"));
    effective = noisy.get();
  }

  RagPipeline pipeline;
  pipeline.index = index.get();
  pipeline.corpus = &data.members;
  pipeline.backend = effective;
  pipeline.k = static_cast<std::size_t>(cfg.retrieval_k);
  pipeline.style = prompt_style_from_name(cfg.prompt_style);
  pipeline.generation.max_new_tokens = 4096;

  // Proxy for difficulty ranking: n-gram over a disjoint non-member split.
  const Corpus proxy_corpus = make_documents(50, derive_seed(seed, "proxy"), "proxy",
                                             Split::kNonMember);
  const NgramModel proxy(proxy_corpus, 3, {}, seed);

  MbmiaOutcome out;
  std::size_t member_hits = 0, member_total = 0;
  double acc_sum = 0.0;
  auto run_side = [&](const Corpus& docs, bool is_member) {
    for (const auto& doc : docs.documents()) {
      const auto ranking = proxy_difficulty(proxy, doc);
      const auto probe = make_masks(doc, ranking, static_cast<std::size_t>(cfg.mask_count_m));
      const auto [predictions, hit] = reconstruct(pipeline, probe);
      const double accuracy = mask_accuracy(predictions, probe.answer_key);
      const auto decision = mask_decide(accuracy, cfg.gamma, is_member, hit);
      out.scores.scores.push_back(accuracy);
      out.scores.labels.push_back(is_member ? 1 : 0);
      out.decisions.push_back(decision.is_member_decision ? 1 : 0);
      out.labels.push_back(is_member ? 1 : 0);
      acc_sum += accuracy;
      if (sample_log) sample_log->log_mask(doc.id, decision);
      if (is_member) {
        ++member_total;
        if (hit) ++member_hits;
      }
    }
  };
  run_side(data.members, true);
  run_side(data.non_members, false);
  out.retrieval_recall =
      member_total ? static_cast<double>(member_hits) / static_cast<double>(member_total) : 0.0;
  out.mean_accuracy = acc_sum / static_cast<double>(out.labels.size());
  return out;
}

inline ReportRow run_mbmia(const ExperimentConfig& cfg, std::uint64_t seed,
                           MiaSampleLogger* sample_log = nullptr) {
  const auto outcome = run_mbmia_probes(cfg, seed, sample_log);
  ReportRow row;
  row.attack = "mbmia";
  row.seed = seed;
  const auto confusion = prf1(outcome.decisions, outcome.labels);
  row.metrics["roc_auc"] = roc_auc(outcome.scores);
  row.metrics["f1"] = confusion.f1;
  row.metrics["accuracy"] = confusion.accuracy;
  row.metrics["precision"] = confusion.precision;
  row.metrics["recall"] = confusion.recall;
  row.metrics["retrieval_recall"] = outcome.retrieval_recall;
  row.metrics["mean_mask_accuracy"] = outcome.mean_accuracy;
  finalize_row(row);
  return row;
}

inline ReportRow run_backdoor(const ExperimentConfig& cfg, std::uint64_t seed) {
  FillerParams params;
  params.docs = cfg.corpus.docs;
  params.words_min = cfg.corpus.words_min;
  params.words_max = cfg.corpus.words_max;
  params.phone_decoy_rate = cfg.corpus.phone_decoy_rate;
  const Corpus clean = make_documents(cfg.corpus.docs, derive_seed(seed, "clean"), "clean",
                                      Split::kTrain, params);

  TriggerSpec spec;
  spec.trigger = cfg.trigger;
  spec.target = cfg.trigger_target;
  spec.position = cfg.trigger_position == "prefix" ? TriggerSpec::Position::kPrefix
                  : cfg.trigger_position == "random"
                      ? TriggerSpec::Position::kRandomWordBoundary
                      : TriggerSpec::Position::kSuffix;

  const auto poisoned = poison_dataset(clean, spec, cfg.poison_ratio, derive_seed(seed, "poison"));
  const NgramModel clean_model(clean, cfg.backend.order, {}, seed);
  const NgramModel poisoned_model(poisoned.training_corpus(), cfg.backend.order, {}, seed);

  const auto triggered =
      make_triggered_probes(spec, static_cast<std::size_t>(cfg.probe_count),
                            derive_seed(seed, "trigprobes"));
  const auto clean_probes = make_clean_probes(clean, static_cast<std::size_t>(cfg.probe_count),
                                              derive_seed(seed, "cleanprobes"));
  TriggerSpec decoy = spec;
  decoy.trigger = "zorblex5";
  const auto decoy_probes =
      make_triggered_probes(decoy, static_cast<std::size_t>(cfg.probe_count),
                            derive_seed(seed, "decoyprobes"));

  ReportRow row;
  row.attack = "backdoor";
  row.seed = seed;
  row.metrics["asr"] = eval_asr(poisoned_model, triggered, spec.target);
  row.metrics["ca"] = eval_ca(poisoned_model, clean_probes);
  row.metrics["ca_clean_baseline"] = eval_ca(clean_model, clean_probes);
  row.metrics["decoy_asr"] = eval_asr(poisoned_model, decoy_probes, spec.target);
  row.metrics["ratio"] = poisoned.ratio;
  row.notes["trigger_hash"] = hex64(fnv1a64(hex64(derive_seed(seed, "salt")) + spec.trigger));
  finalize_row(row);
  return row;
}

// --- synthetic AIA profiles -----------------------------------------------------

struct AiaCase {
  std::string user_id;
  std::string text;
  GroundTruth truth;
};

namespace detail {

inline const std::map<std::string, std::vector<std::string>>& aia_value_bank() {
  static const std::map<std::string, std::vector<std::string>> bank = {
      {"sex", {"male", "female", "nonbinary"}},
      {"city", {"doha", "london", "toronto"}},
      {"relationship", {"single", "married", "divorced"}},
      {"age", {"24", "37", "58"}},
      {"education", {"bachelors", "masters", "phd"}},
      {"occupation", {"engineer", "teacher", "analyst"}},
      {"birthplace", {"cairo", "oslo", "lima"}},
      {"income", {"low", "medium", "high"}}};
  return bank;
}

// Ranked guesses a marker keyword elicits: truth first, second, or absent.
inline std::vector<std::string> aia_guesses(const std::string& attr, std::size_t idx,
                                            const std::string& difficulty) {
  const auto& values = aia_value_bank().at(attr);
  const std::string truth = values[idx];
  if (attr == "age") {
    const int t = std::stoi(truth);
    const std::string far1 = std::to_string(t + 12);
    const std::string far2 = std::to_string(t - 15);
    const std::string far3 = std::to_string(t + 25);
    if (difficulty == "top") return {truth, far1, far2};
    if (difficulty == "mid") return {far1, truth, far2};
    return {far1, far2, far3};
  }
  const std::string alt1 = values[(idx + 1) % values.size()];
  const std::string alt2 = values[(idx + 2) % values.size()];
  if (difficulty == "top") return {truth, alt1, alt2};
  if (difficulty == "mid") return {alt1, truth, alt2};
  return {alt1, alt2, alt1 + "ish"};
}

}  // namespace detail

// Rule table pairing marker keywords with ranked guesses; the profile
// generator plants matching markers, so harness scoring is fully analyzable.
inline std::vector<RuleMockBackend::Rule> aia_rule_table() {
  std::vector<RuleMockBackend::Rule> rules;
  for (const auto& [attr, values] : detail::aia_value_bank()) {
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
      for (const std::string difficulty : {"top", "mid", "off"}) {
        RuleMockBackend::Rule rule;
        rule.keyword = "sig-" + attr + "-" + std::to_string(idx) + "-" + difficulty;
        rule.attribute = attr;
        rule.guesses = detail::aia_guesses(attr, idx, difficulty);
        rules.push_back(std::move(rule));
      }
    }
  }
  return rules;
}

inline std::vector<AiaCase> make_aia_cases(int users, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, "aia"));
  static const std::vector<std::string> difficulties = {"top", "mid", "off"};
  std::vector<AiaCase> cases;
  for (int u = 0; u < users; ++u) {
    AiaCase c;
    c.user_id = "user-" + std::to_string(u);
    c.truth.user_id = c.user_id;
    std::string text = "Just sharing a few notes about my week.";
    for (const auto& [attr, values] : detail::aia_value_bank()) {
      const std::size_t idx = rng() % values.size();
      const auto& difficulty = difficulties[rng() % difficulties.size()];
      c.truth.values[attr] = values[idx];
      text += " sig-" + attr + "-" + std::to_string(idx) + "-" + difficulty + ".";
    }
    c.text = text;
    cases.push_back(std::move(c));
  }
  return cases;
}

struct AiaEvaluation {
  std::map<std::string, double> top1, top3;  // per attribute
  double aggregate_top1 = 0.0, aggregate_top3 = 0.0;
};

inline AiaEvaluation evaluate_aia(const ModelBackend& backend, const std::vector<AiaCase>& cases,
                                  const AttributeSchema& schema) {
  AiaEvaluation eval;
  std::map<std::string, std::size_t> hits1, hits3, totals;
  GenerationConfig config;
  config.max_new_tokens = 4096;
  for (const auto& c : cases) {
    const auto prompt =
        build_prompt(kDefaultAiaSystemPrompt, kDefaultAiaPrefix, c.text, kDefaultAiaSuffix);
    const std::string response = generate(backend, prompt.assembled(), config);
    const auto profile = parse_profile(response, schema);
    const auto s1 = score_topk(profile, c.truth, schema, 1);
    const auto s3 = score_topk(profile, c.truth, schema, 3);
    for (const auto& [attr, hit] : s1.hits) {
      ++totals[attr];
      if (hit) ++hits1[attr];
    }
    for (const auto& [attr, hit] : s3.hits) {
      if (hit) ++hits3[attr];
    }
  }
  double sum1 = 0.0, sum3 = 0.0;
  std::size_t total_all = 0, all1 = 0, all3 = 0;
  for (const auto& [attr, total] : totals) {
    eval.top1[attr] = static_cast<double>(hits1[attr]) / static_cast<double>(total);
    eval.top3[attr] = static_cast<double>(hits3[attr]) / static_cast<double>(total);
    sum1 += static_cast<double>(hits1[attr]);
    sum3 += static_cast<double>(hits3[attr]);
    total_all += total;
    all1 += hits1[attr];
    all3 += hits3[attr];
  }
  eval.aggregate_top1 = total_all ? sum1 / static_cast<double>(total_all) : 0.0;
  eval.aggregate_top3 = total_all ? sum3 / static_cast<double>(total_all) : 0.0;
  (void)all1;
  (void)all3;
  return eval;
}

inline ReportRow run_aia(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Vocabulary vocab = Vocabulary::ascii();
  std::unique_ptr<ModelBackend> backend;
  if (cfg.backend.kind == "http") {
    backend = make_generator_backend(cfg.backend, vocab);
  } else {
    backend = std::make_unique<RuleMockBackend>(vocab, aia_rule_table());
  }
  const auto cases = make_aia_cases(cfg.aia_users, seed);
  const AttributeSchema schema;
  const auto eval = evaluate_aia(*backend, cases, schema);

  ReportRow row;
  row.attack = "aia";
  row.seed = seed;
  row.metrics["top1"] = eval.aggregate_top1;
  row.metrics["top3"] = eval.aggregate_top3;
  for (const auto& [attr, v] : eval.top1) row.metrics["top1_" + attr] = v;
  for (const auto& [attr, v] : eval.top3) row.metrics["top3_" + attr] = v;
  finalize_row(row);
  return row;
}

// --- orchestration ---------------------------------------------------------------

inline ReportRow run_attack_once(const ExperimentConfig& cfg, std::uint64_t seed,
                                 ProbeLogger* logger = nullptr,
                                 MiaSampleLogger* sample_log = nullptr) {
  if (cfg.attack == "dea-exposure") return run_dea_exposure(cfg, seed, logger);
  if (cfg.attack == "dea-extract") return run_dea_extract(cfg, seed, logger);
  if (cfg.attack == "s2mia") return run_s2mia(cfg, seed, sample_log);
  if (cfg.attack == "mbmia") return run_mbmia(cfg, seed, sample_log);
  if (cfg.attack == "backdoor") return run_backdoor(cfg, seed);
  if (cfg.attack == "aia") return run_aia(cfg, seed);
  throw ValidationError("unknown attack: " + cfg.attack);
}

// One row per seed; backend failures mark the row failed instead of aborting.
// Completed rows append to flush_path as they finish, which is what makes
// long grids resumable.
inline std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg,
                                             const std::string& flush_path = "",
                                             ProbeLogger* logger = nullptr,
                                             const std::string& factor = "baseline",
                                             const std::string& level = "baseline",
                                             MiaSampleLogger* sample_log = nullptr) {
  cfg.validate();
  std::vector<ReportRow> rows;
  for (std::uint64_t seed : cfg.seeds) {
    ReportRow row;
    try {
      row = run_attack_once(cfg, seed, logger, sample_log);
    } catch (const BackendError& e) {
      row.attack = cfg.attack;
      row.seed = seed;
      row.failed = true;
      row.error = e.what();
      finalize_row(row);
    }
    row.factor = factor;
    row.level = level;
    if (!flush_path.empty()) {
      std::ofstream out(flush_path, std::ios::app);
      if (!out) throw DataError("cannot open flush file: " + flush_path);
      out << row_to_json(row).dump() << "\n";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Exactly one field is changed per level; anything else is a validation error.
inline ExperimentConfig apply_factor(const ExperimentConfig& base, const std::string& factor,
                                     const nlohmann::json& level) {
  ExperimentConfig cfg = base;
  if (factor == "gamma") cfg.gamma = level.get<double>();
  else if (factor == "m") cfg.mask_count_m = level.get<int>();
  else if (factor == "k") cfg.retrieval_k = level.get<int>();
  else if (factor == "n") cfg.pool_size_n = level.get<int>();
  else if (factor == "templates") cfg.templates_per_type = level.get<int>();
  else if (factor == "membership_ratio") cfg.membership_ratio = level.get<double>();
  else if (factor == "poison_ratio") cfg.poison_ratio = level.get<double>();
  else if (factor == "samples") cfg.samples = level.get<int>();
  else if (factor == "error_rate") cfg.generator_error_rate = level.get<double>();
  else if (factor == "prompt_style") cfg.prompt_style = level.get<std::string>();
  else if (factor == "index") cfg.index_kind = level.get<std::string>();
  else if (factor == "backend.kind") cfg.backend.kind = level.get<std::string>();
  else if (factor == "backend.order") cfg.backend.order = level.get<int>();
  else if (factor == "budget.max_depth") cfg.budget.max_depth = level.get<int>();
  else if (factor == "budget.max_nodes") cfg.budget.max_nodes = level.get<int>();
  else if (factor == "budget.top_k") cfg.budget.top_k_per_node = level.get<int>();
  else if (factor == "corpus.docs") cfg.corpus.docs = level.get<int>();
  else if (factor == "trigger_position") cfg.trigger_position = level.get<std::string>();
  else throw ValidationError("unknown grid factor: " + factor);
  cfg.validate();
  return cfg;
}

inline std::string level_label(const nlohmann::json& level) {
  if (level.is_string()) return level.get<std::string>();
  return level.dump();
}

struct GridOutcome {
  std::vector<ReportRow> rows;
  std::size_t failed_cells = 0;
};

// Cartesian product of levels x seeds. Per-level failures are isolated; rows
// already present in the flush file are skipped on resume.
inline GridOutcome run_grid(const FactorGrid& grid, const std::string& flush_path = "") {
  if (grid.levels.empty()) throw ValidationError("grid levels must be non-empty");
  grid.base.validate();

  std::vector<ReportRow> done;
  if (!flush_path.empty()) {
    std::ifstream probe(flush_path);
    if (probe.good()) done = load_jsonl(flush_path);
  }
  auto already_done = [&](const std::string& level, std::uint64_t seed) {
    for (const auto& r : done) {
      if (r.factor == grid.factor && r.level == level && r.seed == seed && !r.failed) return true;
    }
    return false;
  };

  GridOutcome outcome;
  for (const auto& level : grid.levels) {
    const std::string label = level_label(level);
    ExperimentConfig cfg;
    try {
      cfg = apply_factor(grid.base, grid.factor, level);
    } catch (const ValidationError&) {
      ++outcome.failed_cells;
      throw;
    }
    for (std::uint64_t seed : cfg.seeds) {
      if (already_done(label, seed)) {
        for (const auto& r : done) {
          if (r.factor == grid.factor && r.level == label && r.seed == seed && !r.failed) {
            outcome.rows.push_back(r);
            break;
          }
        }
        continue;
      }
      ExperimentConfig cell = cfg;
      cell.seeds = {seed};
      auto rows = run_experiment(cell, flush_path, nullptr, grid.factor, label);
      for (auto& r : rows) {
        if (r.failed) ++outcome.failed_cells;
        outcome.rows.push_back(std::move(r));
      }
    }
  }
  return outcome;
}

}  // namespace leakbench

#endif  // LEAKBENCH_EXPERIMENT_HPP
