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

#ifndef LEAKBENCH_MIA_S2_HPP
#define LEAKBENCH_MIA_S2_HPP

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "leakbench/dea.hpp"
#include "leakbench/metrics.hpp"
#include "leakbench/rag.hpp"

namespace leakbench {

struct TargetSample {
  std::string id;
  std::string full_text;     // x_t = query_part + holdout_part, exact partition
  std::string query_part;    // x_t^q
  std::string holdout_part;  // x_t^r
  bool is_member = false;
};

// QA-shaped text splits at the answer marker (separator whitespace stays with
// the query part so concatenation reproduces the original); free text splits
// at the midpoint word boundary.
inline TargetSample split_target(const std::string& id, const std::string& text, bool is_member) {
  if (text.empty()) throw ValidationError("split_target: empty text");
  std::size_t split_at = std::string::npos;

  if (text.rfind("Q:", 0) == 0) {
    auto a = text.find("A:");
    if (a != std::string::npos && a > 0) split_at = a;
  }
  if (split_at == std::string::npos) {
    const auto words = split_words(text);
    if (words.size() < 2) throw ValidationError("split_target: text too short to split");
    const std::size_t half = words.size() / 2;
    // Position of the word after the first half.
    std::size_t seen = 0, i = 0;
    while (i < text.size() && seen < half) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      ++seen;
    }
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    split_at = i;
  }
  if (split_at == 0 || split_at >= text.size()) {
    throw ValidationError("split_target: a part would be empty");
  }
  return {id, text, text.substr(0, split_at), text.substr(split_at), is_member};
}

// Attack dataset file: JSON lines, either {id, text, is_member} (split at the
// midpoint) or {id, question, answer, is_member} (the question serves as
// x_t^q and the answer as x_t^r).
inline std::vector<TargetSample> load_attack_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open attack dataset: " + path);
  std::vector<TargetSample> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line);
    const std::string id = j.at("id").get<std::string>();
    const bool is_member = j.at("is_member").get<bool>();
    if (j.contains("question")) {
      const std::string q = j.at("question").get<std::string>();
      const std::string a = j.at("answer").get<std::string>();
      if (q.empty() || a.empty()) throw DataError("attack dataset: empty question/answer in " + id);
      samples.push_back({id, q + a, q, a, is_member});
    } else {
      samples.push_back(split_target(id, j.at("text").get<std::string>(), is_member));
    }
  }
  return samples;
}

struct S2Features {
  double bleu = 0.0;            // 0..100
  double gen_perplexity = 0.0;  // nats per token under the scoring backend
  bool empty_generation = false;
};

// Queries the RAG system with x_t^q and extracts the two membership features:
// BLEU(x_t, response) and the response's log-perplexity under the scoring
// backend (a labeled surrogate when the generator exposes no usable
// log-probabilities).
inline S2Features s2_features(const RagPipeline& pipeline, const TargetSample& sample,
                              const ModelBackend& scoring_backend) {
  auto answer = rag_answer(pipeline, sample.query_part);
  S2Features f;
  if (trim(answer.response).empty()) {
    f.empty_generation = true;
    return f;
  }
  f.bleu = bleu(answer.response, sample.full_text);
  f.gen_perplexity = mean_token_nll(scoring_backend, sample.query_part, answer.response);
  return f;
}

// Two-feature logistic regression trained by full-batch gradient descent:
// fixed step 0.1, L2 penalty 1e-4 on the weights, capped at 5000 epochs or a
// gradient norm below 1e-6. Features are standardized before fitting.
class Bmic {
 public:
  static Bmic train(const std::vector<std::pair<S2Features, int>>& reference) {
    std::size_t pos = 0, neg = 0;
    for (const auto& [f, label] : reference) {
      (label == 1 ? pos : neg) += 1;
    }
    if (pos == 0 || neg == 0) throw ValidationError("train_bmic: both classes required");
    if (pos < 10 || neg < 10) throw ValidationError("train_bmic: need >= 10 examples per class");

    Bmic model;
    const std::size_t n = reference.size();
    std::vector<std::array<double, 2>> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = {reference[i].first.bleu, reference[i].first.gen_perplexity};
    }
    for (int d = 0; d < 2; ++d) {
      double mean = 0.0;
      for (const auto& xi : x) mean += xi[static_cast<std::size_t>(d)];
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (const auto& xi : x) {
        const double diff = xi[static_cast<std::size_t>(d)] - mean;
        var += diff * diff;
      }
      var /= static_cast<double>(n);
      model.mean_[static_cast<std::size_t>(d)] = mean;
      model.scale_[static_cast<std::size_t>(d)] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    for (auto& xi : x) {
      for (std::size_t d = 0; d < 2; ++d) xi[d] = (xi[d] - model.mean_[d]) / model.scale_[d];
    }

    constexpr double kStep = 0.1;
    constexpr double kL2 = 1e-4;
    constexpr int kMaxEpochs = 5000;
    for (int epoch = 0; epoch < kMaxEpochs; ++epoch) {
      double g0 = 0.0, g1 = 0.0, gb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double z =
            model.w_[0] * x[i][0] + model.w_[1] * x[i][1] + model.bias_;
        const double p = 1.0 / (1.0 + std::exp(-z));
        const double err = p - static_cast<double>(reference[i].second);
        g0 += err * x[i][0];
        g1 += err * x[i][1];
        gb += err;
      }
      g0 = g0 / static_cast<double>(n) + kL2 * model.w_[0];
      g1 = g1 / static_cast<double>(n) + kL2 * model.w_[1];
      gb /= static_cast<double>(n);
      model.w_[0] -= kStep * g0;
      model.w_[1] -= kStep * g1;
      model.bias_ -= kStep * gb;
      if (std::sqrt(g0 * g0 + g1 * g1 + gb * gb) < 1e-6) break;
    }
    return model;
  }

  double infer(const S2Features& f) const {
    const double x0 = (f.bleu - mean_[0]) / scale_[0];
    const double x1 = (f.gen_perplexity - mean_[1]) / scale_[1];
    const double z = w_[0] * x0 + w_[1] * x1 + bias_;
    return 1.0 / (1.0 + std::exp(-z));
  }

  bool decide(const S2Features& f, double threshold = 0.5) const {
    return infer(f) >= threshold;
  }

  double bleu_weight() const { return w_[0]; }
  double perplexity_weight() const { return w_[1]; }

 private:
  std::array<double, 2> w_ = {0.0, 0.0};
  double bias_ = 0.0;
  std::array<double, 2> mean_ = {0.0, 0.0};
  std::array<double, 2> scale_ = {1.0, 1.0};
};

inline Bmic train_bmic(const std::vector<std::pair<S2Features, int>>& reference) {
  return Bmic::train(reference);
}

}  // namespace leakbench

#endif  // LEAKBENCH_MIA_S2_HPP
