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

#ifndef LEAKBENCH_NGRAM_HPP
#define LEAKBENCH_NGRAM_HPP

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "leakbench/backend.hpp"
#include "leakbench/corpus.hpp"

namespace leakbench {

struct NgramSmoothing {
  // Additive mass at the unigram level; keeps every conditional distribution
  // proper even for tokens never seen in training.
  double unigram_add = 0.01;
};

// Interpolated character n-gram model. Orders are mixed with fixed weights
// lambda_j proportional to 2^j, renormalized over the orders whose context
// was actually observed, so an unseen top-order context reproduces the
// order-(k-1) model's distribution exactly.
class NgramModel : public ModelBackend {
 public:
  NgramModel(const Corpus& corpus, int order, NgramSmoothing smoothing = {},
             std::uint64_t seed = 42)
      : order_(order), smoothing_(smoothing), seed_(seed) {
    if (order < 1) throw ValidationError("ngram order must be >= 1");
    if (corpus.empty()) throw ValidationError("ngram training corpus is empty");
    vocab_ = corpus.build_vocabulary();
    trained_on_ = corpus.fingerprint();
    unigram_counts_.assign(vocab_.size(), 0);
    ctx_tables_.resize(static_cast<std::size_t>(order_));
    for (const auto& doc : corpus.documents()) {
      observe(vocab_.tokenize(doc.text).ids);
    }
  }

  int order() const { return order_; }
  std::uint64_t trained_on() const { return trained_on_; }

  const Vocabulary& vocab() const override { return vocab_; }
  std::string kind() const override { return "ngram"; }

  std::vector<double> next_token_logprobs(std::span<const TokenId> context) const override {
    const std::size_t v = vocab_.size();
    std::vector<double> probs(v, 0.0);
    double denom = 0.0;
    std::vector<std::pair<int, const ContextCounts*>> avail;
    collect_available(context, avail, denom);
    for (auto [j, counts] : avail) {
      const double share = weight(j) / denom;
      if (j == 1) {
        const double add = smoothing_.unigram_add;
        const double total = static_cast<double>(unigram_total_) + add * static_cast<double>(v);
        for (std::size_t t = 0; t < v; ++t) {
          probs[t] += share * (static_cast<double>(unigram_counts_[t]) + add) / total;
        }
      } else {
        for (const auto& [tok, c] : counts->items) {
          probs[tok] += share * static_cast<double>(c) / static_cast<double>(counts->total);
        }
      }
    }
    std::vector<double> logs(v);
    for (std::size_t t = 0; t < v; ++t) logs[t] = std::log(probs[t]);
    return logs;
  }

  double logprob_of(std::span<const TokenId> context, TokenId next) const override {
    if (next >= vocab_.size()) throw DataError("token id out of range");
    double denom = 0.0;
    std::vector<std::pair<int, const ContextCounts*>> avail;
    collect_available(context, avail, denom);
    double p = 0.0;
    for (auto [j, counts] : avail) {
      const double share = weight(j) / denom;
      if (j == 1) {
        const double add = smoothing_.unigram_add;
        const double total =
            static_cast<double>(unigram_total_) + add * static_cast<double>(vocab_.size());
        p += share * (static_cast<double>(unigram_counts_[next]) + add) / total;
      } else {
        for (const auto& [tok, c] : counts->items) {
          if (tok == next) {
            p += share * static_cast<double>(c) / static_cast<double>(counts->total);
            break;
          }
        }
      }
    }
    return std::log(p);
  }

 private:
  struct ContextCounts {
    std::uint32_t total = 0;
    std::vector<std::pair<TokenId, std::uint32_t>> items;

    void bump(TokenId t) {
      ++total;
      for (auto& [tok, c] : items) {
        if (tok == t) {
          ++c;
          return;
        }
      }
      items.emplace_back(t, 1);
    }
  };

  static double weight(int j) { return std::ldexp(1.0, j); }  // 2^j

  static std::string encode(std::span<const TokenId> ids) {
    std::string key;
    key.reserve(ids.size() * 4);
    for (TokenId id : ids) {
      key.push_back(static_cast<char>(id & 0xff));
      key.push_back(static_cast<char>((id >> 8) & 0xff));
      key.push_back(static_cast<char>((id >> 16) & 0xff));
      key.push_back(static_cast<char>((id >> 24) & 0xff));
    }
    return key;
  }

  void observe(const std::vector<TokenId>& ids) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      ++unigram_counts_[ids[i]];
      ++unigram_total_;
      for (int cl = 1; cl < order_; ++cl) {
        if (i < static_cast<std::size_t>(cl)) break;
        auto key = encode(std::span(ids).subspan(i - static_cast<std::size_t>(cl),
                                                 static_cast<std::size_t>(cl)));
        ctx_tables_[static_cast<std::size_t>(cl)][key].bump(ids[i]);
      }
    }
  }

  void collect_available(std::span<const TokenId> context,
                         std::vector<std::pair<int, const ContextCounts*>>& avail,
                         double& denom) const {
    avail.emplace_back(1, nullptr);
    denom = weight(1);
    for (int j = 2; j <= order_; ++j) {
      const std::size_t cl = static_cast<std::size_t>(j - 1);
      if (context.size() < cl) continue;
      auto key = encode(context.subspan(context.size() - cl, cl));
      auto it = ctx_tables_[cl].find(key);
      if (it == ctx_tables_[cl].end() || it->second.total == 0) continue;
      avail.emplace_back(j, &it->second);
      denom += weight(j);
    }
  }

  int order_;
  NgramSmoothing smoothing_;
  std::uint64_t seed_;
  Vocabulary vocab_;
  std::uint64_t trained_on_ = 0;
  std::vector<std::uint32_t> unigram_counts_;
  std::uint64_t unigram_total_ = 0;
  std::vector<std::unordered_map<std::string, ContextCounts>> ctx_tables_;
};

inline NgramModel train_ngram(const Corpus& corpus, int order, NgramSmoothing smoothing = {},
                              std::uint64_t seed = 42) {
  return NgramModel(corpus, order, smoothing, seed);
}

}  // namespace leakbench

#endif  // LEAKBENCH_NGRAM_HPP
