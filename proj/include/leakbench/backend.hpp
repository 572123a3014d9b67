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

#ifndef LEAKBENCH_BACKEND_HPP
#define LEAKBENCH_BACKEND_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "leakbench/common.hpp"
#include "leakbench/vocab.hpp"

namespace leakbench {

struct GenerationConfig {
  enum class Strategy { kGreedy, kTopK };
  int max_new_tokens = 256;
  Strategy strategy = Strategy::kGreedy;
  int k = 1;
  std::uint64_t seed = 42;

  void validate() const {
    if (max_new_tokens < 1) throw ValidationError("max_new_tokens must be >= 1");
    if (strategy == Strategy::kTopK && k < 1) throw ValidationError("k must be >= 1 for top-k");
  }
};

// The single seam between attacks and models: anything exposing next-token
// log-probability distributions over a fixed vocabulary. Implementations must
// be side-effect-free and safe for concurrent reads.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;

  virtual const Vocabulary& vocab() const = 0;
  virtual std::string kind() const = 0;
  virtual bool deterministic() const { return true; }
  virtual std::size_t max_context() const { return std::numeric_limits<std::size_t>::max(); }

  // Log-probabilities over all vocab().size() token ids; exp sums to 1 +- 1e-9
  // and every entry is <= 0.
  virtual std::vector<double> next_token_logprobs(std::span<const TokenId> context) const = 0;

  // Scalar fast path; must agree with next_token_logprobs.
  virtual double logprob_of(std::span<const TokenId> context, TokenId next) const {
    auto dist = next_token_logprobs(context);
    if (next >= dist.size()) throw DataError("token id out of range");
    return dist[next];
  }

  // Backends that produce text directly (copy generator, HTTP, fixed mocks)
  // override this; token-loop backends leave it unset.
  virtual std::optional<std::string> generate_text(const std::string& /*prompt*/,
                                                   const GenerationConfig& /*config*/) const {
    return std::nullopt;
  }
};

inline void check_context_length(const ModelBackend& backend, std::size_t length) {
  if (length > backend.max_context()) {
    throw ValidationError("context too long: " + std::to_string(length) + " > " +
                          std::to_string(backend.max_context()));
  }
}

// Greedy / top-k decoding loop over next_token_logprobs; stops on </s> or
// after max_new_tokens. Direct-text backends bypass the loop but still honor
// the token budget.
inline std::string generate(const ModelBackend& backend, const std::string& prompt,
                            const GenerationConfig& config) {
  config.validate();
  const Vocabulary& vocab = backend.vocab();

  if (auto text = backend.generate_text(prompt, config)) {
    auto ids = vocab.tokenize(*text).ids;
    if (ids.size() > static_cast<std::size_t>(config.max_new_tokens)) {
      ids.resize(static_cast<std::size_t>(config.max_new_tokens));
    }
    return vocab.detokenize(ids);
  }

  TokenSequence seq = vocab.tokenize(prompt);
  check_context_length(backend, seq.ids.size());
  std::mt19937_64 rng(config.seed);
  std::vector<TokenId> generated;
  for (int step = 0; step < config.max_new_tokens; ++step) {
    auto dist = backend.next_token_logprobs(seq.ids);
    TokenId next = 0;
    if (config.strategy == GenerationConfig::Strategy::kGreedy) {
      double best = -std::numeric_limits<double>::infinity();
      for (TokenId t = 0; t < dist.size(); ++t) {
        if (dist[t] > best) {
          best = dist[t];
          next = t;
        }
      }
    } else {
      // top-k: renormalize the k most probable entries and sample.
      std::vector<TokenId> order(dist.size());
      for (TokenId t = 0; t < order.size(); ++t) order[t] = t;
      std::stable_sort(order.begin(), order.end(),
                       [&](TokenId a, TokenId b) { return dist[a] > dist[b]; });
      const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config.k), order.size());
      std::vector<double> probs(k);
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        probs[i] = std::exp(dist[order[i]]);
        total += probs[i];
      }
      std::uniform_real_distribution<double> unif(0.0, total);
      double r = unif(rng);
      std::size_t pick = 0;
      for (; pick + 1 < k; ++pick) {
        if (r < probs[pick]) break;
        r -= probs[pick];
      }
      next = order[pick];
    }
    if (next == Vocabulary::kEos) break;
    generated.push_back(next);
    seq.ids.push_back(next);
  }
  return vocab.detokenize(generated);
}

// --- mock backends ----------------------------------------------------------

// Uniform distribution over the vocabulary.
class UniformBackend : public ModelBackend {
 public:
  explicit UniformBackend(Vocabulary vocab) : vocab_(std::move(vocab)) {}

  const Vocabulary& vocab() const override { return vocab_; }
  std::string kind() const override { return "mock"; }

  std::vector<double> next_token_logprobs(std::span<const TokenId>) const override {
    return std::vector<double>(vocab_.size(), -std::log(static_cast<double>(vocab_.size())));
  }
  double logprob_of(std::span<const TokenId>, TokenId) const override {
    return -std::log(static_cast<double>(vocab_.size()));
  }

 private:
  Vocabulary vocab_;
};

namespace detail {
// Point mass on `target` with the remaining mass spread at the floor.
inline std::vector<double> point_mass(std::size_t vocab_size, TokenId target) {
  const double floor_p = std::exp(kLogFloor);
  std::vector<double> dist(vocab_size, kLogFloor);
  dist[target] = std::log(1.0 - floor_p * static_cast<double>(vocab_size - 1));
  return dist;
}
}  // namespace detail

// Always predicts the same token.
class ConstantBackend : public ModelBackend {
 public:
  ConstantBackend(Vocabulary vocab, std::string_view token) : vocab_(std::move(vocab)) {
    auto id = vocab_.id(token);
    if (!id) throw ValidationError("constant token not in vocabulary");
    target_ = *id;
  }

  const Vocabulary& vocab() const override { return vocab_; }
  std::string kind() const override { return "mock"; }

  std::vector<double> next_token_logprobs(std::span<const TokenId>) const override {
    return detail::point_mass(vocab_.size(), target_);
  }

 private:
  Vocabulary vocab_;
  TokenId target_;
};

// Deterministically spells a fixed string: whenever the context ends with a
// prefix of the target (longest match wins), it predicts the next target
// token, then </s> once the target is complete.
class SpellBackend : public ModelBackend {
 public:
  SpellBackend(Vocabulary vocab, const std::string& text) : vocab_(std::move(vocab)) {
    target_ = vocab_.tokenize(text).ids;
    if (target_.empty()) throw ValidationError("spell target tokenizes to nothing");
  }

  const Vocabulary& vocab() const override { return vocab_; }
  std::string kind() const override { return "mock"; }

  std::vector<double> next_token_logprobs(std::span<const TokenId> context) const override {
    std::size_t matched = 0;
    const std::size_t max_len = std::min(target_.size(), context.size());
    for (std::size_t len = max_len; len > 0; --len) {
      bool ok = true;
      for (std::size_t i = 0; i < len; ++i) {
        if (context[context.size() - len + i] != target_[i]) {
          ok = false;
          break;
        }
      }
      if (ok) {
        matched = len;
        break;
      }
    }
    TokenId next = (matched == target_.size()) ? Vocabulary::kEos : target_[matched];
    return detail::point_mass(vocab_.size(), next);
  }

 private:
  Vocabulary vocab_;
  std::vector<TokenId> target_;
};

// Returns a fixed string from generate() and a uniform distribution from
// next_token_logprobs(); stands in for a generator that ignores its context.
class FixedTextBackend : public ModelBackend {
 public:
  FixedTextBackend(Vocabulary vocab, std::string text)
      : vocab_(std::move(vocab)), text_(std::move(text)) {}

  const Vocabulary& vocab() const override { return vocab_; }
  std::string kind() const override { return "mock"; }

  std::vector<double> next_token_logprobs(std::span<const TokenId>) const override {
    return std::vector<double>(vocab_.size(), -std::log(static_cast<double>(vocab_.size())));
  }

  std::optional<std::string> generate_text(const std::string&,
                                           const GenerationConfig&) const override {
    return text_;
  }

 private:
  Vocabulary vocab_;
  std::string text_;
};

}  // namespace leakbench

#endif  // LEAKBENCH_BACKEND_HPP
