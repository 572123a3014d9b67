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

#include <catch2/catch_amalgamated.hpp>

#include "leakbench/backend.hpp"
#include "leakbench/ngram.hpp"
#include "leakbench/vocab.hpp"

using namespace leakbench;
using Catch::Approx;

namespace {

Corpus one_doc(const std::string& text) {
  return Corpus({{"d0", text, Split::kTrain}});
}

void check_distribution_contract(const ModelBackend& backend, std::span<const TokenId> ctx) {
  auto dist = backend.next_token_logprobs(ctx);
  REQUIRE(dist.size() == backend.vocab().size());
  double sum = 0.0;
  for (double lp : dist) {
    REQUIRE(lp <= 0.0);
    sum += std::exp(lp);
  }
  REQUIRE(std::abs(sum - 1.0) < 1e-9);
}

}  // namespace

TEST_CASE("tokenize basics") {
  auto vocab = Vocabulary::from_text("abc");

  SECTION("empty input gives an empty sequence") {
    REQUIRE(vocab.tokenize("").size() == 0);
  }
  SECTION("round trip") {
    auto seq = vocab.tokenize("abc");
    REQUIRE(seq.size() == 3);
    REQUIRE(vocab.detokenize(seq.ids) == "abc");
  }
  SECTION("unknown codepoint maps to the unk id") {
    auto seq = vocab.tokenize("ab\xC2\xBF");  // "ab¿"
    REQUIRE(seq.ids.size() == 3);
    REQUIRE(seq.ids[0] == *vocab.id("a"));
    REQUIRE(seq.ids[1] == *vocab.id("b"));
    REQUIRE(seq.ids[2] == Vocabulary::kUnk);
  }
  SECTION("unconstructed vocabulary refuses to tokenize") {
    Vocabulary empty;
    REQUIRE_THROWS_AS(empty.tokenize("a"), DataError);
  }
  SECTION("ids are dense and lookup inverts id") {
    for (TokenId t = 0; t < vocab.size(); ++t) {
      const auto& tok = vocab.lookup(t);
      if (t >= 2) REQUIRE(*vocab.id(tok) == t);
    }
  }
}

TEST_CASE("ngram training reflects corpus counts") {
  SECTION("bigram: P(b|a) > P(a|a) on ababab") {
    NgramModel model(one_doc("ababab"), 2);
    auto ctx = model.vocab().tokenize("a").ids;
    const double pb = model.logprob_of(ctx, *model.vocab().id("b"));
    const double pa = model.logprob_of(ctx, *model.vocab().id("a"));
    REQUIRE(pb > pa);
    REQUIRE(model.vocab().id("b"));
  }

  SECTION("order 1 equals smoothed unigram frequencies") {
    NgramModel model(one_doc("aab"), 1);
    const auto& vocab = model.vocab();
    // counts: a=2, b=1, total=3, add 0.01 over |V| ids
    const double denom = 3.0 + 0.01 * static_cast<double>(vocab.size());
    auto ctx = vocab.tokenize("ab").ids;
    REQUIRE(model.logprob_of(ctx, *vocab.id("a")) == Approx(std::log(2.01 / denom)));
    REQUIRE(model.logprob_of(ctx, *vocab.id("b")) == Approx(std::log(1.01 / denom)));
  }

  SECTION("canary repeated 16x scores strictly higher than 1x") {
    const std::string canary = "badge 4417 code";
    auto build = [&](int reps) {
      std::string text = "the office report was filed on time and nothing else happened here. ";
      for (int i = 0; i < reps; ++i) text += canary + ". more filler words follow now. ";
      return NgramModel(one_doc(text), 5);
    };
    auto model1 = build(1);
    auto model16 = build(16);
    auto score = [&](const NgramModel& m) {
      auto ids = m.vocab().tokenize(canary).ids;
      double lp = 0.0;
      std::vector<TokenId> ctx;
      for (TokenId t : ids) {
        lp += m.logprob_of(ctx, t);
        ctx.push_back(t);
      }
      return lp;
    };
    REQUIRE(score(model16) > score(model1));
  }

  SECTION("empty corpus and bad order are rejected") {
    REQUIRE_THROWS_AS(NgramModel(Corpus(), 2), ValidationError);
    REQUIRE_THROWS_AS(NgramModel(one_doc("abc"), 0), ValidationError);
  }
}

TEST_CASE("next_token_logprobs contract") {
  auto vocab = Vocabulary::from_text("abcq");

  SECTION("uniform mock: every entry is -ln|V|") {
    UniformBackend backend(vocab);
    auto ctx = vocab.tokenize("ab").ids;
    auto dist = backend.next_token_logprobs(ctx);
    for (double lp : dist) REQUIRE(lp == Approx(-std::log(static_cast<double>(vocab.size()))));
    check_distribution_contract(backend, ctx);
  }

  SECTION("point mass: target near 0, rest at the floor") {
    ConstantBackend backend(vocab, "q");
    auto ctx = vocab.tokenize("a").ids;
    auto dist = backend.next_token_logprobs(ctx);
    REQUIRE(dist[*vocab.id("q")] == Approx(0.0).margin(1e-12));
    REQUIRE(dist[*vocab.id("a")] == Approx(kLogFloor));
    check_distribution_contract(backend, ctx);
  }

  SECTION("bigram model from ababab: argmax after a is b") {
    NgramModel model(one_doc("ababab"), 2);
    auto ctx = model.vocab().tokenize("a").ids;
    auto dist = model.next_token_logprobs(ctx);
    TokenId best = 0;
    for (TokenId t = 1; t < dist.size(); ++t) {
      if (dist[t] > dist[best]) best = t;
    }
    REQUIRE(best == *model.vocab().id("b"));
    check_distribution_contract(model, ctx);
  }

  SECTION("scalar fast path agrees with the distribution") {
    NgramModel model(one_doc("the cat sat on the mat"), 3);
    auto ctx = model.vocab().tokenize("the c").ids;
    auto dist = model.next_token_logprobs(ctx);
    for (TokenId t = 0; t < dist.size(); ++t) {
      REQUIRE(model.logprob_of(ctx, t) == Approx(dist[t]).epsilon(1e-12));
    }
  }
}

TEST_CASE("ngram distributions are proper for many contexts") {
  NgramModel model(one_doc("the quick brown fox jumps over the lazy dog again and again"), 4);
  const auto& vocab = model.vocab();
  for (const std::string ctx_text : {"", "t", "the", "the q", "zzz", "qqqq"}) {
    auto ctx = vocab.tokenize(ctx_text).ids;
    check_distribution_contract(model, ctx);
  }
}

TEST_CASE("unseen top-order context backs off to the lower-order model") {
  const std::string text = "abcabcabcxyz";
  NgramModel order3(one_doc(text), 3);
  NgramModel order2(one_doc(text), 2);
  // context "yx" reversed never occurs, so the trigram context is unseen while
  // the bigram context "x" is seen.
  auto ctx3 = order3.vocab().tokenize("yx").ids;
  auto d3 = order3.next_token_logprobs(ctx3);
  auto d2 = order2.next_token_logprobs(order2.vocab().tokenize("yx").ids);
  REQUIRE(d3.size() == d2.size());
  for (std::size_t t = 0; t < d3.size(); ++t) {
    REQUIRE(d3[t] == Approx(d2[t]).epsilon(1e-12));
  }
}

TEST_CASE("generate") {
  SECTION("greedy on a constant mock emits the token repeatedly") {
    auto vocab = Vocabulary::from_text("xy");
    ConstantBackend backend(vocab, "x");
    GenerationConfig config;
    config.max_new_tokens = 3;
    REQUIRE(generate(backend, "y", config) == "xxx");
  }

  SECTION("greedy bigram chain from ababab") {
    NgramModel model(one_doc("ababab"), 2);
    GenerationConfig config;
    config.max_new_tokens = 4;
    REQUIRE(generate(model, "a", config) == "baba");
  }

  SECTION("spell backend stops at eos and respects the budget") {
    auto vocab = Vocabulary::from_text("hello world");
    SpellBackend backend(vocab, "hello");
    GenerationConfig config;
    config.max_new_tokens = 32;
    REQUIRE(generate(backend, "", config) == "hello");
    config.max_new_tokens = 3;
    REQUIRE(generate(backend, "", config) == "hel");
  }

  SECTION("determinism: same inputs, same outputs, including top-k") {
    NgramModel model(one_doc("to be or not to be that is the question"), 3);
    GenerationConfig config;
    config.strategy = GenerationConfig::Strategy::kTopK;
    config.k = 3;
    config.seed = 7;
    config.max_new_tokens = 12;
    REQUIRE(generate(model, "to ", config) == generate(model, "to ", config));
  }

  SECTION("config validation") {
    auto vocab = Vocabulary::from_text("a");
    UniformBackend backend(vocab);
    GenerationConfig config;
    config.max_new_tokens = 0;
    REQUIRE_THROWS_AS(generate(backend, "a", config), ValidationError);
  }
}
