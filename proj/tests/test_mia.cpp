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

#include <random>

#include "leakbench/copygen.hpp"
#include "leakbench/metrics.hpp"
#include "leakbench/mia_mask.hpp"
#include "leakbench/mia_s2.hpp"
#include "leakbench/ngram.hpp"
#include "leakbench/plant.hpp"

using namespace leakbench;
using Catch::Approx;

TEST_CASE("split_target") {
  SECTION("QA-shaped text splits at the answer marker") {
    auto s = split_target("t0", "Q: who? A: Bob", true);
    REQUIRE(trim(s.query_part) == "Q: who?");
    REQUIRE(s.holdout_part == "A: Bob");
    REQUIRE(s.query_part + s.holdout_part == s.full_text);
  }
  SECTION("free text splits at the midpoint word boundary") {
    auto s = split_target("t1", "one two three four five six seven eight nine ten", false);
    REQUIRE(split_words(s.query_part).size() == 5);
    REQUIRE(split_words(s.holdout_part).size() == 5);
    REQUIRE(s.query_part + s.holdout_part == s.full_text);
  }
  SECTION("single word cannot split") {
    REQUIRE_THROWS_AS(split_target("t2", "alone", false), ValidationError);
  }
  SECTION("concatenation identity holds over generated documents") {
    auto docs = make_documents(10, 3, "x", Split::kMember);
    for (const auto& d : docs.documents()) {
      auto s = split_target(d.id, d.text, true);
      REQUIRE(s.query_part + s.holdout_part == s.full_text);
    }
  }
}

TEST_CASE("bmic training and inference") {
  auto features = [](double b, double p) {
    S2Features f;
    f.bleu = b;
    f.gen_perplexity = p;
    return f;
  };

  SECTION("separable reference set trains to accuracy 1.0") {
    std::vector<std::pair<S2Features, int>> ref;
    for (int i = 0; i < 12; ++i) {
      ref.emplace_back(features(80.0 + i, 1.0), 1);
      ref.emplace_back(features(10.0 + i, 5.0), 0);
    }
    auto model = train_bmic(ref);
    for (const auto& [f, label] : ref) {
      REQUIRE((model.infer(f) >= 0.5 ? 1 : 0) == label);
    }
    REQUIRE(model.bleu_weight() > 0.0);
  }

  SECTION("permuted labels give chance-level auc") {
    std::mt19937_64 rng(19);
    std::vector<std::pair<S2Features, int>> ref;
    std::vector<S2Features> heldout;
    std::vector<int> heldout_labels;
    for (int i = 0; i < 1000; ++i) {
      auto f = features(std::uniform_real_distribution<double>(0, 100)(rng),
                        std::uniform_real_distribution<double>(0, 8)(rng));
      const int label = static_cast<int>(rng() % 2);
      if (i < 500) {
        ref.emplace_back(f, label);
      } else {
        heldout.push_back(f);
        heldout_labels.push_back(label);
      }
    }
    auto model = train_bmic(ref);
    BinaryScores scores;
    for (std::size_t i = 0; i < heldout.size(); ++i) {
      scores.scores.push_back(model.infer(heldout[i]));
      scores.labels.push_back(heldout_labels[i]);
    }
    REQUIRE(roc_auc(scores) == Approx(0.5).margin(0.1));
  }

  SECTION("duplicated dataset keeps the decision boundary") {
    std::vector<std::pair<S2Features, int>> ref;
    for (int i = 0; i < 15; ++i) {
      ref.emplace_back(features(60.0 + (i % 5), 1.0 + 0.1 * i), 1);
      ref.emplace_back(features(20.0 + (i % 5), 3.0 + 0.1 * i), 0);
    }
    auto doubled = ref;
    doubled.insert(doubled.end(), ref.begin(), ref.end());
    auto a = train_bmic(ref);
    auto b = train_bmic(doubled);
    for (double bleu_val : {10.0, 40.0, 55.0, 90.0}) {
      auto f = features(bleu_val, 2.0);
      REQUIRE(a.infer(f) == Approx(b.infer(f)).margin(1e-6));
    }
  }

  SECTION("same features, same output") {
    std::vector<std::pair<S2Features, int>> ref;
    for (int i = 0; i < 10; ++i) {
      ref.emplace_back(features(70.0 + i, 1.0), 1);
      ref.emplace_back(features(30.0 - i, 2.0), 0);
    }
    auto model = train_bmic(ref);
    REQUIRE(model.infer(features(50, 1.5)) == model.infer(features(50, 1.5)));
  }

  SECTION("single class rejected") {
    std::vector<std::pair<S2Features, int>> ref;
    for (int i = 0; i < 20; ++i) ref.emplace_back(features(50, 1), 1);
    REQUIRE_THROWS_AS(train_bmic(ref), ValidationError);
  }
}

TEST_CASE("proxy difficulty ranking") {
  Corpus proxy_corpus({{"p0", "the market report was filed and the market report was good",
                        Split::kTrain}});
  NgramModel proxy(proxy_corpus, 3);

  SECTION("unseen word ranks above a frequent one") {
    Document doc{"d", "the market zyxqv report", Split::kTrain};
    auto ranking = proxy_difficulty(proxy, doc);
    REQUIRE_FALSE(ranking.empty());
    REQUIRE(ranking.front().term == "zyxqv");
  }
  SECTION("stop-words-only document yields an empty ranking") {
    Document doc{"d", "the and of to in", Split::kTrain};
    REQUIRE(proxy_difficulty(proxy, doc).empty());
  }
  SECTION("ranking is ordered by difficulty") {
    Document doc{"d", "market report zebra filed quantum", Split::kTrain};
    auto ranking = proxy_difficulty(proxy, doc);
    for (std::size_t i = 1; i < ranking.size(); ++i) {
      REQUIRE(ranking[i].difficulty <= ranking[i - 1].difficulty + 1e-12);
    }
  }
}

TEST_CASE("make_masks") {
  Document doc{"d", "alpha beta gamma delta epsilon zeta eta theta", Split::kTrain};
  auto ranked = [&](std::initializer_list<std::pair<const char*, std::size_t>> items) {
    std::vector<RankedTerm> r;
    double difficulty = 100.0;
    for (const auto& [term, pos] : items) {
      r.push_back({term, pos, difficulty});
      difficulty -= 1.0;
    }
    return r;
  };

  SECTION("single mask") {
    auto probe = make_masks(doc, ranked({{"gamma", 2}}), 1);
    REQUIRE(probe.mask_count == 1);
    REQUIRE(probe.answer_key == std::vector<std::string>{"gamma"});
    REQUIRE(probe.masked_text ==
            "alpha beta [Mask_1] delta epsilon zeta eta theta");
  }
  SECTION("adjacent runner-up is skipped for the next eligible term") {
    auto probe = make_masks(doc, ranked({{"gamma", 2}, {"delta", 3}, {"zeta", 5}}), 2);
    REQUIRE(probe.answer_key == std::vector<std::string>{"gamma", "zeta"});
    REQUIRE(probe.masked_text.find("[Mask_1]") != std::string::npos);
    REQUIRE(probe.masked_text.find("[Mask_2]") != std::string::npos);
    REQUIRE(probe.masked_text.find("delta") != std::string::npos);
  }
  SECTION("placeholders are numbered in document order") {
    auto probe = make_masks(doc, ranked({{"zeta", 5}, {"beta", 1}}), 2);
    REQUIRE(probe.answer_key == std::vector<std::string>{"beta", "zeta"});
    REQUIRE(probe.masked_text == "alpha [Mask_1] gamma delta epsilon [Mask_2] eta theta");
  }
  SECTION("insufficient terms reduce the probe and flag it") {
    auto probe = make_masks(doc, ranked({{"gamma", 2}, {"delta", 3}}), 5);
    REQUIRE(probe.reduced);
    REQUIRE(probe.mask_count == 1);
  }
}

TEST_CASE("parse_mask_response") {
  SECTION("partial responses leave gaps empty") {
    auto p = parse_mask_response("Mask_2: foo", 2);
    REQUIRE(p == std::vector<std::string>{"", "foo"});
  }
  SECTION("full strict format") {
    auto p = parse_mask_response("Mask_1: alpha\nMask_2: beta\n", 2);
    REQUIRE(p == std::vector<std::string>{"alpha", "beta"});
  }
  SECTION("refusal parses to all-empty predictions") {
    auto p = parse_mask_response(kRefusalText, 3);
    REQUIRE(p == std::vector<std::string>{"", "", ""});
  }
  SECTION("out-of-range indices ignored") {
    auto p = parse_mask_response("Mask_9: zzz\nMask_1: ok", 2);
    REQUIRE(p == std::vector<std::string>{"ok", ""});
  }
}

TEST_CASE("mask_accuracy") {
  SECTION("all match") {
    REQUIRE(mask_accuracy({"a", "b"}, {"a", "b"}) == 1.0);
  }
  SECTION("seven of ten") {
    std::vector<std::string> key(10, "word");
    std::vector<std::string> pred(10, "word");
    pred[0] = pred[1] = pred[2] = "wrong";
    REQUIRE(mask_accuracy(pred, key) == Approx(0.7));
  }
  SECTION("case folding counts as a match") {
    REQUIRE(mask_accuracy({"Foo"}, {"foo"}) == 1.0);
  }
  SECTION("single-edit misspelling accepted for length >= 5") {
    REQUIRE(mask_accuracy({"spreads"}, {"spread"}) == 1.0);
    REQUIRE(mask_accuracy({"caat"}, {"cat"}) == 0.0);  // too short for correction
    REQUIRE(mask_accuracy({"spreads"}, {"spread"}, false) == 0.0);
  }
  SECTION("length mismatch rejected") {
    REQUIRE_THROWS_AS(mask_accuracy({"a"}, {"a", "b"}), ValidationError);
  }
}

TEST_CASE("mask_decide") {
  SECTION("member decision at gamma 0.5") {
    auto r = mask_decide(0.7, 0.5, true, true);
    REQUIRE(r.is_member_decision);
    REQUIRE(r.failure == "none");
  }
  SECTION("threshold flip at gamma 0.9") {
    REQUIRE_FALSE(mask_decide(0.7, 0.9, true, true).is_member_decision);
  }
  SECTION("generation failure attribution") {
    auto r = mask_decide(0.3, 0.5, true, true);
    REQUIRE(r.failure == "generation");
  }
  SECTION("retrieval failure attribution") {
    auto r = mask_decide(0.0, 0.5, true, false);
    REQUIRE(r.failure == "retrieval");
  }
  SECTION("gamma bounds") {
    REQUIRE_THROWS_AS(mask_decide(0.5, 0.0, true, true), ValidationError);
    REQUIRE_THROWS_AS(mask_decide(0.5, 1.5, true, true), ValidationError);
  }
}

TEST_CASE("mask pipeline end to end with the copy generator") {
  auto members = make_documents(8, 500, "mem", Split::kMember);
  auto index = build_index(members, "bm25");
  Vocabulary vocab = Vocabulary::ascii();
  CopyGeneratorBackend generator(vocab);
  Corpus proxy_corpus = make_documents(10, 501, "proxy", Split::kNonMember);
  NgramModel proxy(proxy_corpus, 3);

  RagPipeline pipeline;
  pipeline.index = index.get();
  pipeline.corpus = &members;
  pipeline.backend = &generator;
  pipeline.k = 3;
  pipeline.generation.max_new_tokens = 4096;

  SECTION("member documents reconstruct fully when retrieved") {
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& doc = members.at(i);
      auto ranking = proxy_difficulty(proxy, doc);
      auto probe = make_masks(doc, ranking, 5);
      auto [predictions, hit] = reconstruct(pipeline, probe);
      REQUIRE(hit);
      REQUIRE(mask_accuracy(predictions, probe.answer_key) == 1.0);
    }
  }

  SECTION("non-member documents fail exact reconstruction") {
    auto outsiders = make_documents(3, 777, "non", Split::kNonMember);
    double total = 0.0;
    for (const auto& doc : outsiders.documents()) {
      auto ranking = proxy_difficulty(proxy, doc);
      auto probe = make_masks(doc, ranking, 5);
      auto [predictions, hit] = reconstruct(pipeline, probe);
      REQUIRE_FALSE(hit);
      total += mask_accuracy(predictions, probe.answer_key);
    }
    REQUIRE(total / 3.0 < 0.5);
  }
}

TEST_CASE("gamma moves the operating point but never the accuracy vector") {
  // identical accuracies under every gamma; only decisions change
  std::vector<double> accuracies = {1.0, 0.9, 0.6, 0.4, 0.0, 0.1};
  std::vector<int> labels = {1, 1, 1, 0, 0, 0};
  BinaryScores base{accuracies, labels};
  const double auc = roc_auc(base);
  std::vector<double> f1s;
  for (double gamma : {0.3, 0.5, 0.7, 0.9}) {
    std::vector<int> decisions;
    for (double a : accuracies) decisions.push_back(a >= gamma ? 1 : 0);
    f1s.push_back(prf1(decisions, labels).f1);
    REQUIRE(roc_auc(BinaryScores{accuracies, labels}) == auc);  // bit-identical
  }
  REQUIRE(f1s[0] != f1s[3]);
}

TEST_CASE("bmic probability is monotone in bleu when its weight is positive") {
  std::vector<std::pair<S2Features, int>> ref;
  for (int i = 0; i < 12; ++i) {
    S2Features member{75.0 + i, 1.0 + 0.05 * i, false};
    S2Features outsider{15.0 + i, 2.5 + 0.05 * i, false};
    ref.emplace_back(member, 1);
    ref.emplace_back(outsider, 0);
  }
  auto model = train_bmic(ref);
  REQUIRE(model.bleu_weight() > 0.0);
  double prev = -1.0;
  for (double b = 0.0; b <= 100.0; b += 5.0) {
    S2Features f{b, 1.7, false};
    const double p = model.infer(f);
    REQUIRE(p >= prev);
    prev = p;
  }
}
