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

#include "leakbench/metrics.hpp"

using namespace leakbench;
using Catch::Approx;

namespace {

// Independent O(n^2) oracle: pairwise comparisons with half credit for ties.
double roc_auc_brute_force(const BinaryScores& data) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < data.scores.size(); ++i) {
    if (data.labels[i] != 1) continue;
    for (std::size_t j = 0; j < data.scores.size(); ++j) {
      if (data.labels[j] != 0) continue;
      ++pairs;
      if (data.scores[i] > data.scores[j]) wins += 1.0;
      else if (data.scores[i] == data.scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("roc_auc basics") {
  SECTION("perfect separation") {
    BinaryScores d{{0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0}};
    REQUIRE(roc_auc(d) == Approx(1.0));
  }
  SECTION("all scores equal gives tie credit 0.5") {
    BinaryScores d{{0.5, 0.5, 0.5, 0.5}, {1, 1, 0, 0}};
    REQUIRE(roc_auc(d) == Approx(0.5));
  }
  SECTION("hand-counted pairwise value") {
    BinaryScores d{{0.8, 0.3, 0.5, 0.1}, {1, 1, 0, 0}};
    REQUIRE(roc_auc(d) == Approx(0.75));
  }
  SECTION("single-class input rejected") {
    BinaryScores d{{0.5, 0.6}, {1, 1}};
    REQUIRE_THROWS_AS(roc_auc(d), ValidationError);
  }
}

TEST_CASE("roc_auc equals the brute-force oracle on random instances") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + rng() % 400;
    BinaryScores d;
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid forces plenty of ties
      d.scores.push_back(static_cast<double>(rng() % 17) / 16.0);
      const int label = static_cast<int>(rng() % 2);
      d.labels.push_back(label);
      has_pos = has_pos || label == 1;
      has_neg = has_neg || label == 0;
    }
    if (!has_pos) d.labels[0] = 1;
    if (!has_neg) d.labels[1] = 0;
    REQUIRE(roc_auc(d) == Approx(roc_auc_brute_force(d)).margin(1e-12));
  }
}

TEST_CASE("roc_auc invariances") {
  std::mt19937_64 rng(99);
  BinaryScores d;
  for (int i = 0; i < 200; ++i) {
    d.scores.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
    d.labels.push_back(static_cast<int>(rng() % 2));
  }
  d.labels[0] = 1;
  d.labels[1] = 0;
  const double base = roc_auc(d);

  SECTION("strictly monotone transform leaves auc unchanged") {
    BinaryScores t = d;
    for (double& s : t.scores) s = std::exp(3.0 * s) + 7.0;
    REQUIRE(roc_auc(t) == Approx(base).margin(1e-12));
  }
  SECTION("label flip symmetry") {
    BinaryScores f = d;
    for (int& l : f.labels) l = 1 - l;
    REQUIRE(roc_auc(d) + roc_auc(f) == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("pr_auc") {
  SECTION("perfect separation scores 1") {
    BinaryScores d{{0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0}};
    REQUIRE(pr_auc(d) == Approx(1.0));
  }
  SECTION("single positive ranked first scores 1") {
    BinaryScores d{{0.9, 0.5, 0.4, 0.3}, {1, 0, 0, 0}};
    REQUIRE(pr_auc(d) == Approx(1.0));
  }
  SECTION("random scores approach the positive fraction") {
    std::mt19937_64 rng(5);
    BinaryScores d;
    const double p = 0.3;
    for (int i = 0; i < 10000; ++i) {
      d.scores.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
      d.labels.push_back(std::uniform_real_distribution<double>(0, 1)(rng) < p ? 1 : 0);
    }
    REQUIRE(pr_auc(d) == Approx(p).margin(0.05));
  }
  SECTION("no positives rejected") {
    BinaryScores d{{0.5, 0.6}, {0, 0}};
    REQUIRE_THROWS_AS(pr_auc(d), ValidationError);
  }
}

TEST_CASE("prf1") {
  SECTION("perfect predictions") {
    auto c = prf1({1, 0, 1, 0}, {1, 0, 1, 0});
    REQUIRE(c.accuracy == Approx(1.0));
    REQUIRE(c.f1 == Approx(1.0));
  }
  SECTION("recall inflation: all-positive predictor on an 80/20 set") {
    std::vector<int> predictions(10, 1);
    std::vector<int> labels = {1, 1, 1, 1, 1, 1, 1, 1, 0, 0};
    auto c = prf1(predictions, labels);
    REQUIRE(c.precision == Approx(0.8));
    REQUIRE(c.recall == Approx(1.0));
  }
  SECTION("no positive predictions with positives present") {
    auto c = prf1({0, 0, 0}, {1, 0, 1});
    REQUIRE(c.precision == Approx(0.0));
    REQUIRE(c.recall == Approx(0.0));
    REQUIRE(c.f1 == Approx(0.0));
  }
  SECTION("length mismatch rejected") {
    REQUIRE_THROWS_AS(prf1({1}, {1, 0}), ValidationError);
  }
}

TEST_CASE("bleu golden values") {
  // Values fixed by hand computation before the implementation was written.
  REQUIRE(bleu("the cat sat", "the cat sat down") == Approx(71.6531310574).margin(1e-6));
  REQUIRE(bleu("the cat", "the cat sat down") == Approx(36.7879441171).margin(1e-6));
  REQUIRE(bleu("the cat sat down", "the cat sat down") == Approx(100.0).margin(1e-9));
  REQUIRE(bleu("the the the the", "the cat") == Approx(31.9471552123).margin(1e-6));
  REQUIRE(bleu("a quick brown fox jumps", "the quick brown fox jumped over") ==
          Approx(34.9833012527).margin(1e-6));
}

TEST_CASE("bleu properties") {
  SECTION("identity scores 100 for any non-empty text") {
    for (const std::string s : {"x", "a b", "one two three four five six"}) {
      REQUIRE(bleu(s, s) == Approx(100.0).margin(1e-9));
    }
  }
  SECTION("zero unigram overlap scores 0") {
    REQUIRE(bleu("dog runs fast", "the cat sat down") == 0.0);
  }
  SECTION("permutation sensitivity beyond unigrams") {
    REQUIRE(bleu("cat the sat down", "the cat sat down") <
            bleu("the cat sat down", "the cat sat down"));
  }
  SECTION("empty reference rejected, empty candidate scores 0") {
    REQUIRE_THROWS_AS(bleu("x", "  "), ValidationError);
    REQUIRE(bleu("", "the cat") == 0.0);
  }
}
