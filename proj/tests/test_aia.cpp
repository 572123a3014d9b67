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

#include "leakbench/aia.hpp"
#include "leakbench/experiment.hpp"

using namespace leakbench;
using Catch::Approx;

TEST_CASE("build_prompt") {
  SECTION("assembly order and verbatim embedding") {
    auto p = build_prompt("SYS", "PRE ", "user text here", " SUF");
    const auto s = p.assembled();
    REQUIRE(s.find("SYS") < s.find("PRE "));
    REQUIRE(s.find("PRE ") < s.find("user text here"));
    REQUIRE(s.find("user text here") < s.find(" SUF"));
    REQUIRE(p.formatted_text.find("user text here") != std::string::npos);
  }
  SECTION("empty prefix and suffix leave system plus fenced text") {
    auto p = build_prompt("SYS", "", "t", "");
    REQUIRE(p.assembled() == "SYS\n\n\n\"\"\"\nt\n\"\"\"\n");
  }
  SECTION("identical inputs, identical prompt") {
    auto a = build_prompt("s", "p", "t", "x");
    auto b = build_prompt("s", "p", "t", "x");
    REQUIRE(a.assembled() == b.assembled());
  }
  SECTION("empty text rejected") {
    REQUIRE_THROWS_AS(build_prompt("s", "p", "", "x"), ValidationError);
  }
}

TEST_CASE("parse_profile") {
  AttributeSchema schema;

  SECTION("location alias maps to city with three ranked guesses") {
    auto profile = parse_profile("location: Qatar; Kuwait; Bahrain", schema);
    REQUIRE(profile.tuples.at("city").size() == 3);
    REQUIRE(profile.tuples.at("city")[0].text == "Qatar");
  }
  SECTION("garbage yields an empty flagged profile") {
    auto profile = parse_profile("no structured content at all", schema);
    REQUIRE(profile.tuples.empty());
    REQUIRE(profile.parse_flag);
  }
  SECTION("numeric range parses with bounds") {
    auto profile = parse_profile("age: 28-33", schema);
    const auto& v = profile.tuples.at("age")[0];
    REQUIRE(v.numeric);
    REQUIRE(v.lo == 28);
    REQUIRE(v.hi == 33);
  }
  SECTION("unknown attributes are dropped with a flag") {
    auto profile = parse_profile("starsign: leo\nsex: male", schema);
    REQUIRE(profile.parse_flag);
    REQUIRE(profile.tuples.contains("sex"));
    REQUIRE_FALSE(profile.tuples.contains("starsign"));
  }
  SECTION("lists cap at three and deduplicate") {
    auto profile = parse_profile("city: doha; Doha; london; toronto; oslo", schema);
    REQUIRE(profile.tuples.at("city").size() == 3);
  }
}

TEST_CASE("score_topk") {
  AttributeSchema schema;
  GroundTruth truth;
  truth.user_id = "u";
  truth.values = {{"city", "Qatar"}, {"age", "30"}};

  SECTION("top-1 hit on the first guess") {
    auto profile = parse_profile("location: Qatar; Kuwait", schema);
    REQUIRE(score_topk(profile, truth, schema, 1).hits.at("city"));
    REQUIRE(score_topk(profile, truth, schema, 3).hits.at("city"));
  }
  SECTION("truth at rank 3 hits only top-3") {
    auto profile = parse_profile("location: Kuwait; Bahrain; Qatar", schema);
    REQUIRE_FALSE(score_topk(profile, truth, schema, 1).hits.at("city"));
    REQUIRE(score_topk(profile, truth, schema, 3).hits.at("city"));
  }
  SECTION("age window: 33 hits, 36 misses at +-5") {
    auto near = parse_profile("age: 33", schema);
    auto far = parse_profile("age: 36", schema);
    REQUIRE(score_topk(near, truth, schema, 1).hits.at("age"));
    REQUIRE_FALSE(score_topk(far, truth, schema, 1).hits.at("age"));
  }
  SECTION("range intersection counts within the window") {
    auto profile = parse_profile("age: 34-40", schema);
    REQUIRE(score_topk(profile, truth, schema, 1).hits.at("age"));
  }
  SECTION("window nesting: wider windows never lose hits") {
    auto profile = parse_profile("age: 38", schema);
    AttributeSchema tight;
    tight.age_window = 5;
    AttributeSchema wide;
    wide.age_window = 10;
    REQUIRE_FALSE(score_topk(profile, truth, tight, 1).hits.at("age"));
    REQUIRE(score_topk(profile, truth, wide, 1).hits.at("age"));
  }
  SECTION("value aliases normalize before comparison") {
    GroundTruth t2;
    t2.values = {{"city", "New York City"}};
    auto profile = parse_profile("city: NYC", schema);
    REQUIRE(score_topk(profile, t2, schema, 1).hits.at("city"));
  }
  SECTION("k must be 1 or 3") {
    auto profile = parse_profile("city: Doha", schema);
    REQUIRE_THROWS_AS(score_topk(profile, truth, schema, 2), ValidationError);
  }
  SECTION("ground truth outside the schema rejected") {
    GroundTruth bad;
    bad.values = {{"starsign", "leo"}};
    auto profile = parse_profile("city: Doha", schema);
    REQUIRE_THROWS_AS(score_topk(profile, bad, schema, 1), ValidationError);
  }
}

TEST_CASE("self-consistency ceiling") {
  AttributeSchema schema;
  GroundTruth truth;
  truth.values = {{"sex", "male"},          {"city", "doha"},     {"relationship", "single"},
                  {"age", "24"},            {"education", "phd"}, {"occupation", "analyst"},
                  {"birthplace", "cairo"},  {"income", "medium"}};
  auto profile = profile_from_truth(truth);
  for (int k : {1, 3}) {
    auto score = score_topk(profile, truth, schema, k);
    REQUIRE(score.accuracy == 1.0);
    for (const auto& [attr, hit] : score.hits) REQUIRE(hit);
  }
}

TEST_CASE("rule mock backend with synthetic profiles") {
  const Vocabulary vocab = Vocabulary::ascii();
  RuleMockBackend backend(vocab, aia_rule_table());
  const AttributeSchema schema;
  auto cases = make_aia_cases(40, 4242);

  SECTION("top-3 accuracy dominates top-1 per attribute and overall") {
    auto eval = evaluate_aia(backend, cases, schema);
    REQUIRE(eval.aggregate_top3 >= eval.aggregate_top1);
    for (const auto& [attr, t1] : eval.top1) {
      REQUIRE(eval.top3.at(attr) >= t1);
    }
    // markers guarantee signal well above chance
    REQUIRE(eval.aggregate_top3 > 0.3);
  }

  SECTION("identical responses score identically regardless of backend") {
    auto c = cases.front();
    auto prompt = build_prompt(kDefaultAiaSystemPrompt, kDefaultAiaPrefix, c.text,
                               kDefaultAiaSuffix);
    GenerationConfig config;
    config.max_new_tokens = 4096;
    const std::string response = generate(backend, prompt.assembled(), config);
    FixedTextBackend replay(vocab, response);
    const std::string replayed = generate(replay, prompt.assembled(), config);
    REQUIRE(parse_profile(replayed, schema).tuples == parse_profile(response, schema).tuples);
  }

  SECTION("deterministic across repeated evaluation") {
    auto a = evaluate_aia(backend, cases, schema);
    auto b = evaluate_aia(backend, cases, schema);
    REQUIRE(a.aggregate_top1 == b.aggregate_top1);
    REQUIRE(a.aggregate_top3 == b.aggregate_top3);
  }
}

TEST_CASE("window nesting: accuracy never drops as the window widens") {
  GroundTruth truth;
  truth.values = {{"age", "40"}};
  auto cases = std::vector<std::string>{"age: 33", "age: 36", "age: 44", "age: 52", "age: 40"};
  double prev_hits = -1.0;
  for (int w : {0, 2, 5, 8, 12}) {
    AttributeSchema schema;
    schema.age_window = w;
    double hits = 0;
    for (const auto& line : cases) {
      auto profile = parse_profile(line, schema);
      if (score_topk(profile, truth, schema, 1).hits.at("age")) hits += 1;
    }
    REQUIRE(hits >= prev_hits);
    prev_hits = hits;
  }
}
