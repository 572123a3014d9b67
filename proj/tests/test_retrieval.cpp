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

#include <cstdio>

#include "leakbench/copygen.hpp"
#include "leakbench/plant.hpp"
#include "leakbench/rag.hpp"
#include "leakbench/retrieval.hpp"

using namespace leakbench;
using Catch::Approx;

namespace {

Corpus toy_corpus() {
  return Corpus({{"d0", "apple banana apple", Split::kMember},
                 {"d1", "banana cherry", Split::kMember},
                 {"d2", "cherry date fig", Split::kMember}});
}

}  // namespace

TEST_CASE("bm25 index") {
  auto corpus = toy_corpus();
  Bm25Index index(corpus);

  SECTION("every document resolvable") {
    auto r = index.retrieve("apple banana cherry date", 10);
    REQUIRE(r.entries.size() == 3);
  }

  SECTION("golden scores from the formula, computed independently") {
    // idf = ln(1 + (N - df + 0.5) / (df + 0.5)); k1 = 1.2, b = 0.75
    auto r = index.retrieve("apple", 1);
    REQUIRE(r.entries.size() == 1);
    REQUIRE(r.entries[0].first == "d0");
    REQUIRE(r.entries[0].second == Approx(1.3028373474).margin(1e-8));

    auto r2 = index.retrieve("apple banana", 2);
    REQUIRE(r2.entries[0].first == "d0");
    REQUIRE(r2.entries[0].second == Approx(1.7499759352).margin(1e-8));
    REQUIRE(r2.entries[1].first == "d1");
    REQUIRE(r2.entries[1].second == Approx(0.5235483465).margin(1e-8));
  }

  SECTION("self-retrieval ranks the document first") {
    auto r = index.retrieve(corpus.at(1).text, 3);
    REQUIRE(r.entries.front().first == "d1");
  }

  SECTION("repeated term outranks single occurrence") {
    Corpus c({{"a", "zebra zebra other words", Split::kTrain},
              {"b", "zebra words other thing", Split::kTrain}});
    Bm25Index idx(c);
    auto r = idx.retrieve("zebra", 2);
    REQUIRE(r.entries.front().first == "a");
  }

  SECTION("no shared terms means empty result") {
    REQUIRE(index.retrieve("quasar", 3).entries.empty());
  }

  SECTION("K larger than the corpus returns all matching docs") {
    auto r = index.retrieve("cherry", 100);
    REQUIRE(r.entries.size() == 2);
  }

  SECTION("K must be >= 1") {
    REQUIRE_THROWS_AS(index.retrieve("apple", 0), ValidationError);
  }

  SECTION("determinism across rebuilds") {
    Bm25Index again(toy_corpus());
    auto a = index.retrieve("banana cherry", 3);
    auto b = again.retrieve("banana cherry", 3);
    REQUIRE(a.entries == b.entries);
  }

  SECTION("empty corpus rejected") {
    REQUIRE_THROWS_AS(Bm25Index(Corpus()), ValidationError);
  }
}

TEST_CASE("hashed cosine index") {
  auto corpus = toy_corpus();
  HashedCosineIndex index(corpus);
  SECTION("self similarity dominates") {
    auto r = index.retrieve("apple banana apple", 3);
    REQUIRE(r.entries.front().first == "d0");
    REQUIRE(r.entries.front().second == Approx(1.0).margin(1e-9));
  }
  SECTION("scores nonincreasing") {
    auto r = index.retrieve("banana cherry fig", 3);
    for (std::size_t i = 1; i < r.entries.size(); ++i) {
      REQUIRE(r.entries[i].second <= r.entries[i - 1].second + 1e-12);
    }
  }
}

TEST_CASE("index persistence") {
  auto corpus = toy_corpus();
  auto index = build_index(corpus, "bm25");
  const std::string path = "index_test.json";
  save_index(*index, path);

  SECTION("reload against the same corpus works") {
    auto loaded = load_index(path, corpus);
    REQUIRE(loaded->retrieve("apple", 1).entries == index->retrieve("apple", 1).entries);
  }
  SECTION("fingerprint mismatch is an error") {
    Corpus other({{"x", "different corpus entirely", Split::kTrain}});
    REQUIRE_THROWS_AS(load_index(path, other), DataError);
  }
  std::remove(path.c_str());

  SECTION("unknown index kind rejected") {
    REQUIRE_THROWS_AS(build_index(corpus, "faiss"), ValidationError);
  }
}

TEST_CASE("rag prompt assembly") {
  SECTION("system, then query, then retrieved texts, in order") {
    auto prompt = assemble_prompt(PromptStyle::kRegular, "SYS", "the query",
                                  {"first doc", "second doc"});
    const auto sys = prompt.find("SYS");
    const auto query = prompt.find("the query");
    const auto d1 = prompt.find("first doc");
    const auto d2 = prompt.find("second doc");
    REQUIRE(sys != std::string::npos);
    REQUIRE(query != std::string::npos);
    REQUIRE(d1 != std::string::npos);
    REQUIRE(sys < query);
    REQUIRE(query < d1);
    REQUIRE(d1 < d2);
  }

  SECTION("styles change the wrapper, not the content") {
    auto regular = assemble_prompt(PromptStyle::kRegular, "S", "q", {"doc"});
    auto cot = assemble_prompt(PromptStyle::kCot, "S", "q", {"doc"});
    REQUIRE(regular != cot);
    REQUIRE(cot.find("step by step") != std::string::npos);
  }
}

TEST_CASE("rag_answer") {
  auto members = make_documents(6, 101, "mem", Split::kMember);
  auto index = build_index(members, "bm25");
  Vocabulary vocab = Vocabulary::ascii();
  CopyGeneratorBackend backend(vocab);

  RagPipeline pipeline;
  pipeline.index = index.get();
  pipeline.corpus = &members;
  pipeline.backend = &backend;
  pipeline.k = 3;
  pipeline.generation.max_new_tokens = 4096;

  SECTION("member query surfaces the document and the echo contains it") {
    const auto& doc = members.at(2);
    auto answer = rag_answer(pipeline, doc.text);
    REQUIRE(answer.retrieved.entries.front().first == doc.id);
    REQUIRE(answer.response.find(doc.text.substr(0, 20)) != std::string::npos);
  }

  SECTION("prompt style never changes the retrieved set") {
    const std::string query = members.at(1).text;
    auto base = rag_answer(pipeline, query);
    for (PromptStyle style : {PromptStyle::kRtoc, PromptStyle::kCot, PromptStyle::kCrispe}) {
      RagPipeline styled = pipeline;
      styled.style = style;
      auto answer = rag_answer(styled, query);
      REQUIRE(answer.retrieved.entries == base.retrieved.entries);
    }
  }

  SECTION("K = 0 is a precondition violation") {
    RagPipeline bad = pipeline;
    bad.k = 0;
    REQUIRE_THROWS_AS(rag_answer(bad, "anything"), ValidationError);
  }
}

TEST_CASE("copy generator answer-key echo") {
  Vocabulary vocab = Vocabulary::ascii();
  CopyGeneratorBackend backend(vocab);
  GenerationConfig config;
  config.max_new_tokens = 256;

  SECTION("explicit answer-key line in context") {
    const std::string prompt = assemble_prompt(
        PromptStyle::kRegular, "", "fill [Mask_1] please", {"notes say [Mask_1] = foo here"});
    auto out = backend.generate_text(prompt, config);
    REQUIRE(out);
    REQUIRE(out->find("Mask_1: foo") != std::string::npos);
  }

  SECTION("refusal without context") {
    auto out = backend.generate_text("[QUERY]\nfill [Mask_1]\n", config);
    REQUIRE(out);
    REQUIRE(*out == kRefusalText);
  }

  SECTION("alignment reconstructs a masked word from the retrieved document") {
    const std::string original = "the quarterly report listed unusual basis spreads today";
    const std::string masked = "the quarterly report listed [Mask_1] basis spreads today";
    const std::string prompt = assemble_prompt(PromptStyle::kRegular, "", masked, {original});
    auto out = backend.generate_text(prompt, config);
    REQUIRE(out);
    REQUIRE(out->find("Mask_1: unusual") != std::string::npos);
  }
}
