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

#include "leakbench/http_backend.hpp"
#include "leakbench/ngram.hpp"

using namespace leakbench;
using Catch::Approx;

TEST_CASE("http adapter round trip against a served model") {
  Corpus corpus({{"d0", "the cat sat on the mat and the cat sat again", Split::kTrain}});
  NgramModel model(corpus, 3);
  BackendServer server(model);
  const int port = server.start();
  HttpBackend remote(model.vocab(), "127.0.0.1", port, 2000, 1);

  SECTION("logprobs match the wrapped model and keep the contract") {
    auto ctx = model.vocab().tokenize("the c").ids;
    auto local = model.next_token_logprobs(ctx);
    auto served = remote.next_token_logprobs(ctx);
    REQUIRE(served.size() == local.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < served.size(); ++t) {
      REQUIRE(served[t] <= 1e-12);
      REQUIRE(served[t] == Approx(local[t]).margin(1e-6));
      sum += std::exp(served[t]);
    }
    REQUIRE(std::abs(sum - 1.0) < 1e-9);
  }

  SECTION("generate proxies through the server") {
    GenerationConfig config;
    config.max_new_tokens = 4;
    REQUIRE(generate(remote, "the c", config) == generate(model, "the c", config));
  }

  SECTION("top-k truncation on the wire still yields a proper distribution") {
    httplib::Client client("127.0.0.1", port);
    nlohmann::json body;
    body["context"] = nlohmann::json::array();
    body["top_k"] = 3;
    auto res = client.Post("/v1/logprobs", body.dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    auto j = nlohmann::json::parse(res->body);
    REQUIRE(j.at("tokens").size() == 3);
  }

  server.stop();
}

TEST_CASE("unreachable backend raises a backend error") {
  auto vocab = Vocabulary::from_text("ab");
  HttpBackend remote(vocab, "127.0.0.1", 9, 200, 0);  // discard port, nothing listens
  auto ctx = vocab.tokenize("a").ids;
  REQUIRE_THROWS_AS(remote.next_token_logprobs(ctx), BackendError);
}
