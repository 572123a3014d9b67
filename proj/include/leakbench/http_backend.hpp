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

#ifndef LEAKBENCH_HTTP_BACKEND_HPP
#define LEAKBENCH_HTTP_BACKEND_HPP

#include <cmath>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "leakbench/backend.hpp"

namespace leakbench {

// Adapter for external model servers speaking the two-endpoint protocol:
//   POST /v1/logprobs  {context: [token strings], top_k}  -> {tokens, logprobs}
//   POST /v1/generate  {prompt, max_new_tokens, strategy} -> {text}
// Tokens the server omits are filled at the floor; the distribution is then
// renormalized in log space to keep the backend contract.
class HttpBackend : public ModelBackend {
 public:
  HttpBackend(Vocabulary vocab, std::string host, int port, int timeout_ms = 5000,
              int retries = 2)
      : vocab_(std::move(vocab)), host_(std::move(host)), port_(port),
        timeout_ms_(timeout_ms), retries_(retries) {}

  const Vocabulary& vocab() const override { return vocab_; }
  std::string kind() const override { return "http"; }

  std::vector<double> next_token_logprobs(std::span<const TokenId> context) const override {
    nlohmann::json body;
    auto& ctx = body["context"] = nlohmann::json::array();
    for (TokenId t : context) ctx.push_back(vocab_.lookup(t));
    body["top_k"] = vocab_.size();

    const auto response = post("/v1/logprobs", body);
    const auto& tokens = response.at("tokens");
    const auto& logprobs = response.at("logprobs");
    if (tokens.size() != logprobs.size()) {
      throw BackendError("http backend: tokens/logprobs size mismatch");
    }

    std::vector<double> dist(vocab_.size(), kLogFloor);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (auto id = vocab_.id(tokens[i].get<std::string>())) {
        dist[*id] = logprobs[i].get<double>();
      }
    }
    // log-space renormalization
    double max = dist[0];
    for (double v : dist) max = std::max(max, v);
    double sum = 0.0;
    for (double v : dist) sum += std::exp(v - max);
    const double lse = max + std::log(sum);
    for (double& v : dist) v -= lse;
    return dist;
  }

  std::optional<std::string> generate_text(const std::string& prompt,
                                           const GenerationConfig& config) const override {
    nlohmann::json body;
    body["prompt"] = prompt;
    body["max_new_tokens"] = config.max_new_tokens;
    body["strategy"] = config.strategy == GenerationConfig::Strategy::kGreedy ? "greedy" : "top-k";
    return post("/v1/generate", body).at("text").get<std::string>();
  }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body) const {
    for (int attempt = 0; attempt <= retries_; ++attempt) {
      httplib::Client client(host_, port_);
      client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
      client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
      auto res = client.Post(path, body.dump(), "application/json");
      if (res && res->status == 200) {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
          throw BackendError(std::string("http backend: bad response json: ") + e.what());
        }
      }
    }
    throw BackendError("http backend unavailable: " + host_ + ":" + std::to_string(port_) + path);
  }

  Vocabulary vocab_;
  std::string host_;
  int port_;
  int timeout_ms_;
  int retries_;
};

// Hosts any ModelBackend over the same protocol; used to wire the built-in
// models to external tooling and to test the adapter end to end.
class BackendServer {
 public:
  explicit BackendServer(const ModelBackend& backend) : backend_(backend) {
    server_.Post("/v1/logprobs", [this](const httplib::Request& req, httplib::Response& res) {
      handle_logprobs(req, res);
    });
    server_.Post("/v1/generate", [this](const httplib::Request& req, httplib::Response& res) {
      handle_generate(req, res);
    });
  }

  ~BackendServer() { stop(); }

  // Binds 127.0.0.1 on a free port and serves until stop().
  int start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw BackendError("backend server: cannot bind");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  int port() const { return port_; }

 private:
  void handle_logprobs(const httplib::Request& req, httplib::Response& res) {
    try {
      const auto body = nlohmann::json::parse(req.body);
      std::vector<TokenId> context;
      for (const auto& tok : body.at("context")) {
        auto id = backend_.vocab().id(tok.get<std::string>());
        context.push_back(id.value_or(Vocabulary::kUnk));
      }
      const std::size_t top_k =
          std::min<std::size_t>(body.value("top_k", backend_.vocab().size()),
                                backend_.vocab().size());
      auto dist = backend_.next_token_logprobs(context);
      std::vector<TokenId> order(dist.size());
      for (TokenId t = 0; t < order.size(); ++t) order[t] = t;
      std::stable_sort(order.begin(), order.end(),
                       [&](TokenId a, TokenId b) { return dist[a] > dist[b]; });

      nlohmann::json out;
      auto& tokens = out["tokens"] = nlohmann::json::array();
      auto& logprobs = out["logprobs"] = nlohmann::json::array();
      for (std::size_t i = 0; i < top_k; ++i) {
        tokens.push_back(backend_.vocab().lookup(order[i]));
        logprobs.push_back(dist[order[i]]);
      }
      res.set_content(out.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  }

  void handle_generate(const httplib::Request& req, httplib::Response& res) {
    try {
      const auto body = nlohmann::json::parse(req.body);
      GenerationConfig config;
      config.max_new_tokens = body.value("max_new_tokens", 256);
      config.strategy = body.value("strategy", "greedy") == "top-k"
                            ? GenerationConfig::Strategy::kTopK
                            : GenerationConfig::Strategy::kGreedy;
      if (config.strategy == GenerationConfig::Strategy::kTopK) config.k = body.value("k", 10);
      const std::string text =
          generate(backend_, body.at("prompt").get<std::string>(), config);
      res.set_content(nlohmann::json{{"text", text}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  }

  const ModelBackend& backend_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace leakbench

#endif  // LEAKBENCH_HTTP_BACKEND_HPP
