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

#ifndef LEAKBENCH_RETRIEVAL_HPP
#define LEAKBENCH_RETRIEVAL_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "leakbench/corpus.hpp"

namespace leakbench {

struct RetrievedSet {
  std::string query;
  std::vector<std::pair<std::string, double>> entries;  // (doc id, score), nonincreasing
  std::size_t k = 0;
};

// Lowercased word unigrams.
inline std::vector<std::string> retrieval_terms(std::string_view text) {
  std::vector<std::string> terms;
  std::string cur;
  for (char c : text) {
    const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (std::isalnum(static_cast<unsigned char>(l))) {
      cur.push_back(l);
    } else if (!cur.empty()) {
      terms.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) terms.push_back(std::move(cur));
  return terms;
}

class Index {
 public:
  virtual ~Index() = default;
  virtual std::string kind() const = 0;
  virtual std::uint64_t corpus_fingerprint() const = 0;
  virtual RetrievedSet retrieve(const std::string& query, std::size_t k) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

namespace detail {

// Shared top-k selection: sort by score descending, ties by ascending doc id,
// zero scores dropped.
inline RetrievedSet select_top_k(const std::string& query,
                                 std::vector<std::pair<std::string, double>> scored,
                                 std::size_t k) {
  std::erase_if(scored, [](const auto& e) { return e.second <= 0.0; });
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > k) scored.resize(k);
  return {query, std::move(scored), k};
}

}  // namespace detail

// Okapi BM25 over an inverted index; idf = ln(1 + (N - df + 0.5)/(df + 0.5)),
// query terms deduplicated.
class Bm25Index : public Index {
 public:
  Bm25Index(const Corpus& corpus, double k1 = 1.2, double b = 0.75) : k1_(k1), b_(b) {
    if (corpus.empty()) throw ValidationError("build_index: empty corpus");
    fingerprint_ = corpus.fingerprint();
    for (const auto& doc : corpus.documents()) {
      const auto terms = retrieval_terms(doc.text);
      std::map<std::string, std::uint32_t> tf;
      for (const auto& t : terms) ++tf[t];
      const std::size_t di = doc_ids_.size();
      doc_ids_.push_back(doc.id);
      doc_len_.push_back(terms.size());
      for (const auto& [term, count] : tf) {
        postings_[term].emplace_back(di, count);
      }
    }
    double total = 0.0;
    for (std::size_t l : doc_len_) total += static_cast<double>(l);
    avg_len_ = total / static_cast<double>(doc_len_.size());
  }

  std::string kind() const override { return "bm25"; }
  std::uint64_t corpus_fingerprint() const override { return fingerprint_; }

  RetrievedSet retrieve(const std::string& query, std::size_t k) const override {
    if (k < 1) throw ValidationError("retrieve: K must be >= 1");
    std::vector<double> scores(doc_ids_.size(), 0.0);
    auto terms = retrieval_terms(query);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    const double n = static_cast<double>(doc_ids_.size());
    for (const auto& term : terms) {
      auto it = postings_.find(term);
      if (it == postings_.end()) continue;
      const double df = static_cast<double>(it->second.size());
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      for (const auto& [di, tf] : it->second) {
        const double len_norm =
            1.0 - b_ + b_ * static_cast<double>(doc_len_[di]) / avg_len_;
        scores[di] += idf * (static_cast<double>(tf) * (k1_ + 1.0)) /
                      (static_cast<double>(tf) + k1_ * len_norm);
      }
    }
    std::vector<std::pair<std::string, double>> scored;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] > 0.0) scored.emplace_back(doc_ids_[i], scores[i]);
    }
    return detail::select_top_k(query, std::move(scored), k);
  }

  nlohmann::json to_json() const override {
    nlohmann::json j;
    j["kind"] = kind();
    j["fingerprint"] = fingerprint_;
    j["k1"] = k1_;
    j["b"] = b_;
    j["doc_ids"] = doc_ids_;
    j["doc_len"] = doc_len_;
    nlohmann::json post = nlohmann::json::object();
    for (const auto& [term, list] : postings_) {
      nlohmann::json entries = nlohmann::json::array();
      for (const auto& [di, tf] : list) entries.push_back({di, tf});
      post[term] = std::move(entries);
    }
    j["postings"] = std::move(post);
    return j;
  }

 private:
  double k1_, b_;
  double avg_len_ = 0.0;
  std::uint64_t fingerprint_ = 0;
  std::vector<std::string> doc_ids_;
  std::vector<std::size_t> doc_len_;
  std::map<std::string, std::vector<std::pair<std::size_t, std::uint32_t>>> postings_;
};

// Feature-hashed bag of words, L2-normalized, cosine scoring.
class HashedCosineIndex : public Index {
 public:
  explicit HashedCosineIndex(const Corpus& corpus, std::size_t dims = 256) : dims_(dims) {
    if (corpus.empty()) throw ValidationError("build_index: empty corpus");
    if (dims_ < 2) throw ValidationError("hashed-cosine dims must be >= 2");
    fingerprint_ = corpus.fingerprint();
    for (const auto& doc : corpus.documents()) {
      doc_ids_.push_back(doc.id);
      vectors_.push_back(embed(doc.text));
    }
  }

  std::string kind() const override { return "hashed-cosine"; }
  std::uint64_t corpus_fingerprint() const override { return fingerprint_; }

  RetrievedSet retrieve(const std::string& query, std::size_t k) const override {
    if (k < 1) throw ValidationError("retrieve: K must be >= 1");
    const auto q = embed(query);
    std::vector<std::pair<std::string, double>> scored;
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      double dot = 0.0;
      for (std::size_t d = 0; d < dims_; ++d) dot += q[d] * vectors_[i][d];
      if (dot > 0.0) scored.emplace_back(doc_ids_[i], dot);
    }
    return detail::select_top_k(query, std::move(scored), k);
  }

  nlohmann::json to_json() const override {
    nlohmann::json j;
    j["kind"] = kind();
    j["fingerprint"] = fingerprint_;
    j["dims"] = dims_;
    j["doc_ids"] = doc_ids_;
    j["vectors"] = vectors_;
    return j;
  }

 private:
  std::vector<double> embed(std::string_view text) const {
    std::vector<double> v(dims_, 0.0);
    for (const auto& term : retrieval_terms(text)) {
      v[fnv1a64(term) % dims_] += 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    }
    return v;
  }

  std::size_t dims_;
  std::uint64_t fingerprint_ = 0;
  std::vector<std::string> doc_ids_;
  std::vector<std::vector<double>> vectors_;
};

inline std::unique_ptr<Index> build_index(const Corpus& corpus, const std::string& kind) {
  if (kind == "bm25") return std::make_unique<Bm25Index>(corpus);
  if (kind == "hashed-cosine") return std::make_unique<HashedCosineIndex>(corpus);
  throw ValidationError("unknown index kind: " + kind);
}

inline void save_index(const Index& index, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for write: " + path);
  out << index.to_json().dump();
}

// Rebuilds the index from the corpus and verifies the stored fingerprint; a
// mismatch means the file belongs to a different corpus.
inline std::unique_ptr<Index> load_index(const std::string& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  auto j = nlohmann::json::parse(in);
  const std::uint64_t stored = j.at("fingerprint").get<std::uint64_t>();
  if (stored != corpus.fingerprint()) {
    throw DataError("index fingerprint does not match corpus");
  }
  return build_index(corpus, j.at("kind").get<std::string>());
}

}  // namespace leakbench

#endif  // LEAKBENCH_RETRIEVAL_HPP
