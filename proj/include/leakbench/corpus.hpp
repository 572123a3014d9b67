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

#ifndef LEAKBENCH_CORPUS_HPP
#define LEAKBENCH_CORPUS_HPP

#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "leakbench/common.hpp"
#include "leakbench/vocab.hpp"

namespace leakbench {

enum class Split { kTrain, kEval, kMember, kNonMember };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kEval: return "eval";
    case Split::kMember: return "member";
    case Split::kNonMember: return "non-member";
  }
  return "train";
}

inline Split split_from_name(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "eval") return Split::kEval;
  if (name == "member") return Split::kMember;
  if (name == "non-member") return Split::kNonMember;
  throw DataError("unknown split: " + std::string(name));
}

struct Document {
  std::string id;
  std::string text;
  Split split = Split::kTrain;
};

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
    std::unordered_set<std::string> seen;
    for (const auto& d : docs_) {
      if (d.text.empty()) throw DataError("document with empty text: " + d.id);
      if (!seen.insert(d.id).second) throw DataError("duplicate document id: " + d.id);
    }
  }

  const std::vector<Document>& documents() const { return docs_; }
  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }
  const Document& at(std::size_t i) const { return docs_.at(i); }

  const Document* find(std::string_view id) const {
    for (const auto& d : docs_) {
      if (d.id == id) return &d;
    }
    return nullptr;
  }

  // Content hash; changes iff any document changes.
  std::uint64_t fingerprint() const {
    std::uint64_t h = fnv1a64("corpus");
    for (const auto& d : docs_) {
      h = fnv1a64(d.id, h);
      h = fnv1a64("\x1f", h);
      h = fnv1a64(d.text, h);
      h = fnv1a64("\x1f", h);
      h = fnv1a64(split_name(d.split), h);
      h = fnv1a64("\x1e", h);
    }
    return h;
  }

  Vocabulary build_vocabulary() const {
    std::vector<std::string_view> texts;
    texts.reserve(docs_.size());
    for (const auto& d : docs_) texts.push_back(d.text);
    return Vocabulary::from_texts(texts);
  }

  Corpus filter(Split split) const {
    std::vector<Document> kept;
    for (const auto& d : docs_) {
      if (d.split == split) kept.push_back(d);
    }
    return Corpus(std::move(kept));
  }

 private:
  std::vector<Document> docs_;
};

// On-disk form: JSON lines, one object {id, text, split} per document.
inline void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for write: " + path);
  for (const auto& d : corpus.documents()) {
    nlohmann::json j{{"id", d.id}, {"text", d.text}, {"split", split_name(d.split)}};
    out << j.dump() << "\n";
  }
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::vector<Document> docs;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line);
    docs.push_back({j.at("id").get<std::string>(), j.at("text").get<std::string>(),
                    split_from_name(j.value("split", "train"))});
  }
  return Corpus(std::move(docs));
}

}  // namespace leakbench

#endif  // LEAKBENCH_CORPUS_HPP
