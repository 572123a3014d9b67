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

#ifndef LEAKBENCH_VOCAB_HPP
#define LEAKBENCH_VOCAB_HPP

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "leakbench/common.hpp"

namespace leakbench {

struct TokenSequence {
  std::vector<TokenId> ids;
  std::string source_text;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
};

// Character-level vocabulary over UTF-8 codepoints. Ids are dense 0..size-1
// with two reserved entries: <unk> at 0 and </s> at 1. Unknown codepoints
// tokenize to <unk>; detokenize renders <unk> as U+FFFD.
class Vocabulary {
 public:
  static constexpr TokenId kUnk = 0;
  static constexpr TokenId kEos = 1;

  Vocabulary() = default;

  static Vocabulary from_text(std::string_view text) {
    std::vector<std::string_view> one{text};
    return from_texts(one);
  }

  template <typename Range>
  static Vocabulary from_texts(const Range& texts) {
    std::set<std::string> chars;
    for (const auto& t : texts) {
      std::string_view sv(t);
      std::size_t i = 0;
      while (i < sv.size()) {
        std::size_t len = codepoint_len(sv, i);
        chars.insert(std::string(sv.substr(i, len)));
        i += len;
      }
    }
    Vocabulary v;
    for (const auto& c : chars) v.add(c);
    return v;
  }

  // Printable ASCII plus common whitespace; handy for mocks and fixtures.
  static Vocabulary ascii() {
    Vocabulary v;
    v.add("\t");
    v.add("\n");
    for (char c = 0x20; c < 0x7f; ++c) v.add(std::string(1, c));
    return v;
  }

  std::size_t size() const { return tokens_.size(); }

  const std::string& lookup(TokenId id) const {
    if (id >= tokens_.size()) throw DataError("token id out of range");
    return tokens_[id];
  }

  std::optional<TokenId> id(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  TokenSequence tokenize(std::string_view text) const {
    if (tokens_.size() <= 2) throw DataError("tokenize: empty vocabulary");
    TokenSequence seq;
    seq.source_text = std::string(text);
    std::size_t i = 0;
    while (i < text.size()) {
      std::size_t len = codepoint_len(text, i);
      auto it = index_.find(std::string(text.substr(i, len)));
      seq.ids.push_back(it == index_.end() ? kUnk : it->second);
      i += len;
    }
    return seq;
  }

  std::string detokenize(std::span<const TokenId> ids) const {
    std::string out;
    for (TokenId id : ids) {
      if (id == kEos) continue;
      if (id == kUnk) {
        out += "\xEF\xBF\xBD";  // U+FFFD
        continue;
      }
      out += lookup(id);
    }
    return out;
  }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  void add(const std::string& tok) {
    if (tokens_.empty()) {
      tokens_ = {"<unk>", "</s>"};
      index_ = {{"<unk>", kUnk}, {"</s>", kEos}};
    }
    if (index_.contains(tok)) return;
    index_.emplace(tok, static_cast<TokenId>(tokens_.size()));
    tokens_.push_back(tok);
  }

  // Length in bytes of the UTF-8 codepoint starting at i; malformed bytes
  // are consumed one at a time.
  static std::size_t codepoint_len(std::string_view s, std::size_t i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if ((c & 0x80) == 0x00) len = 1;
    else if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    if (i + len > s.size()) return 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return 1;
    }
    return len;
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace leakbench

#endif  // LEAKBENCH_VOCAB_HPP
