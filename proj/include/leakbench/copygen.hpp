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

#ifndef LEAKBENCH_COPYGEN_HPP
#define LEAKBENCH_COPYGEN_HPP

#include <map>
#include <regex>
#include <string>
#include <vector>

#include "leakbench/backend.hpp"
#include "leakbench/rag.hpp"

namespace leakbench {

inline constexpr const char* kRefusalText = "I cannot answer based on the provided context.";

namespace detail {

struct PromptSegments {
  std::string query;
  std::vector<std::string> docs;
  bool has_context = false;
};

inline PromptSegments parse_prompt_segments(const std::string& prompt) {
  PromptSegments seg;
  const auto qb = prompt.find(kQueryBegin);
  const auto cb = prompt.find(kContextBegin);
  const auto ce = prompt.find(kContextEnd);
  if (qb != std::string::npos) {
    const auto start = qb + std::string(kQueryBegin).size();
    const auto end = cb != std::string::npos ? cb : prompt.size();
    seg.query = trim(prompt.substr(start, end - start));
  } else {
    seg.query = prompt;
  }
  if (cb != std::string::npos && ce != std::string::npos && ce > cb) {
    seg.has_context = true;
    const auto start = cb + std::string(kContextBegin).size();
    std::string ctx = prompt.substr(start, ce - start);
    static const std::regex doc_marker(R"(\[DOC \d+\]\n)");
    std::sregex_token_iterator it(ctx.begin(), ctx.end(), doc_marker, -1);
    for (std::sregex_token_iterator end; it != end; ++it) {
      std::string piece = trim(it->str());
      if (!piece.empty()) seg.docs.push_back(std::move(piece));
    }
  }
  return seg;
}

inline bool is_mask_token(const std::string& word, int* index_out = nullptr) {
  static const std::regex mask_re(R"(\[Mask_(\d+)\])");
  std::smatch m;
  if (!std::regex_match(word, m, mask_re)) return false;
  if (index_out) *index_out = std::stoi(m.str(1));
  return true;
}

// Locates `pattern` as a word subsequence inside `words`; first match wins.
inline std::ptrdiff_t find_subsequence(const std::vector<std::string>& words,
                                       const std::vector<std::string>& pattern) {
  if (pattern.empty() || words.size() < pattern.size()) return -1;
  for (std::size_t i = 0; i + pattern.size() <= words.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < pattern.size(); ++j) {
      if (words[i + j] != pattern[j]) {
        ok = false;
        break;
      }
    }
    if (ok) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

}  // namespace detail

// Deterministic oracle generator for RAG experiments. On mask-filling probes
// it reconstructs each [Mask_i] by aligning the probe's surrounding words
// against the retrieved context (explicit "[Mask_i] = value" answer-key lines
// in the context take precedence); on plain queries it echoes the top
// retrieved document. Without usable context it emits a fixed refusal.
class CopyGeneratorBackend : public ModelBackend {
 public:
  explicit CopyGeneratorBackend(Vocabulary vocab) : vocab_(std::move(vocab)) {}

  const Vocabulary& vocab() const override { return vocab_; }
  std::string kind() const override { return "copy-generator"; }

  std::vector<double> next_token_logprobs(std::span<const TokenId>) const override {
    return std::vector<double>(vocab_.size(), -std::log(static_cast<double>(vocab_.size())));
  }

  std::optional<std::string> generate_text(const std::string& prompt,
                                           const GenerationConfig&) const override {
    auto seg = detail::parse_prompt_segments(prompt);
    if (!seg.has_context || seg.docs.empty()) return std::string(kRefusalText);

    if (seg.query.find("[Mask_") != std::string::npos) {
      return fill_masks(seg);
    }
    return seg.docs.front();
  }

 private:
  std::string fill_masks(const detail::PromptSegments& seg) const {
    std::string context_all;
    for (const auto& d : seg.docs) {
      context_all += d;
      context_all += "\n";
    }
    std::map<int, std::string> answers;

    // Explicit answer-key lines anywhere in the retrieved context.
    static const std::regex key_line(R"(\[Mask_(\d+)\]\s*=\s*(\S+))");
    for (auto it = std::sregex_iterator(context_all.begin(), context_all.end(), key_line);
         it != std::sregex_iterator(); ++it) {
      answers[std::stoi(it->str(1))] = it->str(2);
    }

    const auto probe_words = split_words(seg.query);

    // Positional alignment: a retrieved document that matches the probe word
    // for word outside the placeholders is the source document, and answers
    // read off directly.
    for (const auto& doc : seg.docs) {
      const auto doc_words = split_words(doc);
      if (doc_words.size() != probe_words.size()) continue;
      bool aligned = true;
      for (std::size_t i = 0; i < probe_words.size() && aligned; ++i) {
        if (!detail::is_mask_token(probe_words[i]) && probe_words[i] != doc_words[i]) {
          aligned = false;
        }
      }
      if (!aligned) continue;
      for (std::size_t i = 0; i < probe_words.size(); ++i) {
        int idx = 0;
        if (detail::is_mask_token(probe_words[i], &idx) && !answers.contains(idx)) {
          answers[idx] = doc_words[i];
        }
      }
      break;
    }

    const auto context_words = split_words(context_all);
    for (std::size_t i = 0; i < probe_words.size(); ++i) {
      int idx = 0;
      if (!detail::is_mask_token(probe_words[i], &idx)) continue;
      if (answers.contains(idx)) continue;

      // Preceding non-mask words anchor the position in the source document.
      std::vector<std::string> before;
      for (std::size_t j = i; j > 0 && before.size() < 3;) {
        --j;
        if (detail::is_mask_token(probe_words[j])) break;
        before.insert(before.begin(), probe_words[j]);
      }
      if (!before.empty()) {
        auto at = detail::find_subsequence(context_words, before);
        if (at >= 0) {
          const std::size_t target = static_cast<std::size_t>(at) + before.size();
          if (target < context_words.size()) {
            answers[idx] = context_words[target];
            continue;
          }
        }
      }
      // Fall back to the words after the mask.
      std::vector<std::string> after;
      for (std::size_t j = i + 1; j < probe_words.size() && after.size() < 3; ++j) {
        if (detail::is_mask_token(probe_words[j])) break;
        after.push_back(probe_words[j]);
      }
      if (!after.empty()) {
        auto at = detail::find_subsequence(context_words, after);
        if (at > 0) {
          answers[idx] = context_words[static_cast<std::size_t>(at) - 1];
        }
      }
    }

    if (answers.empty()) return std::string(kRefusalText);
    std::string out;
    for (const auto& [idx, value] : answers) {
      out += "Mask_" + std::to_string(idx) + ": " + value + "\n";
    }
    return out;
  }

  Vocabulary vocab_;
};

// Wraps a generator and corrupts each reconstructed mask line independently
// with the given probability; noise is a pure function of (seed, prompt, line).
class NoisyMaskBackend : public ModelBackend {
 public:
  NoisyMaskBackend(const ModelBackend& inner, double error_rate, std::uint64_t seed)
      : inner_(inner), error_rate_(error_rate), seed_(seed) {
    if (error_rate < 0.0 || error_rate > 1.0) {
      throw ValidationError("error_rate must be in [0, 1]");
    }
  }

  const Vocabulary& vocab() const override { return inner_.vocab(); }
  std::string kind() const override { return inner_.kind(); }

  std::vector<double> next_token_logprobs(std::span<const TokenId> ctx) const override {
    return inner_.next_token_logprobs(ctx);
  }

  std::optional<std::string> generate_text(const std::string& prompt,
                                           const GenerationConfig& config) const override {
    auto text = inner_.generate_text(prompt, config);
    if (!text || error_rate_ == 0.0) return text;

    static const std::regex line_re(R"(Mask_(\d+): (.*))");
    std::string out;
    std::size_t start = 0;
    while (start <= text->size()) {
      auto nl = text->find('\n', start);
      std::string line = text->substr(start, nl == std::string::npos ? nl : nl - start);
      std::smatch m;
      if (std::regex_match(line, m, line_re)) {
        const std::uint64_t h =
            derive_seed(seed_, "noise:" + m.str(1) + ":" + hex64(fnv1a64(prompt)));
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        if (u < error_rate_) {
          line = "Mask_" + m.str(1) + ": zz" + m.str(2);  // corrupted beyond edit distance 1
        }
      }
      out += line;
      if (nl == std::string::npos) break;
      out += "\n";
      start = nl + 1;
    }
    return out;
  }

 private:
  const ModelBackend& inner_;
  double error_rate_;
  std::uint64_t seed_;
};

}  // namespace leakbench

#endif  // LEAKBENCH_COPYGEN_HPP
