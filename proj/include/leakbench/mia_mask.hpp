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

#ifndef LEAKBENCH_MIA_MASK_HPP
#define LEAKBENCH_MIA_MASK_HPP

#include <algorithm>
#include <array>
#include <regex>
#include <string>
#include <vector>

#include "leakbench/backend.hpp"
#include "leakbench/rag.hpp"

namespace leakbench {

// Words proxy difficulty never ranks; difficulty should order content words.
inline bool is_stop_word(std::string_view word) {
  static const std::array<const char*, 50> kStopWords = {
      "the", "a",    "an",   "and",  "or",   "but",  "if",   "then", "of",   "to",
      "in",  "on",   "at",   "by",   "for",  "with", "from", "as",   "is",   "are",
      "was", "were", "be",   "been", "it",   "its",  "this", "that", "these","those",
      "he",  "she",  "they", "we",   "you",  "i",    "his",  "her",  "their","our",
      "not", "no",   "so",   "do",   "did",  "can",  "will", "would","has",  "have"};
  for (const char* s : kStopWords) {
    if (word == s) return true;
  }
  return false;
}

struct RankedTerm {
  std::string term;
  std::size_t word_pos = 0;   // index into the whitespace word sequence
  double difficulty = 0.0;    // mean NLL of the term's characters under the proxy
};

namespace detail {

inline std::string strip_punct(std::string_view w) {
  std::size_t b = 0, e = w.size();
  while (b < e && !std::isalnum(static_cast<unsigned char>(w[b]))) ++b;
  while (e > b && !std::isalnum(static_cast<unsigned char>(w[e - 1]))) --e;
  return std::string(w.substr(b, e - b));
}

}  // namespace detail

// Scores each content word by how hard the proxy model finds it to predict
// from its left context (teacher-forced over the document), ranked hardest
// first. Stop words and bare punctuation are excluded.
inline std::vector<RankedTerm> proxy_difficulty(const ModelBackend& proxy, const Document& doc) {
  const Vocabulary& vocab = proxy.vocab();
  const auto seq = vocab.tokenize(doc.text);

  // Character offsets for each whitespace word.
  std::vector<RankedTerm> terms;
  const auto words = split_words(doc.text);
  std::size_t char_cursor = 0;
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // [begin, end) char offsets
  for (const auto& w : words) {
    auto at = doc.text.find(w, char_cursor);
    spans.emplace_back(at, at + w.size());
    char_cursor = at + w.size();
  }

  // Per-character NLL over the whole document in one pass. Token index equals
  // codepoint index; ASCII fixtures keep byte and codepoint offsets aligned,
  // and multi-byte text only shifts which characters a span covers.
  std::vector<double> nll(seq.ids.size(), 0.0);
  for (std::size_t i = 0; i < seq.ids.size(); ++i) {
    nll[i] = -proxy.logprob_of(std::span(seq.ids).first(i), seq.ids[i]);
  }

  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    const std::string bare = detail::strip_punct(words[wi]);
    if (bare.empty()) continue;
    if (is_stop_word(to_lower(bare))) continue;
    const auto [b, e] = spans[wi];
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = b; i < e && i < nll.size(); ++i) {
      sum += nll[i];
      ++count;
    }
    if (count == 0) continue;
    terms.push_back({words[wi], wi, sum / static_cast<double>(count)});
  }
  std::stable_sort(terms.begin(), terms.end(), [](const RankedTerm& a, const RankedTerm& b) {
    return a.difficulty > b.difficulty;
  });
  return terms;
}

struct MaskProbe {
  std::string doc_id;
  std::string masked_text;               // placeholders [Mask_1..m] in document order
  std::vector<std::string> answer_key;   // answer_key[i] was removed at [Mask_{i+1}]
  std::size_t mask_count = 0;
  bool reduced = false;  // fewer eligible terms than requested
};

// Replaces the top-m difficult, pairwise non-adjacent terms with [Mask_i]
// placeholders numbered in document order. When adjacency filtering leaves
// fewer than m eligible terms, the probe is built with what remains and
// flagged.
inline MaskProbe make_masks(const Document& doc, const std::vector<RankedTerm>& ranking,
                            std::size_t m) {
  if (m < 1) throw ValidationError("make_masks: m must be >= 1");
  std::vector<std::size_t> chosen;
  for (const auto& term : ranking) {
    if (chosen.size() >= m) break;
    bool adjacent = false;
    for (std::size_t pos : chosen) {
      if (pos + 1 == term.word_pos || term.word_pos + 1 == pos) {
        adjacent = true;
        break;
      }
    }
    if (!adjacent) chosen.push_back(term.word_pos);
  }
  if (chosen.empty()) throw ValidationError("make_masks: no eligible terms");

  MaskProbe probe;
  probe.doc_id = doc.id;
  probe.reduced = chosen.size() < m;
  probe.mask_count = chosen.size();
  std::sort(chosen.begin(), chosen.end());

  auto words = split_words(doc.text);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    probe.answer_key.push_back(words[chosen[i]]);
    words[chosen[i]] = "[Mask_" + std::to_string(i + 1) + "]";
  }
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) text += " ";
    text += words[i];
  }
  probe.masked_text = std::move(text);
  return probe;
}

struct MaskResult {
  std::vector<std::string> predictions;
  double mask_accuracy = 0.0;
  bool retrieval_hit = false;
  bool is_member_decision = false;
  std::string failure = "none";  // none | retrieval | generation
  bool unparseable = false;
};

// Parses the strict "Mask_i: value" response format; masks the generator never
// answered stay empty.
inline std::vector<std::string> parse_mask_response(const std::string& response, std::size_t m) {
  std::vector<std::string> predictions(m);
  static const std::regex line_re(R"(Mask_(\d+)\s*:\s*(.*))");
  std::size_t start = 0;
  while (start <= response.size()) {
    const auto nl = response.find('\n', start);
    const std::string line =
        response.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    std::smatch match;
    if (std::regex_match(line, match, line_re)) {
      const std::size_t idx = static_cast<std::size_t>(std::stoul(match.str(1)));
      if (idx >= 1 && idx <= m) predictions[idx - 1] = trim(match.str(2));
    }
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return predictions;
}

// Sends the masked document itself as the retrieval probe and parses the
// reconstruction. Returns predictions plus whether the target document was
// retrieved.
inline std::pair<std::vector<std::string>, bool> reconstruct(const RagPipeline& pipeline,
                                                             const MaskProbe& probe) {
  auto answer = rag_answer(pipeline, probe.masked_text);
  bool hit = false;
  for (const auto& [id, score] : answer.retrieved.entries) {
    if (id == probe.doc_id) {
      hit = true;
      break;
    }
  }
  return {parse_mask_response(answer.response, probe.mask_count), hit};
}

inline std::string normalize_prediction(std::string_view s) {
  return collapse_whitespace(to_lower(trim(s)));
}

// Exact-match fraction after normalization; optional single-edit misspelling
// correction for predictions of length >= 5.
inline double mask_accuracy(const std::vector<std::string>& predictions,
                            const std::vector<std::string>& answer_key,
                            bool misspelling_correction = true) {
  if (predictions.size() != answer_key.size()) {
    throw ValidationError("mask_accuracy: prediction/key length mismatch");
  }
  if (answer_key.empty()) throw ValidationError("mask_accuracy: empty key");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const std::string p = normalize_prediction(predictions[i]);
    const std::string k = normalize_prediction(answer_key[i]);
    if (p == k) {
      ++hits;
    } else if (misspelling_correction && p.size() >= 5 && edit_distance(p, k) <= 1) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

// Threshold decision plus failure attribution for member documents.
inline MaskResult mask_decide(double accuracy, double gamma, bool is_member, bool retrieval_hit) {
  if (gamma <= 0.0 || gamma > 1.0) throw ValidationError("gamma must be in (0, 1]");
  MaskResult r;
  r.mask_accuracy = accuracy;
  r.retrieval_hit = retrieval_hit;
  r.is_member_decision = accuracy >= gamma;
  if (is_member && !retrieval_hit) {
    r.failure = "retrieval";
  } else if (is_member && retrieval_hit && accuracy < gamma) {
    r.failure = "generation";
  }
  return r;
}

}  // namespace leakbench

#endif  // LEAKBENCH_MIA_MASK_HPP
