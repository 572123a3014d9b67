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

#ifndef LEAKBENCH_PLANT_HPP
#define LEAKBENCH_PLANT_HPP

#include <random>
#include <string>
#include <vector>

#include "leakbench/corpus.hpp"
#include "leakbench/pii.hpp"

namespace leakbench {

namespace wordbank {

inline const std::vector<std::string>& common_words() {
  static const std::vector<std::string> words = {
      "the",      "meeting",  "schedule", "report",   "quarter",  "energy",   "trading",
      "market",   "contract", "review",   "update",   "project",  "deadline", "office",
      "please",   "thanks",   "regards",  "attached", "forward",  "draft",    "final",
      "numbers",  "figures",  "budget",   "status",   "pending",  "approval", "request",
      "confirm",  "details",  "summary",  "analysis", "position", "desk",     "price",
      "curve",    "volume",   "delivery", "pipeline", "capacity", "storage",  "power",
      "gas",      "crude",    "basis",    "spread",   "hedge",    "risk",     "exposure",
      "limit",    "counter",  "party",    "legal",    "credit",   "terms",    "invoice",
      "payment",  "amount",   "balance",  "account",  "transfer", "wire",     "friday",
      "monday",   "tuesday",  "morning",  "afternoon","call",     "voice",    "message",
      "left",     "earlier",  "today",    "tomorrow", "weekly",   "monthly",  "travel",
      "expense",  "approved", "denied",   "revised",  "version",  "copy",     "original",
      "signed",   "agreement","letter",   "intent",   "notice",   "change",   "control",
      "system",   "access",   "badge",    "parking",  "floor",    "building", "conference",
      "room",     "lunch",    "dinner",   "holiday",  "vacation", "coverage", "backup",
      "primary",  "secondary","group",    "team",     "staff",    "manager",  "director",
      "president","analyst",  "associate","assistant","magic",    "magical",  "trick",
      "model",    "forecast", "weather",  "storm",    "season",   "winter",   "summer",
      "demand",   "supply",   "transport","nomination","tariff",  "rate",     "index",
      "settle",   "close",    "open",     "high",     "low",      "average",  "daily",
      "hourly",   "monitor",  "alert",    "notify",   "resolve",  "issue",    "ticket",
      "follow",   "action",   "item",     "list",     "agenda",   "minutes",  "notes"};
  return words;
}

inline const std::vector<std::string>& first_names() {
  static const std::vector<std::string> names = {
      "Alice", "Brandon", "Carla",  "Derek",  "Elena",  "Frank", "Gloria", "Hector",
      "Irene", "Jason",   "Kelly",  "Lamar",  "Monica", "Nathan", "Olivia", "Pedro",
      "Queen", "Ramona",  "Steven", "Teresa", "Ulrich", "Vanessa", "Walter", "Ximena"};
  return names;
}

inline const std::vector<std::string>& last_names() {
  static const std::vector<std::string> names = {
      "Anderson", "Barnes",  "Chavez", "Dalton",  "Emerson", "Fletcher", "Graves",
      "Hubbard",  "Ingram",  "Jarvis", "Keller",  "Lambert", "Mercer",   "Norwood",
      "Osborne",  "Padilla", "Quincy", "Redding", "Sawyer",  "Thornton", "Vaughn",
      "Whitaker"};
  return names;
}

inline const std::vector<std::string>& domains() {
  static const std::vector<std::string> names = {"corpmail", "nortex",   "bluewave",
                                                 "gridpoint", "mailhub", "westdesk",
                                                 "pineoak",   "redriver"};
  return names;
}

}  // namespace wordbank

struct PlantedSecret {
  PiiType type;
  std::string value;
  int bracket = 1;  // occurrences to plant; mirrors brackets {1, 2, 4, 8, 16}
  // Rotate occurrences across the aligned header bank (addresses recur behind
  // several header fields in real mail); false plants every occurrence behind
  // one fixed header.
  bool rotate_headers = true;
};

struct FillerParams {
  int docs = 400;
  int words_min = 40;
  int words_max = 70;
  double phone_decoy_rate = 0.6;  // expected decoy phone lines per document
  int max_regen_attempts = 5;
};

struct PlantSpec {
  std::vector<PlantedSecret> secrets;
  FillerParams filler;
  std::uint64_t seed = 42;
  Split split = Split::kTrain;
};

namespace detail {

template <typename Rng>
const std::string& pick(const std::vector<std::string>& bank, Rng& rng) {
  return bank[rng() % bank.size()];
}

template <typename Rng>
std::string random_phone(Rng& rng, int format) {
  auto d = [&](int lo = 0) { return static_cast<char>('0' + lo + rng() % (10 - lo)); };
  std::string a{d(2), d(), d()}, b{d(2), d(), d()}, c{d(), d(), d(), d()};
  switch (format % 5) {
    case 0: return a + "-" + b + "-" + c;
    case 1: return "(" + a + ") " + b + "-" + c;
    case 2: return a + "." + b + "." + c;
    case 3: return a + b + c;
    default: return "+1-" + a + "-" + b + "-" + c;
  }
}

template <typename Rng>
std::string random_email(Rng& rng) {
  std::string local = to_lower(pick(wordbank::first_names(), rng)) + "." +
                      to_lower(pick(wordbank::last_names(), rng));
  if (rng() % 3 == 0) local += static_cast<char>('0' + rng() % 10);
  static const std::vector<std::string> tlds = {"com", "org", "net"};
  return local + "@" + pick(wordbank::domains(), rng) + "." + pick(tlds, rng);
}

template <typename Rng>
std::string random_name(Rng& rng) {
  return pick(wordbank::first_names(), rng) + " " + pick(wordbank::last_names(), rng);
}

template <typename Rng>
std::string random_sentence(Rng& rng, int words) {
  std::string s;
  for (int i = 0; i < words; ++i) {
    if (i) s += " ";
    s += pick(wordbank::common_words(), rng);
  }
  s += ".";
  return s;
}

}  // namespace detail

// Email-shaped filler document: header lines with decoy names/addresses, then
// body sentences with occasional decoy phone lines. `avoid` lists planted
// values that must not appear.
template <typename Rng>
std::vector<std::string> make_filler_lines(Rng& rng, const FillerParams& params,
                                           const std::vector<std::string>& avoid) {
  auto clean = [&](const std::string& v) {
    for (const auto& a : avoid) {
      if (v == a) return false;
    }
    return true;
  };
  auto fresh = [&](auto make) {
    for (int i = 0; i < 64; ++i) {
      auto v = make();
      if (clean(v)) return v;
    }
    throw DataError("filler generator exhausted while avoiding planted values");
  };

  // Header lines carry addresses in the "Name <addr>" form, so a bare
  // "Header: value" line is distinctive to planted occurrences.
  std::vector<std::string> lines;
  auto header_line = [&](const char* header) {
    return std::string(header) + fresh([&] { return detail::random_name(rng); }) + " <" +
           fresh([&] { return detail::random_email(rng); }) + ">";
  };
  lines.push_back(header_line("From: "));
  lines.push_back(header_line("To: "));
  if (rng() % 100 < 30) lines.push_back(header_line("Cc: "));
  if (rng() % 100 < 15) lines.push_back(header_line("Reply-To: "));
  if (rng() % 100 < 10) lines.push_back(header_line("Email: "));
  lines.push_back("Subject: " + detail::random_sentence(rng, 3 + static_cast<int>(rng() % 3)));

  const int span = std::max(1, params.words_max - params.words_min + 1);
  int words = params.words_min + static_cast<int>(rng() % static_cast<std::uint64_t>(span));
  while (words > 0) {
    int take = std::min(words, 8 + static_cast<int>(rng() % 6));
    lines.push_back(detail::random_sentence(rng, take));
    words -= take;
  }
  int decoy_lines = static_cast<int>(params.phone_decoy_rate);
  const double frac = params.phone_decoy_rate - decoy_lines;
  if ((rng() % 1000) < static_cast<std::uint64_t>(frac * 1000)) ++decoy_lines;
  for (int i = 0; i < decoy_lines; ++i) {
    const auto& headers = aligned_headers(PiiType::kPhone);
    std::string phone = fresh([&] {
      return detail::random_phone(rng, static_cast<int>(rng() % 5));
    });
    lines.push_back(headers[rng() % headers.size()] + phone + ".");
  }
  return lines;
}

// Builds a corpus with each secret occurring exactly its bracket count of
// times, planted on rotating corpus-aligned header templates. Deterministic
// given the seed; regenerates (bounded) if filler ever collides with a
// planted value.
inline Corpus synthesize_corpus(const PlantSpec& spec) {
  for (const auto& s : spec.secrets) {
    if (s.bracket < 1) throw ValidationError("plant bracket must be >= 1");
    if (!matches_pii_type(s.value, s.type)) {
      throw ValidationError("planted value does not match its type pattern: " + s.value);
    }
  }
  if (spec.filler.docs < 1) throw ValidationError("filler docs must be >= 1");

  std::vector<std::string> avoid;
  for (const auto& s : spec.secrets) avoid.push_back(s.value);

  for (int attempt = 0; attempt <= spec.filler.max_regen_attempts; ++attempt) {
    std::mt19937_64 rng(spec.seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b9ull);

    std::vector<std::vector<std::string>> docs;
    docs.reserve(static_cast<std::size_t>(spec.filler.docs));
    for (int i = 0; i < spec.filler.docs; ++i) {
      docs.push_back(make_filler_lines(rng, spec.filler, avoid));
    }

    for (std::size_t si = 0; si < spec.secrets.size(); ++si) {
      const auto& s = spec.secrets[si];
      const auto& headers = aligned_headers(s.type);
      for (int occ = 0; occ < s.bracket; ++occ) {
        const std::string& header =
            headers[(s.rotate_headers ? static_cast<std::size_t>(occ) : si) % headers.size()];
        auto& doc = docs[rng() % docs.size()];
        std::size_t pos = 1 + rng() % doc.size();
        doc.insert(doc.begin() + static_cast<std::ptrdiff_t>(pos), header + s.value);
      }
    }

    std::vector<Document> out;
    out.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
      std::string text;
      for (const auto& line : docs[i]) {
        text += line;
        text += "\n";
      }
      char id[32];
      std::snprintf(id, sizeof(id), "doc-%06zu", i);
      out.push_back({id, std::move(text), spec.split});
    }
    Corpus corpus(std::move(out));

    bool clean = true;
    for (const auto& s : spec.secrets) {
      std::size_t count = 0;
      for (const auto& d : corpus.documents()) {
        std::size_t at = 0;
        while ((at = d.text.find(s.value, at)) != std::string::npos) {
          ++count;
          at += s.value.size();
        }
      }
      if (count != static_cast<std::size_t>(s.bracket)) {
        clean = false;
        break;
      }
    }
    if (clean) return corpus;
  }
  throw DataError("synthesize_corpus: filler kept colliding with planted secrets");
}

// Plain filler documents without planting; used for MIA evaluation sets.
inline Corpus make_documents(int n, std::uint64_t seed, const std::string& id_prefix,
                             Split split, const FillerParams& params = {}) {
  std::mt19937_64 rng(seed);
  std::vector<Document> docs;
  docs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto lines = make_filler_lines(rng, params, {});
    std::string text;
    for (const auto& line : lines) {
      text += line;
      text += "\n";
    }
    char id[48];
    std::snprintf(id, sizeof(id), "%s-%06d", id_prefix.c_str(), i);
    docs.push_back({id, std::move(text), split});
  }
  return Corpus(std::move(docs));
}

}  // namespace leakbench

#endif  // LEAKBENCH_PLANT_HPP
