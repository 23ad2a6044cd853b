#pragma once

// Deterministic text normalization, tokenization, sentence splitting,
// truecasing and n-gram extraction shared by every other module. The
// behavior is Moses-like but self-contained: determinism is the contract,
// not parity with any external script.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccmt/common.hpp"
#include "ccmt/unicode.hpp"

namespace ccmt {

struct TokenizedText {
  std::vector<std::string> tokens;
  // Byte ranges [start, end) into the normalized source text, when the
  // tokens came from tokenize(). Dropped by token-level transforms that
  // have no source string.
  std::optional<std::vector<std::pair<std::size_t, std::size_t>>> offsets;

  bool operator==(const TokenizedText& other) const { return tokens == other.tokens; }
};

inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// NFC-composes Latin base+combining-mark pairs, folds curly quotes to
// straight quotes, en/em dashes to '-', collapses whitespace runs to a
// single space and trims. Idempotent and total.
inline std::string normalize(std::string_view text) {
  std::vector<char32_t> cps = uni::decode_utf8(text);

  // compose combining marks left to right
  std::vector<char32_t> composed;
  composed.reserve(cps.size());
  for (char32_t cp : cps) {
    if (!composed.empty()) {
      if (char32_t pre = uni::compose(composed.back(), cp); pre != 0) {
        composed.back() = pre;
        continue;
      }
    }
    composed.push_back(cp);
  }

  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  bool at_start = true;
  for (char32_t cp : composed) {
    switch (cp) {
      case 0x2018:
      case 0x2019:
      case 0x201A:
        cp = U'\'';
        break;
      case 0x201C:
      case 0x201D:
      case 0x201E:
      case 0x00AB:  // «
      case 0x00BB:  // »
        cp = U'"';
        break;
      case 0x2010:
      case 0x2011:
      case 0x2013:
      case 0x2014:
      case 0x2015:
        cp = U'-';
        break;
      default:
        break;
    }
    if (uni::is_space(cp)) {
      pending_space = !at_start;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    uni::append_utf8(out, cp);
    at_start = false;
  }
  return out;
}

namespace detail {

inline bool is_detached_punct(char32_t cp) {
  switch (cp) {
    case U'.':
    case U',':
    case U';':
    case U':':
    case U'!':
    case U'?':
    case U'"':
    case U'(':
    case U')':
    case U'[':
    case U']':
    case U'%':
    case 0x00BF:  // ¿
    case 0x00A1:  // ¡
      return true;
    default:
      return false;
  }
}

}  // namespace detail

// Whitespace split followed by detaching the punctuation set
// . , ; : ! ? " ( ) [ ] % ¿ ¡ into standalone tokens. Apostrophes and
// hyphens stay attached wherever they occur, so contractions and
// compounds like "state-of-the-art" survive as one token.
inline TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  out.offsets.emplace();
  std::string current;
  std::size_t current_start = 0;
  const auto flush = [&](std::size_t end_byte) {
    if (!current.empty()) {
      out.tokens.push_back(std::move(current));
      out.offsets->emplace_back(current_start, end_byte);
      current.clear();
    }
  };
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = i;
    char32_t cp = uni::decode_one(text, i);
    if (uni::is_space(cp)) {
      flush(start);
      continue;
    }
    if (detail::is_detached_punct(cp)) {
      flush(start);
      std::string punct;
      uni::append_utf8(punct, cp);
      out.tokens.push_back(std::move(punct));
      out.offsets->emplace_back(start, i);
      continue;
    }
    if (current.empty()) current_start = start;
    uni::append_utf8(current, cp);
  }
  flush(text.size());
  return out;
}

namespace detail {

inline const std::vector<std::string>& abbreviations() {
  static const std::vector<std::string> abbrevs = {
      "Mr.", "Mrs.", "Dr.", "Sr.", "Sra.", "U.S.", "EE.UU.", "St.", "vs.", "No."};
  return abbrevs;
}

inline bool is_sentence_opener(char32_t cp) {
  return uni::is_upper(cp) || cp == U'"' || cp == U'\'' || cp == U'(' || cp == 0x00BF ||
         cp == 0x00A1;
}

}  // namespace detail

// Rule-based sentence splitter for normalized text. A boundary is a run of
// . ! ? (optionally followed by one closing quote) followed by a space and
// an uppercase letter or opening mark. A small abbreviation list (Mr.,
// Sra., EE.UU., ...) suppresses boundaries after '.'.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<char32_t> cps = uni::decode_utf8(text);
  const std::size_t n = cps.size();
  std::vector<std::string> sentences;
  std::size_t sent_begin = 0;

  const auto is_ender = [](char32_t c) { return c == U'.' || c == U'!' || c == U'?'; };

  const auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && uni::is_space(cps[begin])) ++begin;
    while (end > begin && uni::is_space(cps[end - 1])) --end;
    if (begin >= end) return;
    std::string s;
    for (std::size_t k = begin; k < end; ++k) uni::append_utf8(s, cps[k]);
    sentences.push_back(std::move(s));
  };

  std::size_t i = 0;
  while (i < n) {
    if (!is_ender(cps[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;  // last index of the .!? run
    while (run_end + 1 < n && is_ender(cps[run_end + 1])) ++run_end;
    std::size_t after = run_end + 1;
    if (after < n && (cps[after] == U'"' || cps[after] == U'\'')) ++after;
    bool boundary = after + 1 < n && cps[after] == U' ' &&
                    detail::is_sentence_opener(cps[after + 1]);
    if (boundary && cps[run_end] == U'.') {
      // look back over the non-space run ending at this period
      std::size_t w = i;
      while (w > 0 && !uni::is_space(cps[w - 1])) --w;
      std::string word;
      for (std::size_t k = w; k <= run_end; ++k) uni::append_utf8(word, cps[k]);
      for (const auto& abbr : detail::abbreviations())
        if (word == abbr) {
          boundary = false;
          break;
        }
    }
    if (boundary) {
      emit(sent_begin, after);
      sent_begin = after + 1;
    }
    i = run_end + 1;
  }
  emit(sent_begin, n);
  return sentences;
}

struct TruecaseModel {
  // lowercased token -> most frequent surface form (ties: first seen)
  std::unordered_map<std::string, std::string> casing;
  // count of the winning surface form, kept for serialization
  std::unordered_map<std::string, long> counts;
  long training_tokens = 0;

  bool empty() const { return casing.empty(); }
};

// Counts surface forms per lowercased token over the corpus, skipping the
// sentence-initial position of every text so capitalization there does not
// bias the model.
inline TruecaseModel train_truecaser(const std::vector<TokenizedText>& corpus) {
  struct Tally {
    std::unordered_map<std::string, long> by_surface;
    std::vector<std::string> seen_order;
  };
  std::unordered_map<std::string, Tally> tallies;
  long total = 0;
  for (const auto& text : corpus) {
    for (std::size_t i = 1; i < text.tokens.size(); ++i) {
      const std::string& surface = text.tokens[i];
      Tally& tally = tallies[uni::lowercase(surface)];
      if (tally.by_surface.emplace(surface, 0).second) tally.seen_order.push_back(surface);
      ++tally.by_surface[surface];
      ++total;
    }
  }
  TruecaseModel model;
  model.training_tokens = total;
  for (auto& [lower, tally] : tallies) {
    const std::string* best = nullptr;
    long best_count = 0;
    for (const auto& surface : tally.seen_order) {
      long c = tally.by_surface[surface];
      if (c > best_count) {
        best = &surface;
        best_count = c;
      }
    }
    model.casing.emplace(lower, *best);
    model.counts.emplace(lower, best_count);
  }
  return model;
}

// Replaces the sentence-initial token with the majority surface form of its
// lowercase. Unseen tokens and all later positions pass through unchanged.
inline TokenizedText apply_truecase(const TruecaseModel& model, const TokenizedText& text) {
  TokenizedText out = text;
  if (!out.tokens.empty()) {
    auto it = model.casing.find(uni::lowercase(out.tokens[0]));
    if (it != model.casing.end()) out.tokens[0] = it->second;
  }
  return out;
}

// TSV lines "lowercased<TAB>surface<TAB>count", sorted by key.
inline void save_truecase_model(const TruecaseModel& model, std::ostream& os) {
  std::map<std::string, std::string> sorted(model.casing.begin(), model.casing.end());
  for (const auto& [lower, surface] : sorted) {
    long c = 0;
    if (auto it = model.counts.find(lower); it != model.counts.end()) c = it->second;
    os << lower << '\t' << surface << '\t' << c << '\n';
  }
}

inline void save_truecase_model(const TruecaseModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open truecase model for writing: " + path);
  save_truecase_model(model, os);
}

inline TruecaseModel load_truecase_model(std::istream& is) {
  TruecaseModel model;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw Error("malformed truecase model line " + std::to_string(line_no));
    std::string lower = line.substr(0, t1);
    std::string surface = line.substr(t1 + 1, t2 - t1 - 1);
    long count = std::stol(line.substr(t2 + 1));
    if (uni::lowercase(surface) != lower)
      throw Error("truecase model line " + std::to_string(line_no) +
                  ": surface does not lowercase to key");
    model.casing[lower] = surface;
    model.counts[lower] = count;
    model.training_tokens += count;
  }
  return model;
}

inline TruecaseModel load_truecase_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open truecase model: " + path);
  return load_truecase_model(is);
}

struct NgramMultiset {
  int order = 1;
  std::map<std::vector<std::string>, long> counts;

  long total() const {
    long t = 0;
    for (const auto& [gram, c] : counts) t += c;
    return t;
  }
};

inline NgramMultiset ngrams(const TokenizedText& text, int n) {
  if (n < 1) throw Error("n-gram order must be >= 1");
  NgramMultiset out;
  out.order = n;
  const auto& toks = text.tokens;
  if (static_cast<int>(toks.size()) < n) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i)
    ++out.counts[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  return out;
}

}  // namespace ccmt
