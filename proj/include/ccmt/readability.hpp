#pragma once

// Readability scoring: Automated Readability Index, Flesch reading ease,
// grade discretization and Pearson correlation.

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccmt/common.hpp"
#include "ccmt/textproc.hpp"
#include "ccmt/unicode.hpp"

namespace ccmt {

struct TextStats {
  long chars = 0;  // Unicode letters and digits only
  long words = 0;  // tokens containing at least one letter or digit
  long sents = 0;

  bool operator==(const TextStats&) const = default;
};

inline bool is_word_token(const std::string& token) {
  for (std::size_t i = 0; i < token.size();) {
    if (uni::is_alnum(uni::decode_one(token, i))) return true;
  }
  return false;
}

// Counts via the shared normalization/tokenization/sentence-split rules,
// so stats are deterministic across modules. Empty text gives (0,0,0).
inline TextStats text_stats(std::string_view text) {
  std::string norm = normalize(text);
  TextStats stats;
  if (norm.empty()) return stats;
  for (std::size_t i = 0; i < norm.size();)
    if (uni::is_alnum(uni::decode_one(norm, i))) ++stats.chars;
  for (const auto& tok : tokenize(norm).tokens)
    if (is_word_token(tok)) ++stats.words;
  stats.sents = static_cast<long>(split_sentences(norm).size());
  return stats;
}

// ARI = 4.71 * chars/words + 0.5 * words/sents - 21.43
inline double ari(const TextStats& stats) {
  if (stats.words < 1 || stats.sents < 1)
    throw Error("ari: undefined for words=" + std::to_string(stats.words) +
                " sents=" + std::to_string(stats.sents));
  return 4.71 * (static_cast<double>(stats.chars) / static_cast<double>(stats.words)) +
         0.5 * (static_cast<double>(stats.words) / static_cast<double>(stats.sents)) - 21.43;
}

// Round half away from zero, clamp to [1, 14].
inline int ari_grade(double score) {
  double rounded = score >= 0 ? std::floor(score + 0.5) : std::ceil(score - 0.5);
  if (rounded < 1) return 1;
  if (rounded > 14) return 14;
  return static_cast<int>(rounded);
}

struct GradeEstimate {
  double raw = 0.0;
  int grade = 1;
};

// Total wrapper used by batch paths: text with no words scores the formula
// floor (-21.43, grade 1) instead of raising.
inline GradeEstimate estimate_grade(std::string_view text) {
  TextStats stats = text_stats(text);
  if (stats.words < 1 || stats.sents < 1) return {-21.43, 1};
  double raw = ari(stats);
  return {raw, ari_grade(raw)};
}

// Vowel-group heuristic: maximal runs of aeiouy (accented Latin vowels
// included), minus a silent final e, minimum 1 per word.
inline long syllable_count(std::string_view word) {
  static constexpr std::u32string_view kVowels =
      U"aeiouyàáâãäåèéêëìíîïòóôõöùúûüýÿ";
  long runs = 0;
  bool in_run = false;
  char32_t last_letter = 0;
  for (std::size_t i = 0; i < word.size();) {
    char32_t cp = uni::to_lower(uni::decode_one(word, i));
    if (!uni::is_letter(cp)) {
      in_run = false;
      continue;
    }
    last_letter = cp;
    bool vowel = kVowels.find(cp) != std::u32string_view::npos;
    if (vowel && !in_run) ++runs;
    in_run = vowel;
  }
  if (last_letter == U'e' && runs > 0) --runs;
  return runs > 0 ? runs : (last_letter != 0 ? 1 : 0);
}

inline long syllable_count(const TokenizedText& text) {
  long total = 0;
  for (const auto& tok : text.tokens)
    if (is_word_token(tok)) total += syllable_count(tok);
  return total;
}

// Flesch reading ease = 206.835 - 1.015 * words/sents - 84.6 * syllables/words.
// Higher means simpler.
inline double flesch(const TextStats& stats, long syllables) {
  if (stats.words < 1 || stats.sents < 1)
    throw Error("flesch: undefined for words=" + std::to_string(stats.words) +
                " sents=" + std::to_string(stats.sents));
  return 206.835 -
         1.015 * (static_cast<double>(stats.words) / static_cast<double>(stats.sents)) -
         84.6 * (static_cast<double>(syllables) / static_cast<double>(stats.words));
}

inline double flesch(std::string_view text) {
  TextStats stats = text_stats(text);
  return flesch(stats, syllable_count(tokenize(normalize(text))));
}

// Sample Pearson correlation coefficient.
inline double pcc(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error("pcc: length mismatch");
  const std::size_t n = xs.size();
  if (n < 2) throw Error("pcc: need at least 2 points");
  double mean_x = 0, mean_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double cov = 0, var_x = 0, var_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - mean_x, dy = ys[i] - mean_y;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  if (var_x == 0 || var_y == 0) throw Error("pcc: undefined for a constant sequence");
  double r = cov / std::sqrt(var_x * var_y);
  return r < -1.0 ? -1.0 : (r > 1.0 ? 1.0 : r);
}

inline double pcc(const std::vector<double>& xs, const std::vector<double>& ys) {
  return pcc(std::span<const double>(xs), std::span<const double>(ys));
}

}  // namespace ccmt
