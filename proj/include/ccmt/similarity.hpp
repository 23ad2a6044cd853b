#pragma once

// Bag-of-words TF-IDF vectors and cosine similarity matrices between the
// text units (paragraphs or sentences) of two documents. The IDF corpus is
// the union of the two documents being aligned, so alignment stays a pure
// per-document-pair decision.

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccmt/common.hpp"
#include "ccmt/textproc.hpp"
#include "ccmt/unicode.hpp"

namespace ccmt {

struct TfidfModel {
  std::unordered_map<std::string, int> vocabulary;  // lowercased token -> dense column
  std::vector<long> df;                             // units containing the token
  std::vector<double> idf;                          // ln((N+1)/(df+1)) + 1
  long n_docs = 0;

  bool fitted() const { return n_docs > 0; }
};

inline TfidfModel fit_tfidf(const std::vector<TokenizedText>& units) {
  if (units.empty()) throw Error("fit_tfidf: no units");
  TfidfModel model;
  model.n_docs = static_cast<long>(units.size());
  std::vector<int> seen_in;  // column -> last unit index counted, for df
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (const auto& tok : units[u].tokens) {
      std::string key = uni::lowercase(tok);
      auto [it, inserted] = model.vocabulary.emplace(std::move(key),
                                                     static_cast<int>(model.df.size()));
      if (inserted) {
        model.df.push_back(0);
        seen_in.push_back(-1);
      }
      int col = it->second;
      if (seen_in[col] != static_cast<int>(u)) {
        seen_in[col] = static_cast<int>(u);
        ++model.df[col];
      }
    }
  }
  model.idf.resize(model.df.size());
  for (std::size_t c = 0; c < model.df.size(); ++c)
    model.idf[c] = std::log(static_cast<double>(model.n_docs + 1) /
                            static_cast<double>(model.df[c] + 1)) +
                   1.0;
  return model;
}

// Sparse L2-normalized weight vector, sorted by column index.
using SparseVector = std::vector<std::pair<int, double>>;

// weight(t) = raw term count * idf(t); out-of-vocabulary tokens dropped;
// L2-normalized unless all-zero.
inline SparseVector vectorize(const TfidfModel& model, const TokenizedText& unit) {
  std::unordered_map<int, double> counts;
  for (const auto& tok : unit.tokens) {
    auto it = model.vocabulary.find(uni::lowercase(tok));
    if (it != model.vocabulary.end()) counts[it->second] += 1.0;
  }
  SparseVector vec;
  vec.reserve(counts.size());
  for (const auto& [col, count] : counts) vec.emplace_back(col, count * model.idf[col]);
  std::sort(vec.begin(), vec.end());
  double norm_sq = 0.0;
  for (const auto& [col, w] : vec) norm_sq += w * w;
  if (norm_sq > 0.0) {
    double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [col, w] : vec) w *= inv;
  }
  return vec;
}

inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first)
      ++i;
    else if (a[i].first > b[j].first)
      ++j;
    else
      s += a[i++].second * b[j++].second;
  }
  return s;
}

struct SimilarityMatrix {
  std::size_t n_rows = 0, n_cols = 0;
  std::vector<double> scores;  // row-major, each in [0, 1]
  std::vector<std::string> row_labels, col_labels;

  double at(std::size_t i, std::size_t j) const { return scores[i * n_cols + j]; }
  double& at(std::size_t i, std::size_t j) { return scores[i * n_cols + j]; }
};

inline SimilarityMatrix similarity_matrix(const TfidfModel& model,
                                          const std::vector<TokenizedText>& src_units,
                                          const std::vector<TokenizedText>& tgt_units,
                                          std::vector<std::string> row_labels = {},
                                          std::vector<std::string> col_labels = {}) {
  if (!model.fitted()) throw Error("similarity_matrix: model not fitted");
  if (src_units.empty() || tgt_units.empty())
    throw Error("similarity_matrix: empty unit list");
  SimilarityMatrix m;
  m.n_rows = src_units.size();
  m.n_cols = tgt_units.size();
  m.scores.assign(m.n_rows * m.n_cols, 0.0);
  if (row_labels.empty())
    for (std::size_t i = 0; i < m.n_rows; ++i) row_labels.push_back(std::to_string(i));
  if (col_labels.empty())
    for (std::size_t j = 0; j < m.n_cols; ++j) col_labels.push_back(std::to_string(j));
  if (row_labels.size() != m.n_rows || col_labels.size() != m.n_cols)
    throw Error("similarity_matrix: label count does not match units");
  m.row_labels = std::move(row_labels);
  m.col_labels = std::move(col_labels);

  std::vector<SparseVector> src_vecs, tgt_vecs;
  src_vecs.reserve(m.n_rows);
  tgt_vecs.reserve(m.n_cols);
  for (const auto& u : src_units) src_vecs.push_back(vectorize(model, u));
  for (const auto& u : tgt_units) tgt_vecs.push_back(vectorize(model, u));
  for (std::size_t i = 0; i < m.n_rows; ++i)
    for (std::size_t j = 0; j < m.n_cols; ++j)
      m.at(i, j) = dot(src_vecs[i], tgt_vecs[j]);  // vectors are unit-length or zero
  return m;
}

// Debug dump: one "row-label<TAB>col-label<TAB>score" line per cell.
inline void write_matrix_tsv(const SimilarityMatrix& m, std::ostream& os) {
  os.precision(17);
  for (std::size_t i = 0; i < m.n_rows; ++i)
    for (std::size_t j = 0; j < m.n_cols; ++j)
      os << m.row_labels[i] << '\t' << m.col_labels[j] << '\t' << m.at(i, j) << '\n';
}

}  // namespace ccmt
