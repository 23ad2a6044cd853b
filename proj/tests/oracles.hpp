#pragma once

// Independent reference implementations used only by tests. Each one is a
// deliberately naive re-derivation of the contract, kept on a separate code
// path from the library (different data structures, different arithmetic),
// so agreement between the two is meaningful.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ccmt/similarity.hpp"
#include "ccmt/textproc.hpp"

namespace oracle {

using Tokens = std::vector<std::string>;

// --- n-gram helpers (string-joined, unlike the library's vector keys) -------

inline std::map<std::string, double> grams(const Tokens& toks, int n) {
  std::map<std::string, double> out;
  for (int i = 0; i + n <= static_cast<int>(toks.size()); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k) key += '\x1f';
      key += toks[i + k];
    }
    out[key] += 1.0;
  }
  return out;
}

inline double gram_total(const std::map<std::string, double>& g) {
  double t = 0;
  for (const auto& [k, v] : g) t += v;
  return t;
}

// --- BLEU --------------------------------------------------------------------

inline double naive_bleu(const std::vector<Tokens>& hyps,
                         const std::vector<std::vector<Tokens>>& refs) {
  double hyp_len = 0, ref_len = 0;
  std::vector<double> num(4, 0), den(4, 0);
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    hyp_len += static_cast<double>(hyps[s].size());
    double best = static_cast<double>(refs[s][0].size());
    double h = static_cast<double>(hyps[s].size());
    for (const auto& r : refs[s]) {
      double rl = static_cast<double>(r.size());
      double d_new = std::fabs(rl - h), d_old = std::fabs(best - h);
      if (d_new < d_old || (d_new == d_old && rl < best)) best = rl;
    }
    ref_len += best;
    for (int n = 1; n <= 4; ++n) {
      auto hyp_grams = grams(hyps[s], n);
      std::map<std::string, double> max_ref;
      for (const auto& r : refs[s])
        for (const auto& [g, c] : grams(r, n)) max_ref[g] = std::max(max_ref[g], c);
      for (const auto& [g, c] : hyp_grams) {
        auto it = max_ref.find(g);
        num[n - 1] += std::min(c, it == max_ref.end() ? 0.0 : it->second);
      }
      den[n - 1] += std::max(0.0, h - n + 1);
    }
  }
  double product = 1.0;
  int orders = 0;
  for (int n = 0; n < 4; ++n) {
    if (den[n] == 0) continue;
    if (num[n] == 0) return 0.0;
    product *= num[n] / den[n];
    ++orders;
  }
  if (orders == 0 || hyp_len == 0) return 0.0;
  double precision = std::pow(product, 1.0 / orders);
  double bp = hyp_len >= ref_len ? 1.0 : std::exp(1.0 - ref_len / hyp_len);
  return 100.0 * bp * precision;
}

// --- SARI --------------------------------------------------------------------

struct NaiveSari {
  double add = 0, keep = 0, del = 0;
};

inline double naive_f1(double correct, double sys_total, double ref_total) {
  double p = sys_total > 0 ? correct / sys_total : (ref_total == 0 ? 1.0 : 0.0);
  double r = ref_total > 0 ? correct / ref_total : (sys_total == 0 ? 1.0 : 0.0);
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

inline NaiveSari naive_sari(const std::vector<Tokens>& sources,
                            const std::vector<Tokens>& hyps,
                            const std::vector<std::vector<Tokens>>& refs) {
  NaiveSari corpus;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    NaiveSari seg;
    for (int n = 1; n <= 4; ++n) {
      auto src = grams(sources[s], n);
      auto hyp = grams(hyps[s], n);
      std::map<std::string, double> ref;
      for (const auto& r : refs[s])
        for (const auto& [g, c] : grams(r, n)) ref[g] += c;
      for (auto& [g, c] : ref) c /= static_cast<double>(refs[s].size());

      std::set<std::string> universe;
      for (const auto& [g, c] : src) universe.insert(g);
      for (const auto& [g, c] : hyp) universe.insert(g);
      for (const auto& [g, c] : ref) universe.insert(g);

      const auto get = [](const std::map<std::string, double>& m, const std::string& g) {
        auto it = m.find(g);
        return it == m.end() ? 0.0 : it->second;
      };

      double add_c = 0, add_sys = 0, add_ref = 0;
      double keep_c = 0, keep_sys = 0, keep_ref = 0;
      double del_c = 0, del_sys = 0;
      bool del_ref_empty = true;
      for (const auto& g : universe) {
        double sc = get(src, g), hc = get(hyp, g), rc = get(ref, g);
        double sys_add = std::max(0.0, hc - sc), ref_add = std::max(0.0, rc - sc);
        add_c += std::min(sys_add, ref_add);
        add_sys += sys_add;
        add_ref += ref_add;
        double sys_keep = std::min(hc, sc), ref_keep = std::min(rc, sc);
        keep_c += std::min(sys_keep, ref_keep);
        keep_sys += sys_keep;
        keep_ref += ref_keep;
        double sys_del = std::max(0.0, sc - hc), ref_del = std::max(0.0, sc - rc);
        del_c += std::min(sys_del, ref_del);
        del_sys += sys_del;
        if (ref_del > 0) del_ref_empty = false;
      }
      seg.add += naive_f1(add_c, add_sys, add_ref);
      seg.keep += naive_f1(keep_c, keep_sys, keep_ref);
      seg.del += del_sys > 0 ? del_c / del_sys : (del_ref_empty ? 1.0 : 0.0);
    }
    corpus.add += seg.add / 4;
    corpus.keep += seg.keep / 4;
    corpus.del += seg.del / 4;
  }
  double n_seg = static_cast<double>(sources.size());
  corpus.add /= n_seg;
  corpus.keep /= n_seg;
  corpus.del /= n_seg;
  return corpus;
}

// --- adjacency / PCC / ARI ---------------------------------------------------

inline double naive_adjacency(const std::vector<int>& out, const std::vector<int>& tgt,
                              int k) {
  int hits = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    int d = out[i] - tgt[i];
    if (d < 0) d = -d;
    if (d <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(out.size());
}

// computational formula, not the centered one the library uses
inline double naive_pcc(const std::vector<double>& xs, const std::vector<double>& ys) {
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
    syy += ys[i] * ys[i];
  }
  return (n * sxy - sx * sy) /
         (std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy));
}

inline double naive_ari(double chars, double words, double sents) {
  return 4.71 * chars / words + 0.5 * words / sents - 21.43;
}

// --- exhaustive alignment search ----------------------------------------------

// Exact optimum of the summed link scores over all monotone alignments made
// of contiguous 1-N / N-1 links (group size <= max_group) whose mean cell
// similarity clears the threshold. Plain memoized recursion over the
// "rows >= i, cols >= j remain" state.
struct ExhaustiveAligner {
  const ccmt::SimilarityMatrix& m;
  double threshold;
  int max_group;
  std::vector<std::optional<double>> memo;

  ExhaustiveAligner(const ccmt::SimilarityMatrix& matrix, double tau, int group)
      : m(matrix), threshold(tau), max_group(group),
        memo((m.n_rows + 1) * (m.n_cols + 1)) {}

  double link_score(int r0, int r1, int c0, int c1) const {
    double sum = 0;
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) sum += m.at(r, c);
    return sum / ((r1 - r0 + 1) * (c1 - c0 + 1));
  }

  double best(int i, int j) {
    const int rows = static_cast<int>(m.n_rows), cols = static_cast<int>(m.n_cols);
    if (i >= rows || j >= cols) return 0.0;
    auto& slot = memo[i * (cols + 1) + j];
    if (slot) return *slot;
    double result = std::max(best(i + 1, j), best(i, j + 1));
    for (int k = 1; k <= max_group && j + k <= cols; ++k) {  // 1-N
      double s = link_score(i, i, j, j + k - 1);
      if (s >= threshold) result = std::max(result, s + best(i + 1, j + k));
    }
    for (int k = 2; k <= max_group && i + k <= rows; ++k) {  // N-1
      double s = link_score(i, i + k - 1, j, j);
      if (s >= threshold) result = std::max(result, s + best(i + k, j + 1));
    }
    slot = result;
    return result;
  }
};

inline double exhaustive_best_score(const ccmt::SimilarityMatrix& m, double threshold,
                                    int max_group) {
  return ExhaustiveAligner(m, threshold, max_group).best(0, 0);
}

// --- random generators ---------------------------------------------------------

inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Tokens random_tokens(std::mt19937_64& rng, int max_len,
                            const std::vector<std::string>& vocab) {
  Tokens toks;
  int len = rand_int(rng, 1, max_len);
  for (int i = 0; i < len; ++i) toks.push_back(vocab[rng() % vocab.size()]);
  return toks;
}

inline ccmt::SimilarityMatrix random_matrix(std::mt19937_64& rng, int max_dim) {
  ccmt::SimilarityMatrix m;
  m.n_rows = static_cast<std::size_t>(rand_int(rng, 1, max_dim));
  m.n_cols = static_cast<std::size_t>(rand_int(rng, 1, max_dim));
  m.scores.resize(m.n_rows * m.n_cols);
  for (auto& s : m.scores)
    s = static_cast<double>(rng() >> 11) / static_cast<double>(1ull << 53);
  for (std::size_t i = 0; i < m.n_rows; ++i) m.row_labels.push_back(std::to_string(i));
  for (std::size_t j = 0; j < m.n_cols; ++j) m.col_labels.push_back(std::to_string(j));
  return m;
}

}  // namespace oracle
