#pragma once

// Translation and simplification scoring: corpus BLEU-4, SARI against a
// pseudo-source, ARI-grade adjacency accuracy and the aggregate report.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccmt/common.hpp"
#include "ccmt/readability.hpp"
#include "ccmt/textproc.hpp"

namespace ccmt {

// Corpus-level BLEU-4 on a [0,100] scale: geometric mean of clipped
// modified n-gram precisions pooled over the corpus, times the brevity
// penalty min(1, e^(1 - r/c)) where r sums each segment's closest reference
// length. No smoothing: any pooled precision with a zero numerator gives 0.
// Orders whose pooled denominator is zero (corpus shorter than n) drop out
// of the mean, so BLEU(h, h) = 100 even for very short corpora.
inline double bleu(const std::vector<TokenizedText>& hypotheses,
                   const std::vector<std::vector<TokenizedText>>& references,
                   int max_order = 4) {
  if (hypotheses.empty()) throw Error("bleu: empty corpus");
  if (hypotheses.size() != references.size())
    throw Error("bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                std::to_string(references.size()) + " reference sets");

  std::vector<long> matched(max_order, 0), total(max_order, 0);
  long hyp_len = 0, ref_len = 0;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto& hyp = hypotheses[s];
    const auto& refs = references[s];
    if (refs.empty()) throw Error("bleu: segment " + std::to_string(s + 1) + " has no reference");
    long h = static_cast<long>(hyp.tokens.size());
    hyp_len += h;
    // closest reference length; ties go to the shorter reference
    long best_r = static_cast<long>(refs[0].tokens.size());
    for (const auto& r : refs) {
      long rl = static_cast<long>(r.tokens.size());
      if (std::labs(rl - h) < std::labs(best_r - h) ||
          (std::labs(rl - h) == std::labs(best_r - h) && rl < best_r))
        best_r = rl;
    }
    ref_len += best_r;
    for (int n = 1; n <= max_order; ++n) {
      NgramMultiset hyp_grams = ngrams(hyp, n);
      std::map<std::vector<std::string>, long> clip;
      for (const auto& r : refs)
        for (const auto& [gram, c] : ngrams(r, n).counts)
          clip[gram] = std::max(clip[gram], c);
      for (const auto& [gram, c] : hyp_grams.counts) {
        auto it = clip.find(gram);
        matched[n - 1] += std::min(c, it == clip.end() ? 0L : it->second);
      }
      total[n - 1] += std::max(0L, h - n + 1);
    }
  }

  double log_sum = 0.0;
  int effective_orders = 0;
  for (int n = 0; n < max_order; ++n) {
    if (total[n] == 0) continue;
    if (matched[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched[n]) / static_cast<double>(total[n]));
    ++effective_orders;
  }
  if (effective_orders == 0 || hyp_len == 0) return 0.0;
  double log_prec = log_sum / effective_orders;
  double bp = hyp_len >= ref_len
                  ? 1.0
                  : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  return 100.0 * bp * std::exp(log_prec);
}

// One scoring unit: system output with the pseudo-source it improves on,
// the reference translations, and the requested target grade.
struct EvalTriple {
  TokenizedText pseudo_source;
  TokenizedText hypothesis;
  std::vector<TokenizedText> references;
  int target_grade = 0;
};

struct SariScore {
  double add = 0.0;   // [0,1]
  double keep = 0.0;  // [0,1]
  double del = 0.0;   // [0,1]

  double overall() const { return (add + keep + del) / 3.0; }
};

namespace detail {

using GramCounts = std::map<std::vector<std::string>, double>;

inline GramCounts gram_counts(const TokenizedText& text, int n) {
  GramCounts out;
  for (const auto& [gram, c] : ngrams(text, n).counts) out[gram] = static_cast<double>(c);
  return out;
}

inline double total(const GramCounts& g) {
  double t = 0;
  for (const auto& [gram, c] : g) t += c;
  return t;
}

inline GramCounts saturating_minus(const GramCounts& a, const GramCounts& b) {
  GramCounts out;
  for (const auto& [gram, c] : a) {
    auto it = b.find(gram);
    double d = c - (it == b.end() ? 0.0 : it->second);
    if (d > 1e-12) out[gram] = d;
  }
  return out;
}

inline GramCounts counts_min(const GramCounts& a, const GramCounts& b) {
  GramCounts out;
  for (const auto& [gram, c] : a) {
    auto it = b.find(gram);
    if (it == b.end()) continue;
    double m = std::min(c, it->second);
    if (m > 1e-12) out[gram] = m;
  }
  return out;
}

// Precision of the system multiset against the reference multiset, with
// the empty-set convention: both empty scores 1, one-sided empty scores 0.
inline double multiset_precision(const GramCounts& sys, const GramCounts& ref) {
  double sys_total = total(sys), ref_total = total(ref);
  if (sys_total == 0.0) return ref_total == 0.0 ? 1.0 : 0.0;
  return total(counts_min(sys, ref)) / sys_total;
}

inline double multiset_f1(const GramCounts& sys, const GramCounts& ref) {
  double sys_total = total(sys), ref_total = total(ref);
  double correct = total(counts_min(sys, ref));
  double p = sys_total > 0 ? correct / sys_total : (ref_total == 0.0 ? 1.0 : 0.0);
  double r = ref_total > 0 ? correct / ref_total : (sys_total == 0.0 ? 1.0 : 0.0);
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

}  // namespace detail

// SARI over added / kept / deleted n-grams (n = 1..4), with reference
// counts averaged over the reference set. Per segment and order:
//   ADD  = F1 of (hyp \ src) against (refs \ src)
//   KEEP = F1 of (hyp ∩ src) against (refs ∩ src)
//   DEL  = precision of (src \ hyp) against (src \ refs)
// all as multiset operations; a category whose system and reference sides
// are both empty scores 1. Scores average over orders, then segments.
inline SariScore sari(const std::vector<EvalTriple>& triples, int max_order = 4) {
  if (triples.empty()) throw Error("sari: empty corpus");
  SariScore corpus;
  for (const auto& t : triples) {
    if (t.references.empty()) throw Error("sari: triple without references");
    double add_sum = 0, keep_sum = 0, del_sum = 0;
    for (int n = 1; n <= max_order; ++n) {
      detail::GramCounts src = detail::gram_counts(t.pseudo_source, n);
      detail::GramCounts hyp = detail::gram_counts(t.hypothesis, n);
      detail::GramCounts refs;  // averaged over the reference set
      for (const auto& r : t.references)
        for (const auto& [gram, c] : detail::gram_counts(r, n)) refs[gram] += c;
      for (auto& [gram, c] : refs) c /= static_cast<double>(t.references.size());

      add_sum += detail::multiset_f1(detail::saturating_minus(hyp, src),
                                     detail::saturating_minus(refs, src));
      keep_sum += detail::multiset_f1(detail::counts_min(hyp, src),
                                      detail::counts_min(refs, src));
      del_sum += detail::multiset_precision(detail::saturating_minus(src, hyp),
                                            detail::saturating_minus(src, refs));
    }
    corpus.add += add_sum / max_order;
    corpus.keep += keep_sum / max_order;
    corpus.del += del_sum / max_order;
  }
  const double n_seg = static_cast<double>(triples.size());
  corpus.add /= n_seg;
  corpus.keep /= n_seg;
  corpus.del /= n_seg;
  return corpus;
}

// Fraction of positions whose grades differ by at most k.
inline double adjacency_accuracy(std::span<const int> output_grades,
                                 std::span<const int> target_grades, int k) {
  if (output_grades.size() != target_grades.size())
    throw Error("adjacency_accuracy: length mismatch");
  if (output_grades.empty()) throw Error("adjacency_accuracy: empty input");
  if (k < 0) throw Error("adjacency_accuracy: window must be >= 0");
  long hits = 0;
  for (std::size_t i = 0; i < output_grades.size(); ++i)
    if (std::abs(output_grades[i] - target_grades[i]) <= k) ++hits;
  return static_cast<double>(hits) / static_cast<double>(output_grades.size());
}

struct MetricReport {
  double bleu = 0.0;               // [0,100]
  SariScore sari;                  // components in [0,1]; reported x100
  std::optional<double> pcc;      // absent when a grade sequence is constant
  std::map<int, double> adjacency;  // window k -> accuracy
  long n_segments = 0;
};

struct EvaluateOptions {
  bool pcc_on_raw_scores = false;  // default: PCC over discretized ARI grades
};

// Scores parallel line corpora. Texts are consumed as given (no
// detokenization or truecasing) and tokenized with the shared tokenizer.
// PCC correlates the ARI complexity of system outputs with that of the
// first reference; adjacency compares ARI grades of outputs against the
// requested target grades.
inline MetricReport evaluate_lines(const std::vector<std::string>& hyp_lines,
                                   const std::vector<std::vector<std::string>>& ref_line_sets,
                                   const std::vector<std::string>& src_lines,
                                   const std::vector<int>& target_grades,
                                   const EvaluateOptions& opts = {}) {
  const std::size_t n = hyp_lines.size();
  if (n == 0) throw Error("evaluate: empty corpus");
  for (const auto& refs : ref_line_sets)
    if (refs.size() != n)
      throw Error("evaluate: reference file has " + std::to_string(refs.size()) +
                  " lines, expected " + std::to_string(n));
  if (ref_line_sets.empty()) throw Error("evaluate: no reference file");
  if (src_lines.size() != n)
    throw Error("evaluate: source file has " + std::to_string(src_lines.size()) +
                " lines, expected " + std::to_string(n));
  if (target_grades.size() != n)
    throw Error("evaluate: grades file has " + std::to_string(target_grades.size()) +
                " lines, expected " + std::to_string(n));

  std::vector<TokenizedText> hyps;
  std::vector<std::vector<TokenizedText>> refs(n);
  std::vector<EvalTriple> triples;
  std::vector<int> out_grades;
  std::vector<double> out_complexity, ref_complexity;
  for (std::size_t i = 0; i < n; ++i) {
    TokenizedText hyp = tokenize(normalize(hyp_lines[i]));
    for (const auto& ref_lines : ref_line_sets)
      refs[i].push_back(tokenize(normalize(ref_lines[i])));
    EvalTriple t;
    t.pseudo_source = tokenize(normalize(src_lines[i]));
    t.hypothesis = hyp;
    t.references = refs[i];
    t.target_grade = target_grades[i];
    triples.push_back(std::move(t));
    hyps.push_back(std::move(hyp));

    GradeEstimate out_est = estimate_grade(hyp_lines[i]);
    GradeEstimate ref_est = estimate_grade(ref_line_sets[0][i]);
    out_grades.push_back(out_est.grade);
    out_complexity.push_back(opts.pcc_on_raw_scores ? out_est.raw
                                                    : static_cast<double>(out_est.grade));
    ref_complexity.push_back(opts.pcc_on_raw_scores ? ref_est.raw
                                                    : static_cast<double>(ref_est.grade));
  }

  MetricReport report;
  report.n_segments = static_cast<long>(n);
  report.bleu = bleu(hyps, refs);
  report.sari = sari(triples);
  try {
    report.pcc = pcc(out_complexity, ref_complexity);
  } catch (const Error&) {
    report.pcc.reset();  // constant sequence or a single segment
  }
  report.adjacency[1] = adjacency_accuracy(out_grades, target_grades, 1);
  report.adjacency[2] = adjacency_accuracy(out_grades, target_grades, 2);
  return report;
}

inline MetricReport evaluate(const std::string& hyp_path,
                             const std::vector<std::string>& ref_paths,
                             const std::string& src_path, const std::string& grades_path,
                             const EvaluateOptions& opts = {}) {
  std::vector<std::vector<std::string>> ref_line_sets;
  for (const auto& p : ref_paths) ref_line_sets.push_back(read_lines(p));
  std::vector<int> grades;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(grades_path)) {
    ++line_no;
    try {
      grades.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw Error(grades_path + ":" + std::to_string(line_no) + ": not an integer grade");
    }
  }
  return evaluate_lines(read_lines(hyp_path), ref_line_sets, read_lines(src_path), grades,
                        opts);
}

inline void to_json(nlohmann::ordered_json& j, const MetricReport& r) {
  j = nlohmann::ordered_json{
      {"bleu", r.bleu},
      {"sari",
       {{"add", 100.0 * r.sari.add},
        {"keep", 100.0 * r.sari.keep},
        {"del", 100.0 * r.sari.del},
        {"overall", 100.0 * r.sari.overall()}}},
      {"pcc", r.pcc ? nlohmann::ordered_json(*r.pcc) : nullptr},
      {"adjacency", nlohmann::ordered_json::object()},
      {"n_segments", r.n_segments}};
  for (const auto& [k, acc] : r.adjacency) j["adjacency"][std::to_string(k)] = acc;
}

}  // namespace ccmt
