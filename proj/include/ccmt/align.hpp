#pragma once

// Vicinity-driven two-level alignment between comparable documents:
// paragraphs first, then sentences inside each paragraph link. Assumes the
// order in which information appears is roughly constant across the two
// texts, so the search walks a monotone path over the similarity matrix,
// merging units into 1-N / N-1 links and skipping over bounded insertions
// and deletions. Cross-lingual alignment runs against a pivot translation
// of the source document that is sentence-aligned 1-1 with it, so every
// link maps back to the original source deterministically.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ccmt/common.hpp"
#include "ccmt/corpus.hpp"
#include "ccmt/similarity.hpp"
#include "ccmt/textproc.hpp"

namespace ccmt {

struct AlignerParams {
  double paragraph_threshold = 0.3;  // tau_p
  double sentence_threshold = 0.2;   // tau_s
  int skip_window = 3;               // max rows/cols skippable in one step
  int max_group = 3;                 // max units merged on one side of a link

  void validate() const {
    if (paragraph_threshold < 0 || paragraph_threshold > 1 || sentence_threshold < 0 ||
        sentence_threshold > 1)
      throw Error("aligner thresholds must lie in [0,1]");
    if (skip_window < 1) throw Error("skip_window must be >= 1");
    if (max_group < 1) throw Error("max_group must be >= 1");
  }
};

// 1-N or N-1 link between matrix rows and columns. score is the mean of
// the similarity cells the link covers.
struct AlignmentLink {
  std::vector<int> src_indices;
  std::vector<int> tgt_indices;
  double score = 0.0;

  bool operator==(const AlignmentLink& other) const {
    return src_indices == other.src_indices && tgt_indices == other.tgt_indices;
  }
};

struct Alignment {
  std::vector<AlignmentLink> links;

  double total_score() const {
    double t = 0.0;
    for (const auto& l : links) t += l.score;
    return t;
  }
};

// The qualifying cell (i, j) minimizing i + j; ties broken by smaller i,
// then smaller j.
inline std::optional<std::pair<int, int>> find_start(const SimilarityMatrix& m,
                                                     double threshold) {
  std::optional<std::pair<int, int>> best;
  int best_sum = 0;
  for (std::size_t i = 0; i < m.n_rows; ++i)
    for (std::size_t j = 0; j < m.n_cols; ++j) {
      if (m.at(i, j) < threshold) continue;
      int sum = static_cast<int>(i + j);
      if (!best || sum < best_sum) {
        best = {static_cast<int>(i), static_cast<int>(j)};
        best_sum = sum;
      }
    }
  return best;
}

namespace detail {

// Open link being grown by the search. Rows r0..r1 and cols c0..c1, with at
// least one side a singleton.
struct OpenLink {
  int r0, r1, c0, c1;

  AlignmentLink close(const SimilarityMatrix& m) const {
    AlignmentLink link;
    for (int r = r0; r <= r1; ++r) link.src_indices.push_back(r);
    for (int c = c0; c <= c1; ++c) link.tgt_indices.push_back(c);
    double sum = 0.0;
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) sum += m.at(r, c);
    link.score = sum / (static_cast<double>(r1 - r0 + 1) * (c1 - c0 + 1));
    return link;
  }
};

}  // namespace detail

// Greedy monotone path search. From the bottom-right cell of the open link
// the candidate moves are: diagonal advance (close the link, open a 1-1),
// extend the link right (1-N) or down (N-1) up to max_group. A candidate
// qualifies when its cell similarity is >= threshold; the best-scoring
// qualifying candidate wins, ties broken diagonal > extend-right >
// extend-down. Only when no adjacent move qualifies does the search skip:
// it closes the link and jumps to the best qualifying cell at most
// skip_window rows and columns past the diagonal neighbor (ties: smaller
// row, then column). No qualifying skip cell ends the search.
inline Alignment vicinity_align(const SimilarityMatrix& m, double threshold,
                                const AlignerParams& params) {
  params.validate();
  Alignment out;
  auto start = find_start(m, threshold);
  if (!start) return out;

  const int rows = static_cast<int>(m.n_rows);
  const int cols = static_cast<int>(m.n_cols);
  detail::OpenLink link{start->first, start->first, start->second, start->second};

  while (true) {
    const int r = link.r1, c = link.c1;
    enum Move { kDiag, kRight, kDown, kNone } move = kNone;
    double best = -1.0;

    const auto consider = [&](Move cand, int rr, int cc, bool allowed) {
      if (!allowed || rr >= rows || cc >= cols) return;
      double s = m.at(rr, cc);
      if (s < threshold) return;
      if (s > best) {
        best = s;
        move = cand;
      }
    };
    consider(kDiag, r + 1, c + 1, true);
    consider(kRight, r, c + 1, link.r0 == link.r1 && (link.c1 - link.c0 + 1) < params.max_group);
    consider(kDown, r + 1, c, link.c0 == link.c1 && (link.r1 - link.r0 + 1) < params.max_group);

    if (move == kDiag) {
      out.links.push_back(link.close(m));
      link = {r + 1, r + 1, c + 1, c + 1};
      continue;
    }
    if (move == kRight) {
      ++link.c1;
      continue;
    }
    if (move == kDown) {
      ++link.r1;
      continue;
    }

    // skip: best qualifying cell strictly past the diagonal neighbor
    std::optional<std::pair<int, int>> jump;
    double jump_score = -1.0;
    for (int dr = 0; dr <= params.skip_window; ++dr) {
      for (int dc = 0; dc <= params.skip_window; ++dc) {
        if (dr == 0 && dc == 0) continue;
        int rr = r + 1 + dr, cc = c + 1 + dc;
        if (rr >= rows || cc >= cols) continue;
        double s = m.at(rr, cc);
        if (s < threshold || s <= jump_score) continue;
        jump_score = s;
        jump = {rr, cc};
      }
    }
    out.links.push_back(link.close(m));
    if (!jump) break;
    link = {jump->first, jump->first, jump->second, jump->second};
  }

  // drop links below threshold (cannot happen with per-cell gating, kept as
  // the contract's final guard)
  std::erase_if(out.links, [&](const AlignmentLink& l) { return l.score < threshold; });
  return out;
}

// Per-paragraph sentence lists: the unit the two-level aligner works on.
using DocView = std::vector<std::vector<std::string>>;

inline DocView doc_view(const Article& article) {
  DocView view;
  view.reserve(article.paragraphs.size());
  for (const auto& p : article.paragraphs) view.push_back(p.sentences);
  return view;
}

// Pivot translation of a source-language article, sentence-aligned 1-1 with
// it: paragraph and sentence counts must match the article exactly, so
// (paragraph, sentence) coordinates carry over unchanged.
struct PivotDocument {
  std::string article_id;
  DocView paragraphs;

  static PivotDocument create(const Article& source, DocView pivot_sentences) {
    if (pivot_sentences.size() != source.paragraphs.size())
      throw Error("pivot for article '" + source.id + "': expected " +
                  std::to_string(source.paragraphs.size()) + " paragraphs, got " +
                  std::to_string(pivot_sentences.size()));
    for (std::size_t p = 0; p < pivot_sentences.size(); ++p)
      if (pivot_sentences[p].size() != source.paragraphs[p].sentences.size())
        throw Error("pivot for article '" + source.id + "': paragraph " + std::to_string(p) +
                    " expected " + std::to_string(source.paragraphs[p].sentences.size()) +
                    " sentences, got " + std::to_string(pivot_sentences[p].size()));
    return PivotDocument{source.id, std::move(pivot_sentences)};
  }
};

// Sentence-level link in global (paragraph, sentence) coordinates.
struct SentenceLink {
  std::vector<SentenceCoord> src;
  std::vector<SentenceCoord> tgt;
  double score = 0.0;
};

namespace detail {

inline TokenizedText tokenize_unit(const std::vector<std::string>& sentences) {
  return tokenize(normalize(join_tokens(sentences)));
}

inline TokenizedText tokenize_unit(const std::string& sentence) {
  return tokenize(normalize(sentence));
}

}  // namespace detail

// Two-level alignment. Stage 1 aligns whole paragraphs at the paragraph
// threshold; stage 2 aligns the sentences of each linked paragraph group at
// the sentence threshold. Sentence links never cross a paragraph-link
// boundary. The TF-IDF model of each stage is fitted on the union of both
// documents' units of that granularity.
inline std::vector<SentenceLink> align_documents(const DocView& src, const DocView& tgt,
                                                 const AlignerParams& params) {
  params.validate();
  if (src.empty() || tgt.empty()) throw Error("align_documents: empty document");

  // stage 1: paragraphs
  std::vector<TokenizedText> src_paras, tgt_paras;
  for (const auto& p : src) src_paras.push_back(detail::tokenize_unit(p));
  for (const auto& p : tgt) tgt_paras.push_back(detail::tokenize_unit(p));
  std::vector<TokenizedText> all_paras = src_paras;
  all_paras.insert(all_paras.end(), tgt_paras.begin(), tgt_paras.end());
  TfidfModel para_model = fit_tfidf(all_paras);
  SimilarityMatrix para_matrix = similarity_matrix(para_model, src_paras, tgt_paras);
  Alignment para_links = vicinity_align(para_matrix, params.paragraph_threshold, params);

  // stage 2: one sentence-level TF-IDF model over both documents
  std::vector<TokenizedText> all_sents;
  for (const auto& p : src)
    for (const auto& s : p) all_sents.push_back(detail::tokenize_unit(s));
  for (const auto& p : tgt)
    for (const auto& s : p) all_sents.push_back(detail::tokenize_unit(s));
  if (all_sents.empty()) throw Error("align_documents: documents contain no sentences");
  TfidfModel sent_model = fit_tfidf(all_sents);

  std::vector<SentenceLink> out;
  for (const auto& plink : para_links.links) {
    std::vector<SentenceCoord> src_coords, tgt_coords;
    std::vector<TokenizedText> src_sents, tgt_sents;
    for (int p : plink.src_indices)
      for (std::size_t s = 0; s < src[p].size(); ++s) {
        src_coords.push_back({p, static_cast<int>(s)});
        src_sents.push_back(detail::tokenize_unit(src[p][s]));
      }
    for (int p : plink.tgt_indices)
      for (std::size_t s = 0; s < tgt[p].size(); ++s) {
        tgt_coords.push_back({p, static_cast<int>(s)});
        tgt_sents.push_back(detail::tokenize_unit(tgt[p][s]));
      }
    if (src_sents.empty() || tgt_sents.empty()) continue;
    SimilarityMatrix sm = similarity_matrix(sent_model, src_sents, tgt_sents);
    Alignment slinks = vicinity_align(sm, params.sentence_threshold, params);
    for (const auto& l : slinks.links) {
      SentenceLink sl;
      for (int i : l.src_indices) sl.src.push_back(src_coords[i]);
      for (int j : l.tgt_indices) sl.tgt.push_back(tgt_coords[j]);
      sl.score = l.score;
      out.push_back(std::move(sl));
    }
  }
  return out;
}

// Aligned (source segment, target segment) pair with grades and score.
struct SegmentPair {
  std::string slug;
  Segment src;  // Spanish side for cross-lingual pairs
  Segment tgt;
  double score = 0.0;
};

// Replaces each link's source-side coordinates with the source-language
// sentences at the same coordinates; the pivot is 1-1 with the source, so
// the map is the identity on (paragraph, sentence).
inline std::vector<SegmentPair> map_pivot_to_source(const std::vector<SentenceLink>& links,
                                                    const PivotDocument& pivot,
                                                    const Article& source,
                                                    const Article& target) {
  if (pivot.article_id != source.id)
    throw Error("pivot document belongs to article '" + pivot.article_id + "', not '" +
                source.id + "'");
  std::vector<SegmentPair> pairs;
  pairs.reserve(links.size());
  for (const auto& link : links) {
    SegmentPair pair;
    pair.slug = source.slug;
    pair.src = make_segment(source, link.src);
    pair.tgt = make_segment(target, link.tgt);
    pair.score = link.score;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

// Aligns every (source-language, target-language) version pair of a family.
// Output is ordered by (src grade, tgt grade, document order).
inline std::vector<SegmentPair> align_family(const ArticleFamily& family,
                                             const std::map<std::string, PivotDocument>& pivots,
                                             const AlignerParams& params) {
  std::vector<const Article*> spanish, english;
  for (const auto& [key, article] : family.versions)
    (key.language == Language::es ? spanish : english).push_back(&article);

  std::vector<SegmentPair> out;
  for (const Article* src : spanish) {
    auto pit = pivots.find(src->id);
    if (pit == pivots.end())
      throw Error("missing pivot translation for article '" + src->id + "'");
    const PivotDocument& pivot = pit->second;
    for (const Article* tgt : english) {
      if (!src->grade || !tgt->grade)
        throw Error("align_family: article '" + (src->grade ? tgt->id : src->id) +
                    "' has no grade");
      auto links = align_documents(pivot.paragraphs, doc_view(*tgt), params);
      auto pairs = map_pivot_to_source(links, pivot, *src, *tgt);
      out.insert(out.end(), pairs.begin(), pairs.end());
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SegmentPair& a, const SegmentPair& b) {
    if (a.src.grade != b.src.grade) return a.src.grade < b.src.grade;
    if (a.tgt.grade != b.tgt.grade) return a.tgt.grade < b.tgt.grade;
    return a.src.sentence_indices.front() < b.src.sentence_indices.front();
  });
  return out;
}

// --- SegmentPair JSONL ------------------------------------------------------
// {"slug", "src_grade", "tgt_grade", "src_text", "tgt_text", "score",
//  "src_coords", "tgt_coords"} with coords as [paragraph, sentence] pairs.

inline void to_json(nlohmann::ordered_json& j, const SegmentPair& p) {
  const auto coords = [](const std::vector<SentenceCoord>& cs) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : cs) arr.push_back({c.paragraph, c.sentence});
    return arr;
  };
  j = nlohmann::ordered_json{
      {"slug", p.slug},
      {"src_grade", p.src.grade ? nlohmann::ordered_json(*p.src.grade) : nullptr},
      {"tgt_grade", p.tgt.grade ? nlohmann::ordered_json(*p.tgt.grade) : nullptr},
      {"src_text", p.src.text},
      {"tgt_text", p.tgt.text},
      {"score", p.score},
      {"src_coords", coords(p.src.sentence_indices)},
      {"tgt_coords", coords(p.tgt.sentence_indices)}};
}

inline std::vector<SegmentPair> load_segment_pairs(const std::string& path,
                                                   Language src_language,
                                                   Language tgt_language) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open segment pair file: " + path);
  std::vector<SegmentPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  const auto read_side = [&](const nlohmann::ordered_json& j, const char* grade_key,
                             const char* text_key, const char* coords_key, Language lang) {
    Segment seg;
    seg.language = lang;
    if (j.contains(grade_key) && !j.at(grade_key).is_null())
      seg.grade = j.at(grade_key).get<int>();
    seg.text = j.at(text_key).get<std::string>();
    if (j.contains(coords_key))
      for (const auto& c : j.at(coords_key))
        seg.sentence_indices.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    if (!seg.sentence_indices.empty())
      seg.paragraph_span = {seg.sentence_indices.front().paragraph,
                            seg.sentence_indices.back().paragraph};
    return seg;
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      auto j = nlohmann::ordered_json::parse(line);
      SegmentPair p;
      p.slug = j.at("slug").get<std::string>();
      p.src = read_side(j, "src_grade", "src_text", "src_coords", src_language);
      p.tgt = read_side(j, "tgt_grade", "tgt_text", "tgt_coords", tgt_language);
      p.score = j.value("score", 0.0);
      pairs.push_back(std::move(p));
    } catch (const std::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pairs;
}

}  // namespace ccmt
