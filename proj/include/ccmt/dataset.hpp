#pragma once

// Builds the three training-sample types (complexity-controlled MT, plain
// MT, monolingual simplification) with grade side-constraint tokens,
// article-disjoint splits, seeded multitask mixtures and corpus statistics.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccmt/align.hpp"
#include "ccmt/common.hpp"
#include "ccmt/corpus.hpp"
#include "ccmt/readability.hpp"
#include "ccmt/textproc.hpp"
#include "ccmt/unicode.hpp"

namespace ccmt {

enum class Task { cmt, mt, simplify };

inline const char* to_string(Task t) {
  switch (t) {
    case Task::cmt: return "cmt";
    case Task::mt: return "mt";
    default: return "simplify";
  }
}

inline Task task_from_string(std::string_view s) {
  if (s == "cmt") return Task::cmt;
  if (s == "mt") return Task::mt;
  if (s == "simplify") return Task::simplify;
  throw Error("unknown task: '" + std::string(s) + "'");
}

// One record feeding one of the three losses. CMT and SIMPLIFY samples
// carry the constraint grade encoded as the first source token; MT samples
// have no constraint.
struct TrainingSample {
  Task task = Task::mt;
  std::string source_text;
  std::string target_text;
  std::optional<int> constraint_grade;
  std::string slug;
  std::optional<int> src_grade;
  std::optional<int> tgt_grade;

  bool operator==(const TrainingSample&) const = default;
};

// "<grade_G>": collision-free with natural vocabulary because the
// tokenizer never detaches '<' or '>', so the token survives as one unit.
inline std::string side_constraint_token(int grade) {
  if (grade < kMinGrade || grade > kMaxGrade)
    throw Error("side constraint grade " + std::to_string(grade) + " outside [" +
                std::to_string(kMinGrade) + "," + std::to_string(kMaxGrade) + "]");
  return "<grade_" + std::to_string(grade) + ">";
}

namespace detail {

// Strips a leading "<grade_G> " prefix, if present.
inline std::string strip_constraint_token(const std::string& source) {
  constexpr std::string_view kPrefix = "<grade_";
  if (source.rfind(kPrefix, 0) != 0) return source;
  std::size_t close = source.find("> ", kPrefix.size());
  if (close == std::string::npos) return source;
  for (std::size_t i = kPrefix.size(); i < close; ++i)
    if (!uni::is_digit(static_cast<unsigned char>(source[i]))) return source;
  return source.substr(close + 2);
}

}  // namespace detail

// One CMT sample per pair, constraint = target grade. With require_simpler
// only pairs whose target grade is lower than the source grade survive
// (the translate-and-simplify task).
inline std::vector<TrainingSample> make_cmt_samples(const std::vector<SegmentPair>& pairs,
                                                    bool require_simpler) {
  std::vector<TrainingSample> samples;
  for (const auto& p : pairs) {
    if (!p.src.grade || !p.tgt.grade)
      throw Error("cmt sample for slug '" + p.slug + "': pair is missing a grade");
    if (require_simpler && !(*p.tgt.grade < *p.src.grade)) continue;
    TrainingSample s;
    s.task = Task::cmt;
    s.constraint_grade = *p.tgt.grade;
    s.source_text = side_constraint_token(*p.tgt.grade) + " " + p.src.text;
    s.target_text = p.tgt.text;
    s.slug = p.slug;
    s.src_grade = p.src.grade;
    s.tgt_grade = p.tgt.grade;
    samples.push_back(std::move(s));
  }
  return samples;
}

// Plain MT samples, no constraint token. Accepts grade-less parallel pairs
// and same-grade pairs; pairs with differing grades belong to the CMT
// builder and are dropped here.
inline std::vector<TrainingSample> make_mt_samples(const std::vector<SegmentPair>& pairs) {
  std::vector<TrainingSample> samples;
  for (const auto& p : pairs) {
    bool gradeless = !p.src.grade && !p.tgt.grade;
    bool same_grade = p.src.grade && p.tgt.grade && *p.src.grade == *p.tgt.grade;
    if (!gradeless && !same_grade) continue;
    TrainingSample s;
    s.task = Task::mt;
    s.source_text = p.src.text;
    s.target_text = p.tgt.text;
    s.slug = p.slug;
    s.src_grade = p.src.grade;
    s.tgt_grade = p.tgt.grade;
    samples.push_back(std::move(s));
  }
  return samples;
}

// Monolingual simplification samples: constraint = target-side grade,
// token prepended to the complex source. Both sides must be in the given
// language (English by default).
inline std::vector<TrainingSample> make_simplify_samples(const std::vector<SegmentPair>& pairs,
                                                         Language language = Language::en) {
  std::vector<TrainingSample> samples;
  for (const auto& p : pairs) {
    if (p.src.language != language || p.tgt.language != language)
      throw Error("simplify sample for slug '" + p.slug + "': expected both sides in " +
                  std::string(to_string(language)));
    if (!p.src.grade || !p.tgt.grade)
      throw Error("simplify sample for slug '" + p.slug + "': pair is missing a grade");
    TrainingSample s;
    s.task = Task::simplify;
    s.constraint_grade = *p.tgt.grade;
    s.source_text = side_constraint_token(*p.tgt.grade) + " " + p.src.text;
    s.target_text = p.tgt.text;
    s.slug = p.slug;
    s.src_grade = p.src.grade;
    s.tgt_grade = p.tgt.grade;
    samples.push_back(std::move(s));
  }
  return samples;
}

// Unbiased bounded draw from a pinned engine; std::uniform_int_distribution
// is implementation-defined, this is not.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t bound) {
  std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

// Fisher-Yates with a pinned engine: byte-identical shuffles on every
// platform for a fixed seed.
template <class T>
inline void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i)
    std::swap(items[i - 1], items[bounded_rand(rng, i)]);
}

struct SplitSpec {
  double train = 0.9, dev = 0.05, test = 0.05;
  std::uint64_t seed = 1;

  void validate() const {
    if (train < 0 || dev < 0 || test < 0) throw Error("split ratios must be >= 0");
    if (std::abs(train + dev + test - 1.0) > 1e-9)
      throw Error("split ratios must sum to 1");
  }
};

struct DatasetSplits {
  std::vector<TrainingSample> train, dev, test;
};

// Shuffles the distinct slugs with the seed and partitions them by the
// ratios; every sample of a slug lands in the same split, so no article
// leaks across train/dev/test.
inline DatasetSplits split_by_article(const std::vector<TrainingSample>& samples,
                                      const SplitSpec& spec) {
  spec.validate();
  std::set<std::string> slug_set;
  for (const auto& s : samples) {
    if (s.slug.empty()) throw Error("split_by_article: sample without a slug");
    slug_set.insert(s.slug);
  }
  std::vector<std::string> slugs(slug_set.begin(), slug_set.end());
  seeded_shuffle(slugs, spec.seed);

  const auto n = static_cast<double>(slugs.size());
  std::size_t n_train = static_cast<std::size_t>(std::floor(n * spec.train + 0.5));
  std::size_t n_dev = static_cast<std::size_t>(std::floor(n * spec.dev + 0.5));
  if (n_train + n_dev > slugs.size()) n_dev = slugs.size() - n_train;

  std::map<std::string, int> bucket;  // 0 train, 1 dev, 2 test
  for (std::size_t i = 0; i < slugs.size(); ++i)
    bucket[slugs[i]] = i < n_train ? 0 : (i < n_train + n_dev ? 1 : 2);

  DatasetSplits out;
  for (const auto& s : samples) {
    switch (bucket[s.slug]) {
      case 0: out.train.push_back(s); break;
      case 1: out.dev.push_back(s); break;
      default: out.test.push_back(s); break;
    }
  }
  return out;
}

// Concatenates the per-task lists (any subset may be empty, which is how
// the ablation grids are built) and shuffles with the seed.
inline std::vector<TrainingSample> build_mixture(const std::vector<TrainingSample>& cmt,
                                                 const std::vector<TrainingSample>& mt,
                                                 const std::vector<TrainingSample>& simplify,
                                                 std::uint64_t seed) {
  std::vector<TrainingSample> mixture;
  mixture.reserve(cmt.size() + mt.size() + simplify.size());
  mixture.insert(mixture.end(), cmt.begin(), cmt.end());
  mixture.insert(mixture.end(), mt.begin(), mt.end());
  mixture.insert(mixture.end(), simplify.begin(), simplify.end());
  seeded_shuffle(mixture, seed);
  return mixture;
}

enum class RetagScope { newsela_only, all };

// Replaces constraint grades by the ARI grade of the target text, clamped
// into the side-constraint vocabulary [2,12]. newsela_only leaves MT
// samples byte-identical; all adds constraint tokens to them too.
inline std::vector<TrainingSample> retag_with_ari(const std::vector<TrainingSample>& samples,
                                                  RetagScope scope) {
  std::vector<TrainingSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.task == Task::mt && scope == RetagScope::newsela_only) {
      out.push_back(s);
      continue;
    }
    TrainingSample r = s;
    int grade = std::clamp(estimate_grade(s.target_text).grade, kMinGrade, kMaxGrade);
    r.constraint_grade = grade;
    r.source_text =
        side_constraint_token(grade) + " " + detail::strip_constraint_token(s.source_text);
    out.push_back(std::move(r));
  }
  return out;
}

enum class GroupBy { corpus, grade };

struct StatsRow {
  std::string key;         // "all", a grade number, or "ungraded"
  long word_types = 0;     // distinct lowercased word tokens
  long token_total = 0;    // word tokens, punctuation excluded
  long sentence_total = 0;
  long segment_count = 0;

  double tokens_per_segment() const {
    return segment_count ? static_cast<double>(token_total) / segment_count : 0.0;
  }
  double sents_per_segment() const {
    return segment_count ? static_cast<double>(sentence_total) / segment_count : 0.0;
  }
};

// Per-group type/token/sentence statistics over segments. Word tokens are
// tokens containing a letter or digit; sentence counts come from the
// segment's own coordinates when present, otherwise from the splitter.
inline std::vector<StatsRow> corpus_stats(const std::vector<Segment>& segments,
                                          GroupBy group_by) {
  struct Group {
    std::set<std::string> types;
    StatsRow row;
  };
  std::map<std::pair<int, std::optional<int>>, Group> groups;  // sort key: (kind, grade)
  for (const auto& seg : segments) {
    std::pair<int, std::optional<int>> key{0, std::nullopt};
    if (group_by == GroupBy::grade) key = seg.grade ? std::make_pair(0, seg.grade)
                                                    : std::make_pair(1, std::optional<int>{});
    Group& g = groups[key];
    std::string norm = normalize(seg.text);
    for (const auto& tok : tokenize(norm).tokens) {
      if (!is_word_token(tok)) continue;
      ++g.row.token_total;
      g.types.insert(uni::lowercase(tok));
    }
    g.row.sentence_total +=
        !seg.sentence_indices.empty()
            ? static_cast<long>(seg.sentence_indices.size())
            : static_cast<long>(split_sentences(norm).size());
    ++g.row.segment_count;
  }
  std::vector<StatsRow> rows;
  for (auto& [key, g] : groups) {
    g.row.key = group_by == GroupBy::corpus ? "all"
                : key.second               ? std::to_string(*key.second)
                                           : "ungraded";
    g.row.word_types = static_cast<long>(g.types.size());
    rows.push_back(std::move(g.row));
  }
  return rows;
}

// Counts of segment pairs per (src grade, tgt grade); pairs missing either
// grade are not counted.
inline std::map<std::pair<int, int>, long> grade_pair_matrix(
    const std::vector<SegmentPair>& pairs) {
  std::map<std::pair<int, int>, long> counts;
  for (const auto& p : pairs)
    if (p.src.grade && p.tgt.grade) ++counts[{*p.src.grade, *p.tgt.grade}];
  return counts;
}

// --- TrainingSample JSONL ---------------------------------------------------
// {"task", "source", "target", "constraint_grade", "slug", "src_grade",
//  "tgt_grade"}

inline void to_json(nlohmann::ordered_json& j, const TrainingSample& s) {
  const auto opt = [](const std::optional<int>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j = nlohmann::ordered_json{{"task", to_string(s.task)},
                             {"source", s.source_text},
                             {"target", s.target_text},
                             {"constraint_grade", opt(s.constraint_grade)},
                             {"slug", s.slug},
                             {"src_grade", opt(s.src_grade)},
                             {"tgt_grade", opt(s.tgt_grade)}};
}

inline std::vector<TrainingSample> load_samples_jsonl(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open sample file: " + path);
  std::vector<TrainingSample> samples;
  std::string line;
  std::size_t line_no = 0;
  const auto opt_int = [](const nlohmann::ordered_json& j, const char* key) {
    std::optional<int> v;
    if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<int>();
    return v;
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      auto j = nlohmann::ordered_json::parse(line);
      TrainingSample s;
      s.task = task_from_string(j.at("task").get<std::string>());
      s.source_text = j.at("source").get<std::string>();
      s.target_text = j.at("target").get<std::string>();
      s.constraint_grade = opt_int(j, "constraint_grade");
      s.slug = j.value("slug", std::string{});
      s.src_grade = opt_int(j, "src_grade");
      s.tgt_grade = opt_int(j, "tgt_grade");
      samples.push_back(std::move(s));
    } catch (const std::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return samples;
}

namespace detail {

inline std::string single_line(std::string_view text) {
  std::string out(text);
  for (char& c : out)
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  return out;
}

}  // namespace detail

// Line-aligned source/target text files for external seq2seq trainers.
inline void write_side_by_side(const std::vector<TrainingSample>& samples,
                               const std::string& src_path, const std::string& tgt_path) {
  std::ofstream src(src_path, std::ios::binary), tgt(tgt_path, std::ios::binary);
  if (!src || !tgt) throw Error("cannot open side-by-side output files");
  for (const auto& s : samples) {
    src << detail::single_line(s.source_text) << '\n';
    tgt << detail::single_line(s.target_text) << '\n';
  }
}

// Line-parallel plain-text pair loader (OPUS-style). Each line pair gets
// its own synthetic slug so article-disjoint splitting stays well-defined.
inline std::vector<SegmentPair> load_parallel_text(const std::string& src_path,
                                                   const std::string& tgt_path,
                                                   Language src_language,
                                                   Language tgt_language,
                                                   const std::string& slug_prefix = "opus") {
  std::vector<std::string> src_lines = read_lines(src_path);
  std::vector<std::string> tgt_lines = read_lines(tgt_path);
  if (src_lines.size() != tgt_lines.size())
    throw Error("parallel files differ in length: " + std::to_string(src_lines.size()) +
                " vs " + std::to_string(tgt_lines.size()));
  std::vector<SegmentPair> pairs;
  pairs.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    SegmentPair p;
    p.slug = slug_prefix + ":" + std::to_string(i + 1);
    p.src.text = src_lines[i];
    p.src.language = src_language;
    p.tgt.text = tgt_lines[i];
    p.tgt.language = tgt_language;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace ccmt
