#pragma once

// Domain model for graded comparable articles: Article / ArticleFamily /
// Segment plus JSONL persistence. JSONL is the canonical storage format:
// line-oriented, streamable, diff-friendly.

#include <compare>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ccmt/common.hpp"
#include "ccmt/textproc.hpp"

namespace ccmt {

constexpr int kMinGrade = 2;
constexpr int kMaxGrade = 12;

struct Paragraph {
  int index = 0;
  std::vector<std::string> sentences;

  bool operator==(const Paragraph&) const = default;
};

struct Article {
  std::string id;
  std::string slug;
  Language language = Language::en;
  std::optional<int> grade;  // reading grade in [2,12]; absent for ungraded data
  std::vector<Paragraph> paragraphs;

  bool operator==(const Article&) const = default;

  std::size_t sentence_count() const {
    std::size_t n = 0;
    for (const auto& p : paragraphs) n += p.sentences.size();
    return n;
  }

  void validate() const {
    if (slug.empty()) throw Error("article '" + id + "': empty slug");
    if (grade && (*grade < kMinGrade || *grade > kMaxGrade))
      throw Error("article '" + id + "': grade " + std::to_string(*grade) +
                  " outside [" + std::to_string(kMinGrade) + "," + std::to_string(kMaxGrade) + "]");
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
      if (paragraphs[i].index != static_cast<int>(i))
        throw Error("article '" + id + "': paragraph indices not contiguous from 0");
      for (const auto& s : paragraphs[i].sentences)
        if (normalize(s).empty())
          throw Error("article '" + id + "': empty sentence in paragraph " + std::to_string(i));
    }
  }
};

struct VersionKey {
  Language language = Language::en;
  std::optional<int> grade;

  auto operator<=>(const VersionKey&) const = default;
};

struct ArticleFamily {
  std::string slug;
  std::map<VersionKey, Article> versions;
};

// (paragraph, sentence) coordinate inside an article
struct SentenceCoord {
  int paragraph = 0;
  int sentence = 0;

  auto operator<=>(const SentenceCoord&) const = default;
};

// One or more contiguous sentences treated as a single alignment /
// translation unit. text is always the space-joined listed sentences.
struct Segment {
  std::string article_id;
  std::pair<int, int> paragraph_span{0, 0};  // inclusive
  std::vector<SentenceCoord> sentence_indices;
  std::string text;
  std::optional<int> grade;
  Language language = Language::en;

  bool operator==(const Segment&) const = default;
};

inline Segment make_segment(const Article& article, const std::vector<SentenceCoord>& coords) {
  if (coords.empty()) throw Error("segment needs at least one sentence");
  Segment seg;
  seg.article_id = article.id;
  seg.grade = article.grade;
  seg.language = article.language;
  seg.sentence_indices = coords;
  std::vector<std::string> sentences;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& c = coords[i];
    if (i > 0 && !(coords[i - 1] < c))
      throw Error("segment coordinates not strictly increasing");
    if (c.paragraph < 0 || c.paragraph >= static_cast<int>(article.paragraphs.size()))
      throw Error("article '" + article.id + "': paragraph " + std::to_string(c.paragraph) +
                  " out of bounds");
    const auto& para = article.paragraphs[c.paragraph];
    if (c.sentence < 0 || c.sentence >= static_cast<int>(para.sentences.size()))
      throw Error("article '" + article.id + "': sentence (" + std::to_string(c.paragraph) +
                  "," + std::to_string(c.sentence) + ") out of bounds");
    sentences.push_back(para.sentences[c.sentence]);
  }
  seg.paragraph_span = {coords.front().paragraph, coords.back().paragraph};
  seg.text = join_tokens(sentences);
  return seg;
}

// --- JSONL schema ----------------------------------------------------------
// {"id": str, "slug": str, "language": "es"|"en", "grade": int|null,
//  "paragraphs": [[str, ...], ...]}

inline void to_json(nlohmann::ordered_json& j, const Article& a) {
  j = nlohmann::ordered_json{{"id", a.id}, {"slug", a.slug}, {"language", to_string(a.language)}};
  if (a.grade)
    j["grade"] = *a.grade;
  else
    j["grade"] = nullptr;
  auto paras = nlohmann::ordered_json::array();
  for (const auto& p : a.paragraphs) paras.push_back(p.sentences);
  j["paragraphs"] = std::move(paras);
}

inline void from_json(const nlohmann::ordered_json& j, Article& a) {
  a.id = j.at("id").get<std::string>();
  a.slug = j.at("slug").get<std::string>();
  a.language = language_from_string(j.at("language").get<std::string>());
  if (j.contains("grade") && !j.at("grade").is_null())
    a.grade = j.at("grade").get<int>();
  else
    a.grade.reset();
  a.paragraphs.clear();
  if (j.contains("paragraphs")) {
    int index = 0;
    for (const auto& sentences : j.at("paragraphs"))
      a.paragraphs.push_back({index++, sentences.get<std::vector<std::string>>()});
  }
}

inline std::vector<Article> load_articles(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open article file: " + path);
  std::vector<Article> articles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    Article a;
    try {
      from_json(j, a);
      a.validate();
    } catch (const std::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    articles.push_back(std::move(a));
  }
  return articles;
}

// One compact JSON object per line, UTF-8, LF endings, schema field order.
template <class Record>
inline void write_jsonl(const std::vector<Record>& records, std::ostream& os) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    to_json(j, r);
    os << j.dump() << '\n';
  }
}

template <class Record>
inline void write_jsonl(const std::vector<Record>& records, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open file for writing: " + path);
  write_jsonl(records, os);
  if (!os) throw Error("write failed: " + path);
}

// One family per distinct slug, sorted by slug. A duplicate
// (slug, language, grade) triple is a data error.
inline std::vector<ArticleFamily> group_families(const std::vector<Article>& articles) {
  std::map<std::string, ArticleFamily> by_slug;
  for (const auto& a : articles) {
    ArticleFamily& fam = by_slug[a.slug];
    fam.slug = a.slug;
    VersionKey key{a.language, a.grade};
    if (!fam.versions.emplace(key, a).second)
      throw Error("duplicate article version: slug=" + a.slug + " language=" +
                  to_string(a.language) +
                  " grade=" + (a.grade ? std::to_string(*a.grade) : std::string("null")));
  }
  std::vector<ArticleFamily> families;
  families.reserve(by_slug.size());
  for (auto& [slug, fam] : by_slug) families.push_back(std::move(fam));
  return families;
}

}  // namespace ccmt
