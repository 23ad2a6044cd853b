#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "ccmt/corpus.hpp"

using namespace ccmt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / ("ccmt-corpus-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Article sample_article(const std::string& id, const std::string& slug, Language lang,
                       std::optional<int> grade) {
  Article a;
  a.id = id;
  a.slug = slug;
  a.language = lang;
  a.grade = grade;
  a.paragraphs = {{0, {"First sentence.", "Second one."}}, {1, {"Third."}}};
  return a;
}

Article random_article(std::mt19937_64& rng, int index) {
  Article a;
  a.id = "art-" + std::to_string(index);
  a.slug = "slug-" + std::to_string(rng() % 5);
  a.language = rng() % 2 ? Language::es : Language::en;
  if (rng() % 3) a.grade = 2 + static_cast<int>(rng() % 11);
  int n_paras = 1 + static_cast<int>(rng() % 3);
  const std::vector<std::string> pool = {"Hola mundo.", "¿Qué tal?", "Good night.",
                                         "A b c.", "Números 1 2 3."};
  for (int p = 0; p < n_paras; ++p) {
    Paragraph para;
    para.index = p;
    int n_sents = 1 + static_cast<int>(rng() % 3);
    for (int s = 0; s < n_sents; ++s) para.sentences.push_back(pool[rng() % pool.size()]);
    a.paragraphs.push_back(std::move(para));
  }
  return a;
}

}  // namespace

TEST_CASE("load_articles parses valid JSONL") {
  auto dir = temp_dir();
  auto path = (dir / "ok.jsonl").string();
  {
    std::ofstream os(path);
    os << R"({"id":"a1","slug":"story","language":"es","grade":5,"paragraphs":[["Hola.","Adiós."],["Fin."]]})"
       << "\n";
    os << R"({"id":"a2","slug":"story","language":"en","grade":null,"paragraphs":[["Hi."]],"extra":"ignored"})"
       << "\n";
  }
  auto articles = load_articles(path);
  REQUIRE(articles.size() == 2);
  CHECK(articles[0].id == "a1");
  CHECK(articles[0].grade == 5);
  CHECK(articles[0].paragraphs.size() == 2);
  CHECK(articles[0].paragraphs[0].sentences[1] == "Adiós.");
  CHECK(articles[1].grade == std::nullopt);
  CHECK(articles[1].language == Language::en);
}

TEST_CASE("load_articles on an empty file gives an empty list") {
  auto dir = temp_dir();
  auto path = (dir / "empty.jsonl").string();
  std::ofstream(path).close();
  CHECK(load_articles(path).empty());
}

TEST_CASE("load_articles errors carry the 1-based line number") {
  auto dir = temp_dir();
  auto path = (dir / "bad.jsonl").string();
  {
    std::ofstream os(path);
    os << R"({"id":"a1","slug":"s","language":"es","grade":3,"paragraphs":[["x."]]})" << "\n";
    os << R"({"id":"a2","slug":"s","language":"en","grade":4,"paragraphs":[["y."]]})" << "\n";
    os << R"({"id":"a3","slug":"s","language":"en","grade":17,"paragraphs":[["z."]]})" << "\n";
  }
  CHECK_THROWS_WITH(load_articles(path), Catch::Matchers::ContainsSubstring(":3:"));

  auto path2 = (dir / "badjson.jsonl").string();
  {
    std::ofstream os(path2);
    os << R"({"id":"a1","slug":"s","language":"es","grade":3,"paragraphs":[["x."]]})" << "\n";
    os << "{not json\n";
  }
  CHECK_THROWS_WITH(load_articles(path2), Catch::Matchers::ContainsSubstring(":2:"));
}

TEST_CASE("write then load is the identity") {
  std::mt19937_64 rng(23);
  auto dir = temp_dir();
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Article> articles;
    int n = static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) articles.push_back(random_article(rng, i));
    auto path = (dir / ("rt-" + std::to_string(trial) + ".jsonl")).string();
    write_jsonl(articles, path);
    CHECK(load_articles(path) == articles);
  }
}

TEST_CASE("write_jsonl writes one compact line per record") {
  auto dir = temp_dir();
  auto path = (dir / "two.jsonl").string();
  std::vector<Article> arts = {sample_article("x", "sx", Language::es, 4),
                               sample_article("y", "sy", Language::en, 6)};
  write_jsonl(arts, path);
  auto lines = read_lines(path);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].find('\n') == std::string::npos);
  CHECK(lines[0].substr(0, 1) == "{");

  write_jsonl(std::vector<Article>{}, path);
  CHECK(read_lines(path).empty());
}

TEST_CASE("group_families partitions by slug") {
  std::vector<Article> arts = {sample_article("1", "a", Language::es, 5),
                               sample_article("2", "a", Language::en, 3),
                               sample_article("3", "b", Language::en, 7)};
  auto families = group_families(arts);
  REQUIRE(families.size() == 2);
  CHECK(families[0].slug == "a");
  CHECK(families[0].versions.size() == 2);
  CHECK(families[1].slug == "b");

  CHECK(group_families({}).empty());
}

TEST_CASE("group_families rejects duplicate (slug, language, grade)") {
  std::vector<Article> arts = {sample_article("1", "a", Language::es, 5),
                               sample_article("2", "a", Language::es, 5)};
  CHECK_THROWS_AS(group_families(arts), Error);
}

TEST_CASE("group_families is a partition of the input") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Article> arts;
    int n = static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      Article a = random_article(rng, i);
      a.grade = 2 + i;  // distinct grades avoid duplicate keys
      arts.push_back(std::move(a));
    }
    std::vector<ArticleFamily> families;
    try {
      families = group_families(arts);
    } catch (const Error&) {
      continue;  // duplicate key draw
    }
    std::vector<std::string> regrouped;
    for (const auto& f : families)
      for (const auto& [key, a] : f.versions) {
        CHECK(a.slug == f.slug);
        regrouped.push_back(a.id);
      }
    std::vector<std::string> original;
    for (const auto& a : arts) original.push_back(a.id);
    std::sort(regrouped.begin(), regrouped.end());
    std::sort(original.begin(), original.end());
    CHECK(regrouped == original);
  }
}

TEST_CASE("make_segment joins the listed sentences") {
  Article a = sample_article("a", "s", Language::es, 5);
  Segment seg = make_segment(a, {{0, 0}, {0, 1}});
  CHECK(seg.text == "First sentence. Second one.");
  CHECK(seg.paragraph_span == std::pair<int, int>{0, 0});
  CHECK(seg.grade == 5);

  CHECK_THROWS_AS(make_segment(a, {}), Error);
  CHECK_THROWS_AS(make_segment(a, {{0, 1}, {0, 0}}), Error);  // not increasing
  CHECK_THROWS_AS(make_segment(a, {{5, 0}}), Error);          // out of bounds
}
