#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "ccmt/textproc.hpp"

using namespace ccmt;

TEST_CASE("normalize folds whitespace, quotes and dashes") {
  CHECK(normalize("a  b") == "a b");
  CHECK(normalize("“hola”") == "\"hola\"");
  CHECK(normalize("") == "");
  CHECK(normalize("  lead and trail \t ") == "lead and trail");
  CHECK(normalize("it’s") == "it's");
  CHECK(normalize("1998–2000 — done") == "1998-2000 - done");
  CHECK(normalize("a\nb\r\nc") == "a b c");
  CHECK(normalize("café") == "café");  // e + combining acute -> é
  CHECK(normalize("manñana") == "manñana");
}

TEST_CASE("normalize is idempotent") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> pieces = {"a",  "  ",    "“", "—", "ñ",
                                           "\n", " ", "x́", "¿qué?", "."};
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    int len = static_cast<int>(rng() % 12);
    for (int i = 0; i < len; ++i) s += pieces[rng() % pieces.size()];
    std::string once = normalize(s);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("tokenize detaches punctuation, keeps word-internal marks") {
  CHECK(tokenize("The cat sat.").tokens == std::vector<std::string>{"The", "cat", "sat", "."});
  CHECK(tokenize("¿Qué?").tokens == std::vector<std::string>{"¿", "Qué", "?"});
  CHECK(tokenize("state-of-the-art").tokens == std::vector<std::string>{"state-of-the-art"});
  CHECK(tokenize("don't").tokens == std::vector<std::string>{"don't"});
  CHECK(tokenize("(a,b)").tokens == std::vector<std::string>{"(", "a", ",", "b", ")"});
  CHECK(tokenize("").tokens.empty());
  CHECK(tokenize("<grade_5> hola").tokens == std::vector<std::string>{"<grade_5>", "hola"});
}

TEST_CASE("tokenize offsets point at the source bytes") {
  std::string text = "ab cd.";
  auto tt = tokenize(text);
  REQUIRE(tt.offsets.has_value());
  REQUIRE(tt.offsets->size() == tt.tokens.size());
  for (std::size_t i = 0; i < tt.tokens.size(); ++i) {
    auto [b, e] = (*tt.offsets)[i];
    CHECK(text.substr(b, e - b) == tt.tokens[i]);
  }
}

TEST_CASE("tokenize then join is a fixed point") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> pieces = {"word", "two-part", "x.",     "(paren)",
                                           "¡sí!", "a,b",      "100%", "\"q\""};
  for (int trial = 0; trial < 100; ++trial) {
    std::string s;
    int len = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < len; ++i) {
      if (i) s += ' ';
      s += pieces[rng() % pieces.size()];
    }
    auto first = tokenize(normalize(s)).tokens;
    auto second = tokenize(join_tokens(first)).tokens;
    CHECK(first == second);
  }
}

TEST_CASE("split_sentences basic boundaries") {
  CHECK(split_sentences("A b. C d.") == std::vector<std::string>{"A b.", "C d."});
  CHECK(split_sentences("Mr. Smith left.") == std::vector<std::string>{"Mr. Smith left."});
  CHECK(split_sentences("One! ¿Dos? Three.") ==
        std::vector<std::string>{"One!", "¿Dos?", "Three."});
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("no enders here") == std::vector<std::string>{"no enders here"});
  CHECK(split_sentences("Fue a EE.UU. Luego volvió.") ==
        std::vector<std::string>{"Fue a EE.UU. Luego volvió."});
  CHECK(split_sentences("He said \"stop\". Then left.") ==
        std::vector<std::string>{"He said \"stop\".", "Then left."});
  CHECK(split_sentences("lower case. not a boundary") ==
        std::vector<std::string>{"lower case. not a boundary"});
}

TEST_CASE("split_sentences loses no tokens") {
  std::mt19937_64 rng(13);
  const std::vector<std::string> pieces = {"One two.", "¿Cómo estás?", "Mr. Smith",
                                           "EE.UU.",   "Wait!",        "plain words"};
  for (int trial = 0; trial < 100; ++trial) {
    std::string s;
    int len = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < len; ++i) {
      if (i) s += ' ';
      s += pieces[rng() % pieces.size()];
    }
    std::string norm = normalize(s);
    std::size_t whole = tokenize(norm).tokens.size();
    std::size_t parts = 0;
    for (const auto& sent : split_sentences(norm)) parts += tokenize(sent).tokens.size();
    CHECK(parts == whole);
  }
}

TEST_CASE("truecaser prefers the majority mid-sentence form") {
  // "apple" 5x mid-sentence, "Apple" 1x mid-sentence
  std::vector<TokenizedText> corpus;
  corpus.push_back(tokenize("I ate an apple today"));
  corpus.push_back(tokenize("an apple a day"));
  corpus.push_back(tokenize("the apple fell"));
  corpus.push_back(tokenize("one apple left"));
  corpus.push_back(tokenize("that apple rots"));
  corpus.push_back(tokenize("the Apple brand"));
  TruecaseModel model = train_truecaser(corpus);

  auto out = apply_truecase(model, tokenize("Apple pie is good"));
  CHECK(out.tokens[0] == "apple");

  SECTION("unseen sentence-initial token is unchanged") {
    CHECK(apply_truecase(model, tokenize("Zzyx is unknown")).tokens[0] == "Zzyx");
  }
  SECTION("empty model is the identity") {
    TruecaseModel empty;
    auto t = tokenize("Whatever Works");
    CHECK(apply_truecase(empty, t).tokens == t.tokens);
  }
  SECTION("sentence-initial evidence is excluded") {
    // "Apple" opens every sentence; only the mid-sentence "apple" counts
    std::vector<TokenizedText> skewed = {tokenize("Apple pie"), tokenize("Apple tart"),
                                         tokenize("an apple")};
    TruecaseModel m = train_truecaser(skewed);
    CHECK(apply_truecase(m, tokenize("Apple sauce")).tokens[0] == "apple");
  }
}

TEST_CASE("truecase model round-trips through TSV") {
  std::vector<TokenizedText> corpus = {tokenize("we saw NASA launch rockets"),
                                       tokenize("the NASA budget grew"),
                                       tokenize("a nasa fan wrote")};
  TruecaseModel model = train_truecaser(corpus);
  std::stringstream ss;
  save_truecase_model(model, ss);
  TruecaseModel loaded = load_truecase_model(ss);
  CHECK(loaded.casing == model.casing);
  CHECK(apply_truecase(loaded, tokenize("Nasa says hello")).tokens[0] == "NASA");
}

TEST_CASE("ngrams multiset") {
  TokenizedText aba{{"a", "b", "a"}, std::nullopt};
  auto unigrams = ngrams(aba, 1);
  CHECK(unigrams.counts.at({"a"}) == 2);
  CHECK(unigrams.counts.at({"b"}) == 1);
  auto bigrams = ngrams(aba, 2);
  CHECK(bigrams.counts.at({"a", "b"}) == 1);
  CHECK(bigrams.counts.at({"b", "a"}) == 1);
  CHECK(ngrams(TokenizedText{{"a"}, std::nullopt}, 3).counts.empty());
  CHECK_THROWS_AS(ngrams(aba, 0), Error);
}

TEST_CASE("ngram total multiplicity is max(0, len - n + 1)") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    TokenizedText t;
    int len = static_cast<int>(rng() % 9);
    for (int i = 0; i < len; ++i) t.tokens.push_back(std::string(1, 'a' + rng() % 3));
    int n = 1 + static_cast<int>(rng() % 5);
    long expected = std::max(0, len - n + 1);
    CHECK(ngrams(t, n).total() == expected);
  }
}
