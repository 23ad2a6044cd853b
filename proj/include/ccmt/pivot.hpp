#pragma once

// Providers for 1-1 sentence-aligned pivot translations of source-language
// articles. The file provider is the canonical, offline, deterministic
// path; the HTTP provider supports live MT back-ends behind the same
// count-checked contract.

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "ccmt/align.hpp"
#include "ccmt/common.hpp"
#include "ccmt/corpus.hpp"

namespace ccmt {

enum class PivotMode { file, http };

struct PivotProviderConfig {
  PivotMode mode = PivotMode::file;
  std::string location;  // directory of pivot files, or endpoint URL
  double timeout_seconds = 30.0;
  int max_retries = 2;

  void validate() const {
    if (timeout_seconds <= 0) throw Error("pivot timeout must be > 0");
    if (max_retries < 0) throw Error("pivot retry count must be >= 0");
  }

  static PivotProviderConfig from_location(const std::string& loc) {
    PivotProviderConfig cfg;
    cfg.location = loc;
    cfg.mode = loc.rfind("http://", 0) == 0 || loc.rfind("https://", 0) == 0
                   ? PivotMode::http
                   : PivotMode::file;
    return cfg;
  }
};

// Bearer token for the HTTP provider, if the back-end wants one.
inline constexpr const char* kPivotTokenEnvVar = "CCMT_PIVOT_TOKEN";

namespace detail {

// Pivot file format: blank-line-separated paragraphs, one sentence per line.
inline DocView parse_pivot_file(const std::vector<std::string>& lines) {
  DocView paragraphs;
  std::vector<std::string> current;
  for (const auto& line : lines) {
    if (line.empty()) {
      if (!current.empty()) paragraphs.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(line);
    }
  }
  if (!current.empty()) paragraphs.push_back(std::move(current));
  return paragraphs;
}

inline PivotDocument fetch_pivot_file(const PivotProviderConfig& config,
                                      const Article& article) {
  std::string path = config.location;
  if (!path.empty() && path.back() != '/') path.push_back('/');
  path += article.id + ".txt";
  std::vector<std::string> lines;
  try {
    lines = read_lines(path);
  } catch (const Error&) {
    throw Error("no pivot file for article '" + article.id + "' at " + path);
  }
  return PivotDocument::create(article, parse_pivot_file(lines));
}

// One POST per article: {"sentences": [...]} -> {"translations": [...]}
// with equal length, retried with exponential backoff starting at 1s.
inline PivotDocument fetch_pivot_http(const PivotProviderConfig& config,
                                      const Article& article) {
  std::string base = config.location, path = "/";
  std::size_t scheme_end = base.find("//");
  std::size_t path_start = base.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 2);
  if (path_start != std::string::npos) {
    path = base.substr(path_start);
    base = base.substr(0, path_start);
  }

  std::vector<std::string> sentences;
  for (const auto& p : article.paragraphs)
    sentences.insert(sentences.end(), p.sentences.begin(), p.sentences.end());
  nlohmann::json request = {{"sentences", sentences}};
  const std::string body = request.dump();

  httplib::Client client(base);
  auto timeout = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::duration<double>(config.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (const char* token = std::getenv(kPivotTokenEnvVar); token && *token)
    headers.emplace("Authorization", std::string("Bearer ") + token);

  std::string last_error;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(1000) * (1 << (attempt - 1)));
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    std::vector<std::string> translations;
    try {
      translations = nlohmann::json::parse(res->body)
                         .at("translations")
                         .get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error("pivot response for article '" + article.id + "' is malformed: " + e.what());
    }
    if (translations.size() != sentences.size())
      throw Error("pivot response for article '" + article.id + "' has " +
                  std::to_string(translations.size()) + " translations for " +
                  std::to_string(sentences.size()) + " sentences");
    DocView paragraphs;
    std::size_t k = 0;
    for (const auto& p : article.paragraphs) {
      std::vector<std::string> para;
      for (std::size_t s = 0; s < p.sentences.size(); ++s) para.push_back(translations[k++]);
      paragraphs.push_back(std::move(para));
    }
    return PivotDocument::create(article, std::move(paragraphs));
  }
  throw Error("pivot request for article '" + article.id + "' failed after " +
              std::to_string(config.max_retries + 1) + " attempts: " + last_error);
}

}  // namespace detail

// Fetches the pivot translation of a Spanish article. The returned document
// always satisfies the 1-1 count invariant; any mismatch is an error naming
// the article.
inline PivotDocument fetch_pivot(const PivotProviderConfig& config, const Article& article) {
  config.validate();
  if (article.language != Language::es)
    throw Error("pivot requested for non-Spanish article '" + article.id + "'");
  return config.mode == PivotMode::file ? detail::fetch_pivot_file(config, article)
                                        : detail::fetch_pivot_http(config, article);
}

}  // namespace ccmt
