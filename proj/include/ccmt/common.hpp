#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ccmt {

/// Error raised for invalid input data or I/O failures. CLI maps it to exit code 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Language { es, en };

inline const char* to_string(Language lang) {
  return lang == Language::es ? "es" : "en";
}

inline Language language_from_string(std::string_view s) {
  if (s == "es") return Language::es;
  if (s == "en") return Language::en;
  throw Error("unknown language code: '" + std::string(s) + "' (expected \"es\" or \"en\")");
}

// Whole-file line reader; strips trailing CR so CRLF input behaves.
inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace ccmt
