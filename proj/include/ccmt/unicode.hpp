#pragma once

// Minimal UTF-8 and Latin-script character utilities. Full Unicode property
// tables are out of scope; coverage is ASCII, Latin-1 Supplement and Latin
// Extended-A, which is what Spanish and English news text needs.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ccmt::uni {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes one UTF-8 sequence starting at byte i. Advances i past the
// sequence. Malformed bytes decode to U+FFFD and consume one byte.
inline char32_t decode_one(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kReplacement;
  }
  if (i + len > s.size()) {
    ++i;
    return kReplacement;
  }
  for (int k = 1; k < len; ++k) {
    unsigned char b = byte(i + k);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  // reject overlong forms and surrogates
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
      (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
    ++i;
    return kReplacement;
  }
  i += len;
  return cp;
}

inline std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) out.push_back(decode_one(s, i));
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

inline bool is_space(char32_t cp) {
  switch (cp) {
    case U'\t':
    case U'\n':
    case U'\v':
    case U'\f':
    case U'\r':
    case U' ':
    case 0x00A0:  // no-break space
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

inline bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

inline bool is_letter(char32_t cp) {
  if ((cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z')) return true;
  if (cp >= 0xC0 && cp <= 0xFF) return cp != 0xD7 && cp != 0xF7;  // × and ÷
  return cp >= 0x100 && cp <= 0x17F;
}

inline bool is_alnum(char32_t cp) { return is_letter(cp) || is_digit(cp); }

inline char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x137 && cp % 2 == 0) return cp + 1;
  if (cp >= 0x139 && cp <= 0x147 && cp % 2 == 1) return cp + 1;
  if (cp >= 0x14A && cp <= 0x176 && cp % 2 == 0) return cp + 1;
  if (cp == 0x178) return 0xFF;  // Ÿ
  if (cp == 0x179 || cp == 0x17B || cp == 0x17D) return cp + 1;
  return cp;
}

inline bool is_upper(char32_t cp) { return is_letter(cp) && to_lower(cp) != cp; }

inline std::string lowercase(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) append_utf8(out, to_lower(decode_one(s, i)));
  return out;
}

// Canonical composition of an ASCII base letter with a combining mark,
// restricted to the precomposed letters of Latin-1 Supplement plus N/n-tilde
// company. Returns 0 when no composition exists.
inline char32_t compose(char32_t base, char32_t mark) {
  const auto pick = [&](std::u32string_view bases, std::u32string_view composed) -> char32_t {
    for (std::size_t k = 0; k < bases.size(); ++k)
      if (bases[k] == base) return composed[k];
    return 0;
  };
  switch (mark) {
    case 0x0300: return pick(U"AEIOUaeiou", U"ÀÈÌÒÙàèìòù");
    case 0x0301: return pick(U"AEIOUYaeiouy", U"ÁÉÍÓÚÝáéíóúý");
    case 0x0302: return pick(U"AEIOUaeiou", U"ÂÊÎÔÛâêîôû");
    case 0x0303: return pick(U"ANOano", U"ÃÑÕãñõ");
    case 0x0308: return pick(U"AEIOUaeiouy", U"ÄËÏÖÜäëïöüÿ");
    case 0x030A: return pick(U"Aa", U"Åå");
    case 0x0327: return pick(U"Cc", U"Çç");
    default: return 0;
  }
}

}  // namespace ccmt::uni
