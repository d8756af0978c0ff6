#include "retsel/text.hpp"

#include <array>
#include <cstdint>
#include <unordered_set>

namespace retsel {
namespace {

// Decodes one UTF-8 code point starting at s[i]. Advances i past the
// sequence. Returns 0xFFFFFFFF on invalid input (and advances one byte).
std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) -> std::uint32_t {
    return static_cast<unsigned char>(s[k]);
  };
  std::uint32_t b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  auto cont = [&](std::size_t k) {
    return k < s.size() && (byte(k) & 0xC0u) == 0x80u;
  };
  if ((b0 & 0xE0u) == 0xC0u && cont(i + 1)) {
    std::uint32_t cp = ((b0 & 0x1Fu) << 6) | (byte(i + 1) & 0x3Fu);
    i += 2;
    return cp < 0x80 ? 0xFFFFFFFFu : cp;
  }
  if ((b0 & 0xF0u) == 0xE0u && cont(i + 1) && cont(i + 2)) {
    std::uint32_t cp =
        ((b0 & 0x0Fu) << 12) | ((byte(i + 1) & 0x3Fu) << 6) | (byte(i + 2) & 0x3Fu);
    i += 3;
    return cp < 0x800 ? 0xFFFFFFFFu : cp;
  }
  if ((b0 & 0xF8u) == 0xF0u && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
    std::uint32_t cp = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3Fu) << 12) |
                       ((byte(i + 2) & 0x3Fu) << 6) | (byte(i + 3) & 0x3Fu);
    i += 4;
    return (cp < 0x10000 || cp > 0x10FFFF) ? 0xFFFFFFFFu : cp;
  }
  ++i;
  return 0xFFFFFFFFu;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
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

// Letter/digit classification over the common scripts. Anything outside
// these ranges separates tokens.
bool is_word_cp(std::uint32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= 'a' && cp <= 'z');
  }
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;  // Latin-1 + Ext A/B
  if (cp >= 0x370 && cp <= 0x3FF) {                                // Greek
    switch (cp) {
      case 0x374: case 0x375: case 0x37E: case 0x384: case 0x385: case 0x387:
        return false;
      default:
        return true;
    }
  }
  if (cp >= 0x400 && cp <= 0x4FF) return true;      // Cyrillic
  if (cp >= 0x5D0 && cp <= 0x5EA) return true;      // Hebrew
  if (cp >= 0x620 && cp <= 0x64A) return true;      // Arabic
  if (cp >= 0x3041 && cp <= 0x3096) return true;    // Hiragana
  if (cp >= 0x30A1 && cp <= 0x30FA) return true;    // Katakana
  if (cp >= 0x4E00 && cp <= 0x9FFF) return true;    // CJK unified
  if (cp >= 0xAC00 && cp <= 0xD7A3) return true;    // Hangul
  return false;
}

// Simple lowercase mapping for the ranges above; identity elsewhere.
std::uint32_t lower_cp(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
  if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x179 && cp <= 0x17D) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 0x20;  // Greek
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;                 // Cyrillic
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  return cp;
}

const std::unordered_set<std::string_view>& stopword_set() {
  static const std::unordered_set<std::string_view> kStopwords = {
      "a",    "an",   "and",  "are",  "as",   "at",   "be",    "but",  "by",
      "for",  "from", "had",  "has",  "have", "he",   "her",   "his",  "if",
      "in",   "is",   "it",   "its",  "of",   "on",   "or",    "our",  "she",
      "that", "the",  "their", "them", "they", "this", "to",   "was",  "we",
      "were", "will", "with"};
  return kStopwords;
}

}  // namespace

bool is_stopword(std::string_view term) { return stopword_set().count(term) > 0; }

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  auto flush = [&] {
    if (!current.empty()) {
      if (!cfg.remove_stopwords || !is_stopword(current)) tokens.push_back(current);
      current.clear();
    }
  };
  while (i < text.size()) {
    std::uint32_t cp = decode_utf8(text, i);
    if (cp != 0xFFFFFFFFu && is_word_cp(cp)) {
      encode_utf8(lower_cp(cp), current);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string join_terms(const std::vector<std::string>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += terms[i];
  }
  return out;
}

}  // namespace retsel
