#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace retsel {

struct TokenizerConfig {
  bool remove_stopwords = false;
};

// Lowercased maximal runs of alphanumeric code points, in source order.
// Input is UTF-8; invalid byte sequences act as separators.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg = {});

bool is_stopword(std::string_view term);

// Joins terms with single spaces (the dense-leg query string).
std::string join_terms(const std::vector<std::string>& terms);

}  // namespace retsel
