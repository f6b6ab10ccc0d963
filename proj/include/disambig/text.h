#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace disambig {

// Trims and collapses internal whitespace runs to a single space.
std::string normalize_whitespace(std::string_view text);

// ASCII lowercase; bytes >= 0x80 are left untouched.
std::string to_lower(std::string_view text);

// Lowercases and splits on runs of non-alphanumeric characters. Bytes >= 0x80
// count as word characters so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

// Space-joined word n-grams of order n, in position order.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, std::size_t n);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_vowel_sound(std::string_view word);

}  // namespace disambig
