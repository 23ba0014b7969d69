#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small UTF-8 helpers shared by ingestion, edit distance and the lexicon engine.
namespace dyadic::text {

// Decodes UTF-8 into code points. Invalid byte sequences are skipped.
std::u32string to_code_points(std::string_view utf8);
std::string to_utf8(std::u32string_view cps);

std::size_t code_point_length(std::string_view utf8);

// Lowercases ASCII and the Latin-1 letters (covers Danish æ ø å).
char32_t lower(char32_t c);
std::string lower(std::string_view utf8);

bool is_word_char(char32_t c);

// Splits on whitespace and punctuation, lowercasing each token.
std::vector<std::string> word_tokens(std::string_view utf8);

// Collapses whitespace runs to one space and trims both ends.
std::string collapse_whitespace(std::string_view utf8);

// 64-bit FNV-1a; used for stub providers and stable ids, never for security.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace dyadic::text
