#include "dyadic/text.hpp"

#include <boost/locale/encoding_utf.hpp>

namespace dyadic::text {

std::u32string to_code_points(std::string_view utf8) {
  return boost::locale::conv::utf_to_utf<char32_t>(utf8.data(), utf8.data() + utf8.size());
}

std::string to_utf8(std::u32string_view cps) {
  return boost::locale::conv::utf_to_utf<char>(cps.data(), cps.data() + cps.size());
}

std::size_t code_point_length(std::string_view utf8) { return to_code_points(utf8).size(); }

char32_t lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  // Latin-1 uppercase block, excluding the multiplication sign.
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  return c;
}

std::string lower(std::string_view utf8) {
  auto cps = to_code_points(utf8);
  for (auto& c : cps) c = lower(c);
  return to_utf8(cps);
}

bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9');
  }
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0xC0 && c <= 0x24F) return true;  // Latin-1 supplement + Latin extended
  if (c >= 0x370 && c <= 0x52F) return true;  // Greek, Cyrillic
  return false;
}

std::vector<std::string> word_tokens(std::string_view utf8) {
  std::vector<std::string> out;
  std::u32string current;
  for (char32_t c : to_code_points(utf8)) {
    if (is_word_char(c)) {
      current.push_back(lower(c));
    } else if (!current.empty()) {
      out.push_back(to_utf8(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(to_utf8(current));
  return out;
}

std::string collapse_whitespace(std::string_view utf8) {
  std::string out;
  bool pending_space = false;
  for (char ch : utf8) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace dyadic::text
