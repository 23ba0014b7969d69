#include <gtest/gtest.h>

#include "dyadic/text.hpp"

using namespace dyadic::text;

TEST(Text, DecodesDanishLetters) {
  const auto cps = to_code_points("blåbærgrød");
  EXPECT_EQ(cps.size(), 10u);
  EXPECT_EQ(cps[2], U'å');
  EXPECT_EQ(to_utf8(cps), "blåbærgrød");
  EXPECT_EQ(code_point_length(""), 0u);
}

TEST(Text, LowercasesLatin1) {
  EXPECT_EQ(lower("ÆØÅ Hej"), "æøå hej");
  EXPECT_EQ(lower(U'×'), U'×');
}

TEST(Text, WordTokensSplitOnPunctuation) {
  const auto t = word_tokens("Hej, med DIG! Øl?  ja-nej");
  const std::vector<std::string> expected = {"hej", "med", "dig", "øl", "ja", "nej"};
  EXPECT_EQ(t, expected);
  EXPECT_TRUE(word_tokens("  ...  ").empty());
}

TEST(Text, CollapseWhitespace) {
  EXPECT_EQ(collapse_whitespace("  a \t b\n\nc  "), "a b c");
  EXPECT_EQ(collapse_whitespace(" \n\t "), "");
}

TEST(Text, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}
