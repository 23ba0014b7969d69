#include <gtest/gtest.h>

#include <atomic>

#include "dyadic/error.hpp"
#include "dyadic/preprocess.hpp"
#include "dyadic/synthbench.hpp"
#include "oracles.hpp"

using namespace dyadic;

namespace {

std::string random_string(synth::CounterRng& rng, int max_len) {
  static const char* alphabet[] = {"a", "b", "e", "æ", "ø", "å", " ", "Å"};
  std::string s;
  for (int n = rng.uniform_int(0, max_len); n > 0; --n) s += alphabet[rng.uniform_int(0, 7)];
  return s;
}

class FlakyCorrector final : public CorrectorProvider {
 public:
  std::string correct(std::string_view text) override { return std::string(text) + (flip_++ % 2 ? "x" : ""); }

 private:
  std::atomic<int> flip_{0};
};

class DownCorrector final : public CorrectorProvider {
 public:
  std::string correct(std::string_view) override { throw ProviderUnavailable("timeout"); }
};

}  // namespace

TEST(Levenshtein, Examples) {
  EXPECT_EQ(levenshtein("abc", "abc"), 0u);
  EXPECT_EQ(levenshtein("", "abcd"), 4u);
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(levenshtein("teh", "the"), 2u);
  EXPECT_EQ(levenshtein("æble", "able"), 1u);  // one code point, two bytes
}

TEST(Levenshtein, MatchesFullMatrixOracle) {
  synth::CounterRng rng(3, 1);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_string(rng, 30), b = random_string(rng, 30);
    ASSERT_EQ(levenshtein(a, b), oracle::levenshtein(a, b)) << a << " / " << b;
  }
}

TEST(LevenshteinProperty, SymmetryAndTriangle) {
  synth::CounterRng rng(4, 1);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_string(rng, 20), b = random_string(rng, 20), c = random_string(rng, 20);
    EXPECT_EQ(levenshtein(a, b), levenshtein(b, a));
    EXPECT_LE(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c));
  }
}

TEST(EditDistances, SerialEqualsParallel) {
  synth::CounterRng rng(5, 1);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < 200; ++i) pairs.emplace_back(random_string(rng, 25), random_string(rng, 25));
  EXPECT_EQ(edit_distances(pairs, Exec::Serial), edit_distances(pairs, Exec::Parallel));
}

TEST(Rectify, IdentityAndTable) {
  const Turn t = make_turn("s", "p", 0, Agent::User, "teh drage");
  IdentityCorrector id;
  EXPECT_EQ(rectify_turn(t, id).edit_distance, 0u);
  TableCorrector table(std::map<std::string, std::string>{{"teh drage", "the drage"}});
  const auto r = rectify_turn(t, table);
  EXPECT_EQ(r.corrected_text, "the drage");
  EXPECT_EQ(r.edit_distance, 2u);
  EXPECT_EQ(r.original, t);
}

TEST(Rectify, Errors) {
  const Turn t = make_turn("s", "p", 0, Agent::User, "tekst");
  DownCorrector down;
  EXPECT_THROW(rectify_turn(t, down), ProviderUnavailable);
  FlakyCorrector flaky;
  try {
    rectify_turn(t, flaky, {true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ProviderNonDeterministic);
  }
}

namespace {

Corpus small_corpus() { return synth::skeleton_corpus({{3, 2}, {4}}, Dataset::Field, 11, "f"); }

}  // namespace

TEST(Filter, AllZeroLeavesCorpusUnchanged) {
  const Corpus c = small_corpus();
  IdentityCorrector id;
  const auto rect = rectify_user_turns(c, id, 3);
  const auto out = filter_by_edit_distance(c, rect);
  EXPECT_EQ(out.corpus.stories, c.stories);
  EXPECT_TRUE(out.log.excluded.empty());
  EXPECT_EQ(out.log.before, out.log.after);
}

TEST(Filter, ThresholdZeroRemovesEverything) {
  const Corpus c = small_corpus();
  IdentityCorrector id;
  const auto out = filter_by_edit_distance(c, rectify_user_turns(c, id), {0, false});
  EXPECT_EQ(out.log.after, 0u);
  EXPECT_TRUE(out.corpus.stories.empty());
}

TEST(Filter, ResequencesAndDropsEmptySessions) {
  const Corpus c = small_corpus();
  std::map<std::string, std::string> table;
  const auto& story = c.stories[0];
  // Remove the whole second session (interactions 3 and 4) and interaction 1.
  for (int i : {1, 3, 4}) table[story.interactions[i].user_turn.text] = std::string(150, 'z');
  TableCorrector corr(table);
  const auto out = filter_by_edit_distance(c, rectify_user_turns(c, corr));
  const auto& kept = out.corpus.stories[0];
  ASSERT_EQ(kept.interactions.size(), 2u);
  ASSERT_EQ(kept.sessions.size(), 1u);
  EXPECT_EQ(kept.sessions[0].length, 2);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(kept.interactions[i].interaction_index, i);
    EXPECT_EQ(kept.interactions[i].user_turn.turn_index, 2 * i);
    EXPECT_EQ(kept.interactions[i].ai_turn.turn_index, 2 * i + 1);
  }
  EXPECT_EQ(kept.interactions[1].user_turn.text, story.interactions[2].user_turn.text);
  ASSERT_EQ(out.log.excluded.size(), 3u);
  EXPECT_EQ(out.log.excluded[0].interaction_index, 1);
  EXPECT_EQ(out.rectified.size(), out.log.after);
}

TEST(Filter, IsIdempotent) {
  const Corpus c = small_corpus();
  std::map<std::string, std::string> table;
  table[c.stories[1].interactions[2].user_turn.text] = std::string(120, 'q');
  table[c.stories[0].interactions[0].user_turn.text] = c.stories[0].interactions[0].user_turn.text + "!";
  TableCorrector corr(table);
  const auto once = filter_by_edit_distance(c, rectify_user_turns(c, corr));
  const auto twice = filter_by_edit_distance(once.corpus, once.rectified);
  EXPECT_EQ(once.corpus.stories, twice.corpus.stories);
  EXPECT_TRUE(twice.log.excluded.empty());
}

TEST(Filter, ApplyCorrections) {
  const Corpus c = small_corpus();
  const auto& u = c.stories[0].interactions[0].user_turn.text;
  TableCorrector corr({{u, "rettet tekst"}});
  const auto out = filter_by_edit_distance(c, rectify_user_turns(c, corr), {100, true});
  EXPECT_EQ(out.corpus.stories[0].interactions[0].user_turn.text, "rettet tekst");
}

TEST(Filter, MissingRectification) {
  const Corpus c = small_corpus();
  try {
    filter_by_edit_distance(c, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingRectification);
  }
}
