#include <gtest/gtest.h>

#include <cmath>

#include "dyadic/alignment.hpp"
#include "dyadic/error.hpp"
#include "dyadic/synthbench.hpp"

using namespace dyadic;

namespace {

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::Io;
}

StoryValences sv(std::vector<double> user, std::vector<double> ai) {
  StoryValences s;
  s.story_id = "s";
  s.user = std::move(user);
  s.ai = std::move(ai);
  return s;
}

}  // namespace

TEST(DirectionalSeries, Counts) {
  const auto s = sv({1, 2}, {3, 4});
  EXPECT_EQ(directional_series(s, Direction::UserToAi).x.size(), 2u);
  EXPECT_EQ(directional_series(s, Direction::AiToUser).x.size(), 1u);
  EXPECT_EQ(code_of([] { directional_series(sv({1}, {2}), Direction::AiToUser); }), Errc::InsufficientPairs);
}

TEST(DirectionalSeries, FiveInteractionEnumeration) {
  const auto s = sv({10, 11, 12, 13, 14}, {20, 21, 22, 23, 24});
  const auto w = directional_series(s, Direction::UserToAi);
  EXPECT_EQ(w.x, (std::vector<double>{10, 11, 12, 13, 14}));
  EXPECT_EQ(w.y, (std::vector<double>{20, 21, 22, 23, 24}));
  const auto a = directional_series(s, Direction::AiToUser);
  EXPECT_EQ(a.x, (std::vector<double>{20, 21, 22, 23}));
  EXPECT_EQ(a.y, (std::vector<double>{11, 12, 13, 14}));
}

TEST(DirectionalSeries, StoryValencesFromCorpus) {
  const Corpus c = synth::skeleton_corpus({{2, 1}}, Dataset::Simulated, 1);
  ValenceMap m;
  double v = 0;
  for (const auto& in : c.stories[0].interactions) {
    m[key_of(in.user_turn)] = {key_of(in.user_turn), ValenceMethod::Lexicon, v, 1};
    m[key_of(in.ai_turn)] = {key_of(in.ai_turn), ValenceMethod::Lexicon, -v, 1};
    v += 1;
  }
  const auto s = story_valences(c.stories[0], m);
  EXPECT_EQ(s.dataset, Dataset::Simulated);
  EXPECT_EQ(s.user, (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(s.ai, (std::vector<double>{0, -1, -2}));
  m.erase(m.begin());
  EXPECT_THROW(story_valences(c.stories[0], m), Error);
}

TEST(StoryAlignment, CopyAndAntiPhase) {
  PairedSeries p{{1, 3, 2, 5}, {1, 3, 2, 5}};
  auto r = story_alignment(p);
  EXPECT_DOUBLE_EQ(r.r, 1.0);
  EXPECT_DOUBLE_EQ(r.fisher_z, std::atanh(1.0 - 1e-7));
  p.y = {-1, -3, -2, -5};
  EXPECT_DOUBLE_EQ(story_alignment(p).r, -1.0);
  EXPECT_EQ(code_of([] { story_alignment(PairedSeries{{1, 2, 3}, {4, 4, 4}}); }), Errc::ZeroVariance);
  EXPECT_EQ(code_of([] { story_alignment(PairedSeries{{1, 2}, {4, 5}}); }), Errc::InsufficientPairs);
}

TEST(StoryAlignment, IndependentSeriesNearZero) {
  synth::CounterRng rng(77, 0);
  PairedSeries p;
  for (int i = 0; i < 10000; ++i) {
    p.x.push_back(rng.uniform());
    p.y.push_back(rng.uniform());
  }
  EXPECT_LT(std::abs(story_alignment(p).r), 0.05);
}

TEST(StoryAlignmentProperty, AffineInvariance) {
  synth::CounterRng rng(3, 3);
  for (int k = 0; k < 30; ++k) {
    PairedSeries p;
    for (int i = 0; i < 20; ++i) {
      p.x.push_back(rng.normal());
      p.y.push_back(0.5 * p.x.back() + rng.normal());
    }
    const double a = rng.uniform(0.1, 10), b = rng.uniform(-5, 5);
    PairedSeries q = p;
    for (double& v : q.x) v = a * v + b;
    for (double& v : q.y) v = a * v + b;
    EXPECT_NEAR(story_alignment(q).fisher_z, story_alignment(p).fisher_z, 1e-12);
  }
}

TEST(AlignmentTTest, Examples) {
  const std::vector<double> z = {0.1, 0.2, 0.3};
  const auto t = alignment_ttest(z);
  EXPECT_NEAR(t.t, 3.4641, 1e-4);
  EXPECT_EQ(t.df, 2);
  const std::vector<double> sym = {-0.4, -0.1, 0.1, 0.4};
  EXPECT_NEAR(alignment_ttest(sym).t, 0.0, 1e-15);
}

namespace {

std::vector<AlignmentResult> grid(std::uint64_t seed, double dataset_effect, double noise) {
  synth::CounterRng rng(seed, 4);
  std::vector<AlignmentResult> out;
  for (Dataset d : {Dataset::Field, Dataset::Simulated}) {
    for (Direction dir : {Direction::UserToAi, Direction::AiToUser}) {
      for (int s = 0; s < 27; ++s) {
        AlignmentResult r;
        r.story_id = "s" + std::to_string(s);
        r.dataset = d;
        r.direction = dir;
        r.fisher_z = (d == Dataset::Simulated ? dataset_effect : 0.0) + (noise > 0 ? rng.normal(0, noise) : 0.0);
        out.push_back(r);
      }
    }
  }
  return out;
}

}  // namespace

TEST(AlignmentAnova, ErrorDfAndPureDatasetEffect) {
  // Pure dataset effect with noise that is identical across the Turn levels,
  // so Turn and interaction sums of squares vanish exactly.
  auto results = grid(1, 0.0, 0.0);
  synth::CounterRng rng(5, 5);
  std::vector<double> e(54);
  for (double& x : e) x = rng.normal(0, 0.2);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const int ds = results[i].dataset == Dataset::Simulated;
    results[i].fisher_z = 0.5 * ds + e[ds * 27 + i % 27];
  }
  const auto t = alignment_anova(results);
  EXPECT_EQ(t.residual_df, 104);
  EXPECT_NEAR(t.effect("turn").f, 0.0, 1e-12);
  EXPECT_NEAR(t.effect("dataset:turn").f, 0.0, 1e-12);
  // Hand decomposition: SS_dataset = N * (mean difference / 2)^2.
  double m[2] = {0, 0};
  for (const auto& r : results) m[r.dataset == Dataset::Simulated] += r.fisher_z / 54.0;
  EXPECT_NEAR(t.effect("dataset").ss, 108 * std::pow((m[1] - m[0]) / 2, 2), 1e-10);
}

TEST(AlignmentAnova, ConstantInputAndEmptyCell) {
  EXPECT_EQ(code_of([] { alignment_anova(grid(1, 0.0, 0.0)); }), Errc::ZeroVariance);
  auto r = grid(1, 0.3, 1.0);
  r.erase(std::remove_if(r.begin(), r.end(), [](const AlignmentResult& a) {
            return a.dataset == Dataset::Simulated && a.direction == Direction::AiToUser;
          }),
          r.end());
  EXPECT_EQ(code_of([&] { alignment_anova(r); }), Errc::EmptyCell);
}

TEST(AlignmentAnovaProperty, RelabelingDirectionKeepsTotal) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto r = grid(seed, 0.3, 1.0);
    const double total = alignment_anova(r).total_ss;
    for (auto& a : r) a.direction = a.direction == Direction::UserToAi ? Direction::AiToUser : Direction::UserToAi;
    EXPECT_NEAR(alignment_anova(r).total_ss, total, 1e-10 * total);
  }
}

TEST(LeaderFollower, DetectorFindsTheLeader) {
  // B (AI) copies A's (user's) turn in the same interaction plus noise.
  const auto stories = synth::gen_coupled_dyad(27, 50, 1.0, 0.5, Direction::UserToAi, 3);
  std::vector<double> ab, ba;
  for (const auto& s : stories) {
    ab.push_back(story_alignment(directional_series(s, Direction::UserToAi)).fisher_z);
    ba.push_back(story_alignment(directional_series(s, Direction::AiToUser)).fisher_z);
  }
  const auto t = stats::paired_t(ab, ba);
  EXPECT_GT(t.mean, 0.0);
  EXPECT_LT(t.p_two_sided, 0.01);
}

TEST(Stages, Sizes) {
  EXPECT_EQ(stage_sizes(6), (std::array<int, 3>{2, 2, 2}));
  EXPECT_EQ(stage_sizes(7), (std::array<int, 3>{3, 2, 2}));
  EXPECT_EQ(stage_sizes(8), (std::array<int, 3>{3, 3, 2}));
  EXPECT_EQ(stage_sizes(3), (std::array<int, 3>{1, 1, 1}));
}

TEST(Stages, SplitMeans) {
  const std::vector<double> gaps = {1, 2, 3, 4, 5, 6, 7};
  const auto p = stage_split("p", gaps);
  EXPECT_DOUBLE_EQ(p.g1, 2.0);
  EXPECT_DOUBLE_EQ(p.g2, 4.5);
  EXPECT_DOUBLE_EQ(p.g3, 6.5);
  EXPECT_DOUBLE_EQ(p.delta12, 2.5);
  EXPECT_DOUBLE_EQ(p.delta23, 2.0);
  const std::vector<double> two = {1, 2};
  EXPECT_EQ(code_of([&] { stage_split("q", two); }), Errc::TooShort);
}

TEST(Stages, VolumeIsStrictlyAboveMedian) {
  std::vector<StageProfile> ps(4);
  const int lengths[4] = {3, 5, 5, 9};
  for (int i = 0; i < 4; ++i) ps[i].length = lengths[i];
  assign_volume(ps);
  EXPECT_EQ(ps[0].volume, Volume::Short);
  EXPECT_EQ(ps[1].volume, Volume::Short);
  EXPECT_EQ(ps[3].volume, Volume::Long);
}

TEST(RubberBand, ZeroResponseGivesZeroCoefficients) {
  std::vector<StageProfile> ps;
  for (int i = 0; i < 10; ++i) {
    StageProfile p;
    p.delta12 = i * 0.3 - 1;
    p.delta23 = 0;
    p.volume = i % 2 ? Volume::Long : Volume::Short;
    ps.push_back(p);
  }
  const auto f = rubber_band_fit(ps);
  for (const auto& c : f.coefficients) EXPECT_NEAR(c.estimate, 0.0, 1e-14);
}

TEST(RubberBand, RecoversSlope) {
  const auto data = synth::gen_mean_reverting_gaps(500, {}, 2);
  const auto f = rubber_band_fit(stage_profiles(data.corpus, data.valences));
  EXPECT_GE(f.coef("delta12").estimate, -0.75);
  EXPECT_LE(f.coef("delta12").estimate, -0.65);
}

TEST(RubberBand, Errors) {
  std::vector<StageProfile> ps(6);
  for (int i = 0; i < 6; ++i) {
    ps[i].delta12 = i;
    ps[i].delta23 = -i;
  }
  // Every profile SHORT: the volume column is constant zero.
  EXPECT_EQ(code_of([&] { rubber_band_fit(ps); }), Errc::RankDeficient);
  for (auto& p : ps) p.delta12 = 1;
  EXPECT_EQ(code_of([&] { rubber_band_fit(ps); }), Errc::ZeroVariance);
  ps.resize(3);
  EXPECT_EQ(code_of([&] { rubber_band_fit(ps); }), Errc::InsufficientPairs);
}

TEST(AgentValence, MeanDifference) {
  const Corpus c = synth::skeleton_corpus({{4}}, Dataset::Field, 1);
  ValenceMap m;
  for (const auto& in : c.stories[0].interactions) {
    m[key_of(in.user_turn)] = {key_of(in.user_turn), ValenceMethod::Lexicon, 1.5, 1};
    m[key_of(in.ai_turn)] = {key_of(in.ai_turn), ValenceMethod::Lexicon, 0.5 + 0.1 * in.interaction_index, 1};
  }
  const auto f = agent_valence_fit(c, m);
  EXPECT_NEAR(f.coef("agent_user").estimate, 1.5 - 0.65, 1e-12);
}
