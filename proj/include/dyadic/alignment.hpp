#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "dyadic/corpus.hpp"
#include "dyadic/sentiment.hpp"
#include "dyadic/statkit.hpp"

namespace dyadic {

// USER_TO_AI pairs a user turn with the AI reply in the same interaction;
// AI_TO_USER pairs an AI turn with the next user turn (across sessions within a story).
enum class Direction { UserToAi, AiToUser };
std::string_view to_string(Direction d);

// Per-interaction valences of one story.
struct StoryValences {
  std::string story_id;
  Dataset dataset = Dataset::Field;
  std::vector<double> user;
  std::vector<double> ai;
};

StoryValences story_valences(const Story& story, const ValenceMap& valences);

struct PairedSeries {
  std::vector<double> x;
  std::vector<double> y;
};

// Throws InsufficientPairs when the story is too short for the direction.
PairedSeries directional_series(const StoryValences& story, Direction direction);

struct AlignmentResult {
  std::string story_id;
  Dataset dataset = Dataset::Field;
  Direction direction = Direction::UserToAi;
  int n_pairs = 0;
  double r = 0;
  double fisher_z = 0;  // atanh of r clamped to +-(1 - 1e-7)
};

// Throws InsufficientPairs (n < 3) or ZeroVariance.
AlignmentResult story_alignment(const PairedSeries& series, std::string story_id = {},
                                Dataset dataset = Dataset::Field,
                                Direction direction = Direction::UserToAi);

stats::TTestResult alignment_ttest(std::span<const double> zs, double mu0 = 0.0);

// Balanced Dataset x Turn ANOVA on story-level Fisher z. Throws EmptyCell,
// Unbalanced, or ZeroVariance for constant input.
stats::AnovaTable alignment_anova(const std::vector<AlignmentResult>& results);

enum class Volume { Long, Short };
std::string_view to_string(Volume v);

struct StageProfile {
  std::string session_id;
  std::string story_id;
  Dataset dataset = Dataset::Field;
  int length = 0;
  double g1 = 0, g2 = 0, g3 = 0;
  double delta12 = 0;  // g2 - g1
  double delta23 = 0;  // g3 - g2
  Volume volume = Volume::Short;
};

// Early/middle/late stage sizes; the n % 3 extra items go to the earliest stages.
std::array<int, 3> stage_sizes(int n);

// Throws TooShort for fewer than three interactions. volume is left SHORT;
// assign_volume sets it relative to a population of profiles.
StageProfile stage_split(std::string session_id, std::span<const double> gaps);

// LONG when length is strictly above the median length of `profiles`.
void assign_volume(std::vector<StageProfile>& profiles);

// Stage profiles for every session with >= 3 interactions, volume assigned.
std::vector<StageProfile> stage_profiles(const Corpus& corpus, const ValenceMap& valences);

// OLS of delta23 on delta12, volume (LONG = 1) and their product.
stats::RegressionFit rubber_band_fit(const std::vector<StageProfile>& profiles);

// OLS of per-turn valence on agent (USER = 1, AI = 0): the user-minus-AI mean difference.
stats::RegressionFit agent_valence_fit(const Corpus& corpus, const ValenceMap& valences);

}  // namespace dyadic
