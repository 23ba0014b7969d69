#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dyadic/alignment.hpp"
#include "dyadic/corpus.hpp"
#include "dyadic/exploration.hpp"
#include "dyadic/infodynamics.hpp"
#include "dyadic/sentiment.hpp"

namespace dyadic::synth {

// Counter-based generator: draw k of stream `seed` is splitmix64(seed, k), so
// any draw can be recomputed without replaying the ones before it.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  double uniform();                  // [0, 1), 53-bit resolution
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);   // inclusive bounds
  // Box-Muller on two uniforms, cosine branch only (one normal per two draws).
  double normal(double mean = 0.0, double sd = 1.0);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Stories whose sessions have the given lengths, filled with short placeholder texts.
Corpus skeleton_corpus(const std::vector<std::vector<int>>& session_lengths, Dataset dataset,
                       std::uint64_t seed, const std::string& story_prefix = "story");

// Leader valences i.i.d. N(0, 1); follower = kappa * triggering leader turn + N(0, sigma).
// UserToAi: the AI reply follows the user turn of the same interaction.
// AiToUser: the next user turn follows the previous AI reply (the first user turn is i.i.d.).
std::vector<StoryValences> gen_coupled_dyad(int n_stories, int n_interactions, double kappa,
                                            double sigma, Direction follower_direction,
                                            std::uint64_t seed);

enum class WalkMode { Walk, Iid };

// WALK: v0 = origin + N(0, sigma^2 I), v_{t+1} = v_t + N(0, sigma^2 I).
// IID:  v_t = origin + N(0, sigma^2 I).
// origin ~ N(0, origin_sd^2 I) per sequence; origin_sd = 0 puts it at zero.
std::vector<Vector> gen_embedding_walk(int n, int dim, double sigma, WalkMode mode,
                                       std::uint64_t seed, double origin_sd = 0.0);

struct ExplorationData {
  Corpus corpus;  // FIELD stories are walks, SIMULATED stories are i.i.d.
  VectorMap vectors;
};

ExplorationData gen_exploration_data(int stories_per_dataset, int n_interactions, int dim,
                                     double sigma, double origin_sd, std::uint64_t seed);

struct ResonanceTruth {
  double slope_user = 0.973;
  double slope_ai = 0.842;
  double intercept_user = -2.0;
  double intercept_ai = -2.0;
  double noise_sd = 0.3;
};

// Alternating USER/AI records; novelty ~ U[3, 9] bits, n_tokens ~ U{5..80}.
// resonance = intercept + slope * novelty + N(0, noise_sd); transience is set
// so that resonance == novelty - transience exactly.
std::vector<SurprisalRecord> gen_resonance_records(int n, const ResonanceTruth& truth,
                                                   std::uint64_t seed);

struct RubberBandTruth {
  double beta1 = -0.7;         // delta23 on delta12
  double intercept = 0.0;
  double volume_shift = 0.0;   // added to delta23 for LONG sessions
  double delta12_sd = 1.0;
  double noise_sd = 0.1;       // on delta23
  double within_sd = 0.8;      // per-interaction scatter around stage means
  int min_length = 6;
  int max_length = 30;
};

struct RubberBandData {
  Corpus corpus;  // one single-session story per participant
  ValenceMap valences;
};

// Stage means follow g2 = g1 + delta12, g3 = g2 + beta1 * delta12 + noise.
// Per-interaction scatter is centered within each stage so the stage means
// are exactly the generated ones.
RubberBandData gen_mean_reverting_gaps(int n_participants, const RubberBandTruth& truth,
                                       std::uint64_t seed);

// Writes a valence table (story_id, dataset, interaction_index, user_valence, ai_valence).
void write_valence_table(const std::vector<StoryValences>& stories, const std::filesystem::path& path);

// Writes surprisal records as CSV.
void write_surprisal_records(const std::vector<SurprisalRecord>& records,
                             const std::filesystem::path& path);

}  // namespace dyadic::synth
