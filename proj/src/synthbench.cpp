#include "dyadic/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyadic/csv.hpp"
#include "dyadic/error.hpp"

namespace dyadic::synth {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream ^ 0x5851f42d4c957f2dULL))) {}

std::uint64_t CounterRng::next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int CounterRng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next_u64() % span);
}

double CounterRng::normal(double mean, double sd) {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

constexpr const char* kWords[] = {
    "og",     "der",    "var",    "engang", "en",     "lille",  "drage",  "som",
    "boede",  "i",      "skoven", "hun",    "fandt",  "et",     "kort",   "over",
    "havet",  "rejsen", "mod",    "stjernerne", "begyndte", "robotten", "sagde", "hej",
    "prinsessen", "lo",  "de",     "gik",    "sammen", "hjem",   "natten", "faldt",
    "på",     "byen",   "skibet", "sejlede", "videre", "med",   "vinden", "bag",
    "glad",   "trist",  "god",    "dårlig", "smuk",   "farlig", "elsker", "hader",
    "sjov",   "bange",  "venlig", "vred",   "ikke",   "meget",
};

std::string filler_text(CounterRng& rng) {
  const int n = rng.uniform_int(6, 14);
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kWords[rng.next_u64() % std::size(kWords)];
  }
  s += '.';
  return s;
}

}  // namespace

Corpus skeleton_corpus(const std::vector<std::vector<int>>& session_lengths, Dataset dataset,
                       std::uint64_t seed, const std::string& story_prefix) {
  CounterRng rng(seed, 1);
  std::vector<Turn> turns;
  for (std::size_t s = 0; s < session_lengths.size(); ++s) {
    const std::string story = story_prefix + "-" + std::to_string(s + 1);
    int turn = 0;
    for (std::size_t k = 0; k < session_lengths[s].size(); ++k) {
      const std::string session = story + "-s" + std::to_string(k + 1);
      for (int i = 0; i < session_lengths[s][k]; ++i) {
        turns.push_back(make_turn(story, session, turn++, Agent::User, filler_text(rng)));
        turns.push_back(make_turn(story, session, turn++, Agent::Ai, filler_text(rng)));
      }
    }
  }
  return build_corpus(std::move(turns), dataset);
}

std::vector<StoryValences> gen_coupled_dyad(int n_stories, int n_interactions, double kappa,
                                            double sigma, Direction follower_direction,
                                            std::uint64_t seed) {
  if (kappa < -1.0 || kappa > 1.0) throw Error(Errc::OutOfRange, "kappa must lie in [-1, 1]");
  if (!(sigma > 0.0)) throw Error(Errc::OutOfRange, "sigma must be positive");
  std::vector<StoryValences> out;
  for (int s = 0; s < n_stories; ++s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s) + 100);
    StoryValences sv;
    sv.story_id = "dyad-" + std::to_string(s + 1);
    sv.user.resize(n_interactions);
    sv.ai.resize(n_interactions);
    if (follower_direction == Direction::UserToAi) {
      for (int i = 0; i < n_interactions; ++i) {
        sv.user[i] = rng.normal();
        sv.ai[i] = kappa * sv.user[i] + rng.normal(0.0, sigma);
      }
    } else {
      for (int i = 0; i < n_interactions; ++i) sv.ai[i] = rng.normal();
      if (n_interactions > 0) sv.user[0] = rng.normal();
      for (int i = 1; i < n_interactions; ++i) sv.user[i] = kappa * sv.ai[i - 1] + rng.normal(0.0, sigma);
    }
    out.push_back(std::move(sv));
  }
  return out;
}

std::vector<Vector> gen_embedding_walk(int n, int dim, double sigma, WalkMode mode,
                                       std::uint64_t seed, double origin_sd) {
  if (n < 4 || dim < 2) throw Error(Errc::OutOfRange, "embedding walk needs n >= 4 and dim >= 2");
  CounterRng rng(seed, 7);
  Vector origin(dim);
  for (double& x : origin) x = origin_sd > 0.0 ? rng.normal(0.0, origin_sd) : 0.0;
  std::vector<Vector> out;
  out.reserve(n);
  Vector current = origin;
  for (int t = 0; t < n; ++t) {
    Vector v(dim);
    const Vector& base = mode == WalkMode::Walk ? current : origin;
    for (int k = 0; k < dim; ++k) v[k] = base[k] + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
    if (mode == WalkMode::Walk) current = v;
    out.push_back(std::move(v));
  }
  return out;
}

ExplorationData gen_exploration_data(int stories_per_dataset, int n_interactions, int dim,
                                     double sigma, double origin_sd, std::uint64_t seed) {
  std::vector<std::vector<int>> lengths(stories_per_dataset, std::vector<int>{n_interactions});
  ExplorationData data;
  auto walks = skeleton_corpus(lengths, Dataset::Field, seed, "walk");
  auto iids = skeleton_corpus(lengths, Dataset::Simulated, seed + 1, "iid");
  data.corpus.dataset = Dataset::Field;
  std::uint64_t stream = 0;
  for (auto* part : {&walks, &iids}) {
    for (auto& story : part->stories) {
      const auto mode = story.dataset == Dataset::Field ? WalkMode::Walk : WalkMode::Iid;
      const auto vs = gen_embedding_walk(n_interactions, dim, sigma, mode,
                                         splitmix64(seed + ++stream), origin_sd);
      for (int i = 0; i < n_interactions; ++i) {
        data.vectors[key_of(story.interactions[i].user_turn)] = vs[i];
      }
      data.corpus.stories.push_back(std::move(story));
    }
  }
  return data;
}

std::vector<SurprisalRecord> gen_resonance_records(int n, const ResonanceTruth& truth,
                                                   std::uint64_t seed) {
  if (n < 100) throw Error(Errc::OutOfRange, "resonance generator needs n >= 100");
  CounterRng rng(seed, 3);
  std::vector<SurprisalRecord> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    SurprisalRecord r;
    r.story_id = "res-" + std::to_string(i / 100 + 1);
    r.turn = TurnKey{r.story_id, i % 100};
    r.agent = i % 2 == 0 ? Agent::User : Agent::Ai;
    r.n_tokens = rng.uniform_int(5, 80);
    const double nov = rng.uniform(3.0, 9.0);
    const bool user = r.agent == Agent::User;
    const double noise = truth.noise_sd > 0.0 ? rng.normal(0.0, truth.noise_sd) : 0.0;
    const double res = (user ? truth.intercept_user : truth.intercept_ai) +
                       (user ? truth.slope_user : truth.slope_ai) * nov + noise;
    r.novelty_bits = nov;
    r.transience_bits = nov - res;
    r.resonance_bits = *r.novelty_bits - *r.transience_bits;
    out.push_back(std::move(r));
  }
  return out;
}

RubberBandData gen_mean_reverting_gaps(int n_participants, const RubberBandTruth& truth,
                                       std::uint64_t seed) {
  if (truth.min_length < 3 || truth.max_length < truth.min_length) {
    throw Error(Errc::OutOfRange, "session lengths must be >= 3");
  }
  CounterRng rng(seed, 11);
  std::vector<std::vector<int>> lengths;
  std::vector<int> flat;
  for (int p = 0; p < n_participants; ++p) {
    const int len = rng.uniform_int(truth.min_length, truth.max_length);
    lengths.push_back({len});
    flat.push_back(len);
  }
  std::sort(flat.begin(), flat.end());
  const std::size_t m = flat.size();
  const double median = m == 0 ? 0.0 : (m % 2 ? flat[m / 2] : 0.5 * (flat[m / 2 - 1] + flat[m / 2]));

  RubberBandData data;
  data.corpus = skeleton_corpus(lengths, Dataset::Field, seed, "participant");
  for (auto& story : data.corpus.stories) {
    const int len = static_cast<int>(story.interactions.size());
    const double vol = len > median ? 1.0 : 0.0;
    const double g1 = rng.normal();
    const double d12 = rng.normal(0.0, truth.delta12_sd);
    const double d23 = truth.intercept + truth.beta1 * d12 + truth.volume_shift * vol +
                       rng.normal(0.0, truth.noise_sd);
    const double g[3] = {g1, g1 + d12, g1 + d12 + d23};
    const auto sizes = stage_sizes(len);
    int at = 0;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> e(sizes[k]);
      double ebar = 0.0;
      for (double& x : e) {
        x = rng.normal(0.0, truth.within_sd);
        ebar += x;
      }
      ebar /= sizes[k];
      for (int i = 0; i < sizes[k]; ++i, ++at) {
        const auto& inter = story.interactions[at];
        const double ai = rng.normal();
        ValenceScore su{key_of(inter.user_turn), ValenceMethod::Lexicon, ai + g[k] + e[i] - ebar, 1};
        ValenceScore sa{key_of(inter.ai_turn), ValenceMethod::Lexicon, ai, 1};
        data.valences[su.turn] = su;
        data.valences[sa.turn] = sa;
      }
    }
  }
  return data;
}

void write_valence_table(const std::vector<StoryValences>& stories, const std::filesystem::path& path) {
  CsvWriter csv(path, {"story_id", "dataset", "interaction_index", "user_valence", "ai_valence"});
  for (const auto& s : stories) {
    for (std::size_t i = 0; i < s.user.size(); ++i) {
      csv.row(s.story_id, std::string(to_string(s.dataset)), static_cast<int>(i), s.user[i], s.ai[i]);
    }
  }
  csv.close();
}

void write_surprisal_records(const std::vector<SurprisalRecord>& records,
                             const std::filesystem::path& path) {
  CsvWriter csv(path, {"story_id", "turn_index", "agent", "n_tokens", "novelty_bits",
                       "transience_bits", "resonance_bits", "boundary_excluded"});
  for (const auto& r : records) {
    csv.row(r.story_id, r.turn.turn_index, std::string(to_string(r.agent)), r.n_tokens,
            r.novelty_bits, r.transience_bits, r.resonance_bits, r.boundary_excluded);
  }
  csv.close();
}

}  // namespace dyadic::synth
