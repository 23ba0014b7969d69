#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dyadic/corpus.hpp"
#include "dyadic/exec.hpp"
#include "dyadic/providers.hpp"
#include "dyadic/statkit.hpp"

namespace dyadic {

using Vector = std::vector<double>;
using VectorMap = std::map<TurnKey, Vector>;

struct EmbeddingVector {
  TurnKey turn;
  Vector values;
};

// One vector per turn, in input order, requested in batches. Throws
// DimensionDrift when the provider changes dimension mid-run.
std::vector<EmbeddingVector> embed_turns(std::span<const Turn> turns, EmbeddingProvider& provider,
                                         std::size_t batch_size = 32);

// Embeds every user and AI turn of the corpus.
VectorMap embed_corpus(const Corpus& corpus, EmbeddingProvider& provider,
                       std::size_t batch_size = 32);

// Precomputed vectors: JSON lines {"story_id", "turn_index", "vector": [..]}.
VectorMap load_vectors(const std::filesystem::path& path);
void write_vectors(const VectorMap& vectors, std::ostream& out);

// 1 - cos(u, v), in [0, 2]. Throws ZeroVector or DimensionMismatch.
double cosine_distance(std::span<const double> u, std::span<const double> v);

// Per-dimension mean and sample standard deviation (n - 1) over a population.
struct Standardizer {
  Vector mean;
  Vector sd;

  // Dimensions with sd == 0 map to 0.
  Vector apply(std::span<const double> v) const;
};

Standardizer fit_standardizer(const std::vector<Vector>& vectors, Exec exec = Exec::Parallel);

// z-scores each dimension over the given vectors. Throws TooFewVectors (< 2).
std::vector<Vector> standardize(const std::vector<Vector>& vectors, Exec exec = Exec::Parallel);

// Means of consecutive non-overlapping windows of bin_size vectors; a trailing
// partial window is dropped.
std::vector<Vector> bin_centroids(const std::vector<Vector>& vectors, int bin_size);

inline constexpr double kLogDistanceFloor = 1e-12;

struct BinRow {
  std::string story_id;
  Dataset dataset = Dataset::Field;
  int bin_size = 1;
  int pair_index = 0;  // distance between centroid pair_index and pair_index + 1
  double distance = 0;
  double log_distance = 0;  // ln(max(distance, 1e-12))
};

// Distances between consecutive bin centroids for each bin size. Identical
// centroids have distance 0; a zero centroid against a nonzero one counts as
// orthogonal (distance 1). Sizes yielding fewer than two bins contribute nothing.
std::vector<BinRow> centroid_distance_rows(const std::string& story_id, Dataset dataset,
                                           const std::vector<Vector>& user_vectors,
                                           std::span<const int> bin_sizes);

// 1 .. min(15, max_user_turns / 2).
std::vector<int> default_bin_sizes(int max_user_turns, int cap = 15);

// Standardizes user-turn vectors over the whole corpus and emits rows for
// every story. Row order is by story, then bin size, then pair.
std::vector<BinRow> exploration_rows(const Corpus& corpus, const VectorMap& vectors,
                                     std::span<const int> bin_sizes, Exec exec = Exec::Parallel);

struct ExplorationFit {
  stats::MixedFit model;  // log_distance ~ bin_size * dataset + (1 | story)
  stats::Coefficient slope_simulated;
  stats::Coefficient slope_field;
};

// dataset is coded FIELD = 1, SIMULATED = 0. Throws ConfigInvalid unless both
// datasets contribute at least two stories.
ExplorationFit exploration_fit(const std::vector<BinRow>& rows);

}  // namespace dyadic
