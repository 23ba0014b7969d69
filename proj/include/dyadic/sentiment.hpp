#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/corpus.hpp"
#include "dyadic/exec.hpp"
#include "dyadic/providers.hpp"

namespace dyadic {

// Rule-based valence lexicon: lookup, negation flip and intensifier scaling
// over a backward window of tokens.
struct Lexicon {
  std::map<std::string, double> entries;
  std::set<std::string> negators;
  std::map<std::string, double> intensifiers;  // multiplier > 0
  std::vector<std::string> suffixes;           // stripped, longest first, when lookup misses
  int window = 3;

  // Throws ConfigInvalid on non-finite scores, non-positive multipliers or window < 0.
  void validate() const;
  // Exact lookup, then suffix stripping (stem keeps at least 3 code points),
  // trying each stem as is and with a restored final -e.
  const double* find(std::string_view token) const;
};

// Reads lexicon.tsv (word<TAB>score), negators.tsv (one word per line),
// intensifiers.tsv (word<TAB>multiplier) and optional suffixes.tsv from `dir`.
// Lines starting with '#' are comments.
Lexicon load_lexicon(const std::filesystem::path& dir, int window = 3);

enum class ValenceMethod { Lexicon, Embedding };
std::string_view to_string(ValenceMethod m);

struct ValenceScore {
  TurnKey turn;
  ValenceMethod method = ValenceMethod::Lexicon;
  double value = 0;
  int matched_count = 0;  // lexicon method only
};

// Mean over matched tokens of score * intensifier product * negation sign; 0
// with matched_count 0 when nothing matches.
ValenceScore lexicon_valence(std::string_view text, const Lexicon& lexicon);

struct SeedCentroids {
  std::vector<double> positive;  // unit norm
  std::vector<double> negative;  // unit norm
  std::vector<std::string> positive_words;
  std::vector<std::string> negative_words;
};

SeedCentroids seed_centroids(const std::vector<std::string>& positive_words,
                             const std::vector<std::string>& negative_words,
                             EmbeddingProvider& provider);

// One word per line, '#' comments.
std::vector<std::string> load_word_list(const std::filesystem::path& path);

double cosine_similarity(std::span<const double> u, std::span<const double> v);

// cos(e, positive) - cos(e, negative), in [-2, 2].
ValenceScore embedding_valence(std::span<const double> embedding, const SeedCentroids& centroids);

struct ValenceGap {
  TurnKey user_turn;
  double gap = 0;  // user - ai
};

ValenceGap valence_gap(const ValenceScore& user, const ValenceScore& ai);

using ValenceMap = std::map<TurnKey, ValenceScore>;

// Scores every turn of the corpus.
ValenceMap score_corpus(const Corpus& corpus, const Lexicon& lexicon, Exec exec = Exec::Parallel);
ValenceMap score_corpus(const Corpus& corpus, const std::map<TurnKey, std::vector<double>>& vectors,
                        const SeedCentroids& centroids, Exec exec = Exec::Parallel);

}  // namespace dyadic
