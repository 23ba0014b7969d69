#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyadic/corpus.hpp"
#include "dyadic/exec.hpp"
#include "dyadic/providers.hpp"
#include "dyadic/statkit.hpp"

namespace dyadic {

inline constexpr int kDefaultWindow = 128;

struct TokenSpan {
  int turn_index = 0;
  Agent agent = Agent::User;
  std::size_t begin = 0;  // half-open [begin, end) into TokenStream::tokens
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
};

struct TokenStream {
  std::string story_id;
  std::vector<std::int32_t> tokens;
  std::vector<TokenSpan> spans;  // contiguous, in turn order
};

// Tokenizes every turn of the story in order. Throws TokenizerMismatch when a
// turn's pieces do not reassemble its text (whitespace and U+2581 ignored).
TokenStream segment_stream(const Story& story, Tokenizer& tokenizer);

// Mean surprisal in bits of the span's tokens given the w tokens preceding it,
// teacher-forced over the span. Throws BoundaryExcluded when fewer than w
// tokens precede the span.
double novelty(const TokenStream& stream, std::size_t span_index, SurprisalProvider& provider,
               int w = kDefaultWindow);

// Mean surprisal in bits of the w tokens following the span, with the span as
// context. Throws BoundaryExcluded when fewer than w tokens follow.
double transience(const TokenStream& stream, std::size_t span_index, SurprisalProvider& provider,
                  int w = kDefaultWindow);

// n - t. Throws BoundaryExcluded if either side is missing.
double resonance(std::optional<double> novelty_bits, std::optional<double> transience_bits);

struct SurprisalRecord {
  std::string story_id;
  TurnKey turn;
  Agent agent = Agent::User;
  int n_tokens = 0;
  std::optional<double> novelty_bits;
  std::optional<double> transience_bits;
  std::optional<double> resonance_bits;
  bool boundary_excluded = false;
};

// One record per turn. Turns with fewer than w tokens before or after them are
// flagged boundary_excluded and carry no values.
std::vector<SurprisalRecord> story_records(const TokenStream& stream, SurprisalProvider& provider,
                                           int w = kDefaultWindow);

std::vector<SurprisalRecord> surprisal_records(const Corpus& corpus, Tokenizer& tokenizer,
                                               SurprisalProvider& provider, int w = kDefaultWindow,
                                               Exec exec = Exec::Parallel);

// Token-amount bucket of each value: deciles of the pooled values, ties kept together.
std::vector<int> decile_groups(std::span<const int> n_tokens);

struct ResonanceFit {
  stats::MixedFit model;  // resonance ~ novelty * agent + (1 | token-amount decile)
  stats::Coefficient slope_user;
  stats::Coefficient slope_ai;
  int n_records = 0;
};

// Agent coded USER = 0, AI = 1; boundary-excluded records are skipped. Throws
// ConfigInvalid unless both agents and at least two token-amount groups appear.
ResonanceFit resonance_fit(const std::vector<SurprisalRecord>& records);

}  // namespace dyadic
