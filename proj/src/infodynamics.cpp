#include "dyadic/infodynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>

#include "dyadic/error.hpp"
#include "dyadic/text.hpp"

namespace dyadic {

namespace {

std::u32string strip_spacing(std::string_view utf8) {
  std::u32string out;
  for (char32_t c : text::to_code_points(utf8)) {
    if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
        c == 0x2581 || c == 0xA0) {
      continue;
    }
    out.push_back(c);
  }
  return out;
}

double mean_bits(const std::vector<double>& logprobs, std::size_t expected, LogprobBase base) {
  if (logprobs.size() != expected) {
    throw Error(Errc::ProviderUnavailable, "surprisal provider returned " +
                                               std::to_string(logprobs.size()) + " values for " +
                                               std::to_string(expected) + " targets");
  }
  double sum = 0.0;
  for (double lp : logprobs) {
    if (!std::isfinite(lp) || lp > 0.0) {
      throw Error(Errc::ProviderUnavailable, "surprisal provider returned an invalid log-probability");
    }
    sum += to_bits(lp, base);
  }
  // + 0.0 turns a -0.0 from p == 1 into 0.
  return sum / static_cast<double>(expected) + 0.0;
}

const TokenSpan& span_at(const TokenStream& stream, std::size_t i) {
  if (i >= stream.spans.size()) throw Error(Errc::OutOfRange, "span index out of range");
  return stream.spans[i];
}

}  // namespace

TokenStream segment_stream(const Story& story, Tokenizer& tokenizer) {
  TokenStream s;
  s.story_id = story.story_id;
  auto add = [&](const Turn& t) {
    const auto pieces = tokenizer.tokenize(t.text);
    std::string joined;
    for (const auto& tok : pieces) joined += tok.piece;
    if (pieces.empty() || strip_spacing(joined) != strip_spacing(t.text)) {
      throw Error(Errc::TokenizerMismatch, "tokens of story " + t.story_id + " turn " +
                                               std::to_string(t.turn_index) +
                                               " do not reassemble the turn text");
    }
    TokenSpan span{t.turn_index, t.agent, s.tokens.size(), s.tokens.size() + pieces.size()};
    for (const auto& tok : pieces) s.tokens.push_back(tok.id);
    s.spans.push_back(span);
  };
  for (const auto& inter : story.interactions) {
    add(inter.user_turn);
    add(inter.ai_turn);
  }
  return s;
}

double novelty(const TokenStream& stream, std::size_t span_index, SurprisalProvider& provider,
               int w) {
  const auto& span = span_at(stream, span_index);
  if (w < 1) throw Error(Errc::OutOfRange, "window must be >= 1");
  if (span.begin < static_cast<std::size_t>(w)) {
    throw Error(Errc::BoundaryExcluded, "fewer than " + std::to_string(w) +
                                            " tokens precede turn " + std::to_string(span.turn_index));
  }
  std::span<const std::int32_t> all(stream.tokens);
  auto context = all.subspan(span.begin - w, w);
  auto targets = all.subspan(span.begin, span.size());
  return mean_bits(provider.logprobs(context, targets), targets.size(),
                   provider.capabilities().logprob_base);
}

double transience(const TokenStream& stream, std::size_t span_index, SurprisalProvider& provider,
                  int w) {
  const auto& span = span_at(stream, span_index);
  if (w < 1) throw Error(Errc::OutOfRange, "window must be >= 1");
  if (span.end + w > stream.tokens.size()) {
    throw Error(Errc::BoundaryExcluded, "fewer than " + std::to_string(w) +
                                            " tokens follow turn " + std::to_string(span.turn_index));
  }
  std::span<const std::int32_t> all(stream.tokens);
  auto context = all.subspan(span.begin, span.size());
  auto targets = all.subspan(span.end, w);
  return mean_bits(provider.logprobs(context, targets), targets.size(),
                   provider.capabilities().logprob_base);
}

double resonance(std::optional<double> novelty_bits, std::optional<double> transience_bits) {
  if (!novelty_bits || !transience_bits) {
    throw Error(Errc::BoundaryExcluded, "resonance needs both novelty and transience");
  }
  return *novelty_bits - *transience_bits;
}

std::vector<SurprisalRecord> story_records(const TokenStream& stream, SurprisalProvider& provider,
                                           int w) {
  std::vector<SurprisalRecord> out;
  for (std::size_t i = 0; i < stream.spans.size(); ++i) {
    const auto& span = stream.spans[i];
    SurprisalRecord r;
    r.story_id = stream.story_id;
    r.turn = TurnKey{stream.story_id, span.turn_index};
    r.agent = span.agent;
    r.n_tokens = static_cast<int>(span.size());
    r.boundary_excluded = span.begin < static_cast<std::size_t>(w) ||
                          span.end + w > stream.tokens.size();
    if (!r.boundary_excluded) {
      r.novelty_bits = novelty(stream, i, provider, w);
      r.transience_bits = transience(stream, i, provider, w);
      r.resonance_bits = resonance(r.novelty_bits, r.transience_bits);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SurprisalRecord> surprisal_records(const Corpus& corpus, Tokenizer& tokenizer,
                                               SurprisalProvider& provider, int w, Exec exec) {
  // Tokenize serially: tokenizers are not required to be thread-safe.
  std::vector<TokenStream> streams;
  for (const auto& story : corpus.stories) streams.push_back(segment_stream(story, tokenizer));

  std::vector<std::vector<SurprisalRecord>> per_story(streams.size());
  const long n = static_cast<long>(streams.size());
  if (exec == Exec::Serial) {
    for (long s = 0; s < n; ++s) per_story[s] = story_records(streams[s], provider, w);
  } else {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (long s = 0; s < n; ++s) {
      try {
        per_story[s] = story_records(streams[s], provider, w);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  std::vector<SurprisalRecord> out;
  for (auto& v : per_story) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<int> decile_groups(std::span<const int> n_tokens) {
  std::vector<int> sorted(n_tokens.begin(), n_tokens.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> cuts;
  for (int k = 1; k < 10 && !sorted.empty(); ++k) {
    cuts.push_back(sorted[k * sorted.size() / 10]);
  }
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<int> groups;
  groups.reserve(n_tokens.size());
  for (int v : n_tokens) {
    groups.push_back(static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin()));
  }
  return groups;
}

ResonanceFit resonance_fit(const std::vector<SurprisalRecord>& records) {
  std::vector<const SurprisalRecord*> kept;
  bool has_user = false, has_ai = false;
  for (const auto& r : records) {
    if (r.boundary_excluded || !r.novelty_bits || !r.resonance_bits) continue;
    kept.push_back(&r);
    (r.agent == Agent::User ? has_user : has_ai) = true;
  }
  if (!has_user || !has_ai) throw Error(Errc::ConfigInvalid, "resonance fit needs both agents");

  std::vector<int> amounts;
  for (const auto* r : kept) amounts.push_back(r->n_tokens);
  const auto groups = decile_groups(amounts);
  if (std::set<int>(groups.begin(), groups.end()).size() < 2) {
    throw Error(Errc::ConfigInvalid, "resonance fit needs at least two token-amount groups");
  }

  const auto n = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd X(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ai = kept[i]->agent == Agent::Ai ? 1.0 : 0.0;
    const double nov = *kept[i]->novelty_bits;
    X.row(i) << 1.0, nov, ai, nov * ai;
    y(i) = *kept[i]->resonance_bits;
  }
  ResonanceFit fit;
  fit.n_records = static_cast<int>(n);
  fit.model = stats::mixed_random_intercept(y, X, groups,
                                            {"intercept", "novelty", "agent_ai", "novelty:agent_ai"});
  Eigen::VectorXd w_user(4), w_ai(4);
  w_user << 0, 1, 0, 0;
  w_ai << 0, 1, 0, 1;
  fit.slope_user = stats::linear_combination(fit.model.coefficients, fit.model.covariance, w_user,
                                             fit.model.df_residual, "slope_user");
  fit.slope_ai = stats::linear_combination(fit.model.coefficients, fit.model.covariance, w_ai,
                                           fit.model.df_residual, "slope_ai");
  return fit;
}

}  // namespace dyadic
