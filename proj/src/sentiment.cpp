#include "dyadic/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>

#include "dyadic/error.hpp"
#include "dyadic/text.hpp"

namespace dyadic {

void Lexicon::validate() const {
  for (const auto& [w, s] : entries) {
    if (!std::isfinite(s)) throw Error(Errc::ConfigInvalid, "lexicon score for '" + w + "' is not finite");
  }
  for (const auto& [w, m] : intensifiers) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw Error(Errc::ConfigInvalid, "intensifier '" + w + "' must have a positive multiplier");
    }
  }
  if (window < 0) throw Error(Errc::ConfigInvalid, "lexicon window must be >= 0");
}

const double* Lexicon::find(std::string_view token) const {
  auto it = entries.find(std::string(token));
  if (it != entries.end()) return &it->second;
  const auto cps = text::to_code_points(token);
  for (const auto& suffix : suffixes) {
    const auto scps = text::to_code_points(suffix);
    if (scps.empty() || cps.size() < scps.size() + 3) continue;
    if (!std::equal(scps.rbegin(), scps.rend(), cps.rbegin())) continue;
    auto stem = text::to_utf8(std::u32string_view(cps).substr(0, cps.size() - scps.size()));
    it = entries.find(stem);
    if (it != entries.end()) return &it->second;
    // Nouns whose base form ends in -e lose it before -erne, -er, -en ("dragerne").
    it = entries.find(stem + "e");
    if (it != entries.end()) return &it->second;
  }
  return nullptr;
}

namespace {

template <class F>
void read_lines(const std::filesystem::path& path, bool required, F&& on_fields) {
  std::ifstream in(path);
  if (!in) {
    if (required) throw Error(Errc::Io, "cannot read " + path.string());
    return;
  }
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    on_fields(fields, n);
  }
}

double parse_number(const std::string& s, const std::filesystem::path& path, long line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::ConfigInvalid, path.string() + " line " + std::to_string(line) +
                                         ": bad number '" + s + "'");
  }
}

}  // namespace

Lexicon load_lexicon(const std::filesystem::path& dir, int window) {
  Lexicon lex;
  lex.window = window;
  const auto entries = dir / "lexicon.tsv";
  read_lines(entries, true, [&](const std::vector<std::string>& f, long n) {
    if (f.size() < 2) throw Error(Errc::ConfigInvalid, entries.string() + " line " + std::to_string(n) + ": expected word<TAB>score");
    lex.entries[text::lower(f[0])] = parse_number(f[1], entries, n);
  });
  read_lines(dir / "negators.tsv", false, [&](const std::vector<std::string>& f, long) {
    lex.negators.insert(text::lower(f[0]));
  });
  const auto intens = dir / "intensifiers.tsv";
  read_lines(intens, false, [&](const std::vector<std::string>& f, long n) {
    if (f.size() < 2) throw Error(Errc::ConfigInvalid, intens.string() + " line " + std::to_string(n) + ": expected word<TAB>multiplier");
    lex.intensifiers[text::lower(f[0])] = parse_number(f[1], intens, n);
  });
  read_lines(dir / "suffixes.tsv", false, [&](const std::vector<std::string>& f, long) {
    lex.suffixes.push_back(text::lower(f[0]));
  });
  std::stable_sort(lex.suffixes.begin(), lex.suffixes.end(), [](const auto& a, const auto& b) {
    return text::code_point_length(a) > text::code_point_length(b);
  });
  lex.validate();
  return lex;
}

std::string_view to_string(ValenceMethod m) {
  return m == ValenceMethod::Lexicon ? "lexicon" : "embedding";
}

ValenceScore lexicon_valence(std::string_view utf8, const Lexicon& lexicon) {
  const auto tokens = text::word_tokens(utf8);
  ValenceScore out;
  out.method = ValenceMethod::Lexicon;
  double total = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lexicon.negators.count(tokens[i]) || lexicon.intensifiers.count(tokens[i])) continue;
    const double* score = lexicon.find(tokens[i]);
    if (score == nullptr) continue;
    double multiplier = 1.0;
    bool negated = false;
    const std::size_t from = i > static_cast<std::size_t>(lexicon.window) ? i - lexicon.window : 0;
    for (std::size_t j = from; j < i; ++j) {
      if (lexicon.negators.count(tokens[j])) negated = true;
      if (auto it = lexicon.intensifiers.find(tokens[j]); it != lexicon.intensifiers.end()) {
        multiplier *= it->second;
      }
    }
    total += *score * multiplier * (negated ? -1.0 : 1.0);
    ++out.matched_count;
  }
  out.value = out.matched_count > 0 ? total / out.matched_count : 0.0;
  return out;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  std::vector<std::string> words;
  read_lines(path, true, [&](const std::vector<std::string>& f, long) {
    auto w = text::collapse_whitespace(f[0]);
    if (!w.empty()) words.push_back(w);
  });
  return words;
}

namespace {

std::vector<double> normalized_mean(const std::vector<std::vector<double>>& vs) {
  std::vector<double> m(vs.front().size(), 0.0);
  for (const auto& v : vs) {
    if (v.size() != m.size()) throw Error(Errc::DimensionDrift, "seed embeddings differ in dimension");
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += v[k];
  }
  double norm = 0.0;
  for (double& x : m) {
    x /= static_cast<double>(vs.size());
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) throw Error(Errc::ZeroVector, "seed centroid has zero norm");
  for (double& x : m) x /= norm;
  return m;
}

}  // namespace

SeedCentroids seed_centroids(const std::vector<std::string>& positive_words,
                             const std::vector<std::string>& negative_words,
                             EmbeddingProvider& provider) {
  if (positive_words.empty() || negative_words.empty()) {
    throw Error(Errc::EmptyWordList, "seed word lists must be non-empty");
  }
  SeedCentroids c;
  c.positive_words = positive_words;
  c.negative_words = negative_words;
  c.positive = normalized_mean(provider.embed(positive_words));
  c.negative = normalized_mean(provider.embed(negative_words));
  if (c.positive.size() != c.negative.size()) {
    throw Error(Errc::DimensionDrift, "positive and negative centroids differ in dimension");
  }
  return c;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(Errc::DimensionMismatch, "vectors differ in dimension");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    uv += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  if (uu == 0.0 || vv == 0.0) throw Error(Errc::ZeroVector, "cosine of a zero vector");
  return std::clamp(uv / std::sqrt(uu * vv), -1.0, 1.0);
}

ValenceScore embedding_valence(std::span<const double> embedding, const SeedCentroids& centroids) {
  if (embedding.size() != centroids.positive.size()) {
    throw Error(Errc::DimensionMismatch, "embedding dimension differs from seed centroids");
  }
  ValenceScore out;
  out.method = ValenceMethod::Embedding;
  out.value = cosine_similarity(embedding, centroids.positive) -
              cosine_similarity(embedding, centroids.negative);
  return out;
}

ValenceGap valence_gap(const ValenceScore& user, const ValenceScore& ai) {
  if (user.method != ai.method) {
    throw Error(Errc::MethodMismatch, "valence gap needs the same method on both turns");
  }
  return ValenceGap{user.turn, user.value - ai.value};
}

namespace {

std::vector<const Turn*> all_turns(const Corpus& corpus) {
  std::vector<const Turn*> turns;
  for (const auto& story : corpus.stories) {
    for (const auto& inter : story.interactions) {
      turns.push_back(&inter.user_turn);
      turns.push_back(&inter.ai_turn);
    }
  }
  return turns;
}

template <class Score>
ValenceMap score_turns(const std::vector<const Turn*>& turns, Exec exec, Score&& score) {
  std::vector<ValenceScore> out(turns.size());
  const long n = static_cast<long>(turns.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) out[i] = score(*turns[i]);
  } else {
    // Exceptions must not escape an OpenMP region; capture the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 32)
    for (long i = 0; i < n; ++i) {
      try {
        out[i] = score(*turns[i]);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  ValenceMap map;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    out[i].turn = key_of(*turns[i]);
    map.emplace(out[i].turn, out[i]);
  }
  return map;
}

}  // namespace

ValenceMap score_corpus(const Corpus& corpus, const Lexicon& lexicon, Exec exec) {
  return score_turns(all_turns(corpus), exec,
                     [&](const Turn& t) { return lexicon_valence(t.text, lexicon); });
}

ValenceMap score_corpus(const Corpus& corpus, const std::map<TurnKey, std::vector<double>>& vectors,
                        const SeedCentroids& centroids, Exec exec) {
  return score_turns(all_turns(corpus), exec, [&](const Turn& t) {
    auto it = vectors.find(key_of(t));
    if (it == vectors.end()) {
      throw Error(Errc::ConfigInvalid, "no embedding for story " + t.story_id + " turn " +
                                               std::to_string(t.turn_index));
    }
    return embedding_valence(it->second, centroids);
  });
}

}  // namespace dyadic
