#include "dyadic/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>

#include "dyadic/error.hpp"
#include "dyadic/text.hpp"

namespace dyadic {

using nlohmann::json;

std::vector<EmbeddingVector> embed_turns(std::span<const Turn> turns, EmbeddingProvider& provider,
                                         std::size_t batch_size) {
  std::vector<EmbeddingVector> out;
  out.reserve(turns.size());
  batch_size = std::max<std::size_t>(1, batch_size);
  std::size_t dim = 0;
  for (std::size_t start = 0; start < turns.size(); start += batch_size) {
    const std::size_t end = std::min(turns.size(), start + batch_size);
    std::vector<std::string> texts;
    for (std::size_t i = start; i < end; ++i) {
      if (text::collapse_whitespace(turns[i].text).empty()) {
        throw Error(Errc::MalformedRecord, "cannot embed empty turn in story " + turns[i].story_id);
      }
      texts.push_back(turns[i].text);
    }
    auto vectors = provider.embed(texts);
    if (vectors.size() != texts.size()) {
      throw Error(Errc::ProviderUnavailable, "embedding provider returned wrong vector count");
    }
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (dim == 0) dim = vectors[i].size();
      if (vectors[i].size() != dim || dim == 0) {
        throw Error(Errc::DimensionDrift, "embedding dimension changed from " + std::to_string(dim) +
                                              " to " + std::to_string(vectors[i].size()));
      }
      for (double x : vectors[i]) {
        if (!std::isfinite(x)) throw Error(Errc::ProviderUnavailable, "non-finite embedding value");
      }
      out.push_back(EmbeddingVector{key_of(turns[start + i]), std::move(vectors[i])});
    }
  }
  return out;
}

VectorMap embed_corpus(const Corpus& corpus, EmbeddingProvider& provider, std::size_t batch_size) {
  std::vector<Turn> turns;
  for (const auto& story : corpus.stories) {
    for (const auto& inter : story.interactions) {
      turns.push_back(inter.user_turn);
      turns.push_back(inter.ai_turn);
    }
  }
  VectorMap out;
  for (auto& e : embed_turns(turns, provider, batch_size)) out.emplace(e.turn, std::move(e.values));
  return out;
}

VectorMap load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  VectorMap out;
  std::string line;
  long n = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::collapse_whitespace(line).empty()) continue;
    try {
      auto rec = json::parse(line);
      TurnKey key;
      const auto& sid = rec.at("story_id");
      key.story_id = sid.is_string() ? sid.get<std::string>() : std::to_string(sid.get<long long>());
      key.turn_index = rec.at("turn_index").get<int>();
      auto v = rec.at("vector").get<Vector>();
      if (dim == 0) dim = v.size();
      if (v.size() != dim || dim == 0) {
        throw Error(Errc::DimensionDrift, path.string() + " line " + std::to_string(n) +
                                              ": vector dimension differs");
      }
      out[key] = std::move(v);
    } catch (const json::exception& e) {
      throw Error(Errc::MalformedRecord, path.string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_vectors(const VectorMap& vectors, std::ostream& out) {
  for (const auto& [key, v] : vectors) {
    out << json{{"story_id", key.story_id}, {"turn_index", key.turn_index}, {"vector", v}}.dump()
        << '\n';
  }
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(Errc::DimensionMismatch, "vectors differ in dimension");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    uv += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  if (uu == 0.0 || vv == 0.0) throw Error(Errc::ZeroVector, "cosine distance of a zero vector");
  return 1.0 - std::clamp(uv / std::sqrt(uu * vv), -1.0, 1.0);
}

Vector Standardizer::apply(std::span<const double> v) const {
  if (v.size() != mean.size()) throw Error(Errc::DimensionMismatch, "vector dimension differs");
  Vector out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = sd[k] > 0.0 ? (v[k] - mean[k]) / sd[k] : 0.0;
  return out;
}

namespace {

void column_moments(const std::vector<Vector>& vs, std::size_t k, double& mean, double& sd) {
  double s = 0.0;
  for (const auto& v : vs) s += v[k];
  mean = s / static_cast<double>(vs.size());
  double ss = 0.0;
  for (const auto& v : vs) ss += (v[k] - mean) * (v[k] - mean);
  sd = std::sqrt(ss / static_cast<double>(vs.size() - 1));
}

}  // namespace

Standardizer fit_standardizer(const std::vector<Vector>& vectors, Exec exec) {
  if (vectors.size() < 2) throw Error(Errc::TooFewVectors, "standardization needs >= 2 vectors");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) throw Error(Errc::DimensionMismatch, "vectors differ in dimension");
  }
  Standardizer st;
  st.mean.assign(dim, 0.0);
  st.sd.assign(dim, 0.0);
  const long d = static_cast<long>(dim);
  if (exec == Exec::Serial) {
    for (long k = 0; k < d; ++k) column_moments(vectors, k, st.mean[k], st.sd[k]);
  } else {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < d; ++k) column_moments(vectors, k, st.mean[k], st.sd[k]);
  }
  return st;
}

std::vector<Vector> standardize(const std::vector<Vector>& vectors, Exec exec) {
  const Standardizer st = fit_standardizer(vectors, exec);
  std::vector<Vector> out(vectors.size());
  const long n = static_cast<long>(vectors.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) out[i] = st.apply(vectors[i]);
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out[i] = st.apply(vectors[i]);
  }
  return out;
}

std::vector<Vector> bin_centroids(const std::vector<Vector>& vectors, int bin_size) {
  if (bin_size < 1) throw Error(Errc::OutOfRange, "bin_size must be >= 1");
  std::vector<Vector> out;
  const std::size_t bins = vectors.size() / static_cast<std::size_t>(bin_size);
  for (std::size_t b = 0; b < bins; ++b) {
    Vector c(vectors[b * bin_size].size(), 0.0);
    for (int i = 0; i < bin_size; ++i) {
      const auto& v = vectors[b * bin_size + i];
      if (v.size() != c.size()) throw Error(Errc::DimensionMismatch, "vectors differ in dimension");
      for (std::size_t k = 0; k < c.size(); ++k) c[k] += v[k];
    }
    for (double& x : c) x /= bin_size;
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

double guarded_distance(const Vector& a, const Vector& b) {
  if (a == b) return 0.0;
  const bool a_zero = std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; });
  const bool b_zero = std::all_of(b.begin(), b.end(), [](double x) { return x == 0.0; });
  if (a_zero || b_zero) return 1.0;
  return cosine_distance(a, b);
}

}  // namespace

std::vector<BinRow> centroid_distance_rows(const std::string& story_id, Dataset dataset,
                                           const std::vector<Vector>& user_vectors,
                                           std::span<const int> bin_sizes) {
  std::vector<BinRow> rows;
  for (int size : bin_sizes) {
    const auto centroids = bin_centroids(user_vectors, size);
    for (std::size_t i = 0; i + 1 < centroids.size(); ++i) {
      BinRow row;
      row.story_id = story_id;
      row.dataset = dataset;
      row.bin_size = size;
      row.pair_index = static_cast<int>(i);
      row.distance = guarded_distance(centroids[i], centroids[i + 1]);
      row.log_distance = std::log(std::max(row.distance, kLogDistanceFloor));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<int> default_bin_sizes(int max_user_turns, int cap) {
  std::vector<int> sizes;
  for (int s = 1; s <= std::min(cap, max_user_turns / 2); ++s) sizes.push_back(s);
  return sizes;
}

std::vector<BinRow> exploration_rows(const Corpus& corpus, const VectorMap& vectors,
                                     std::span<const int> bin_sizes, Exec exec) {
  std::vector<std::vector<Vector>> per_story(corpus.stories.size());
  std::vector<Vector> population;
  for (std::size_t s = 0; s < corpus.stories.size(); ++s) {
    for (const auto& inter : corpus.stories[s].interactions) {
      auto it = vectors.find(key_of(inter.user_turn));
      if (it == vectors.end()) {
        throw Error(Errc::ConfigInvalid, "no embedding for story " + inter.user_turn.story_id +
                                             " turn " + std::to_string(inter.user_turn.turn_index));
      }
      per_story[s].push_back(it->second);
      population.push_back(it->second);
    }
  }
  const Standardizer st = fit_standardizer(population, exec);

  std::vector<std::vector<BinRow>> rows(corpus.stories.size());
  auto one_story = [&](std::size_t s) {
    std::vector<Vector> z;
    z.reserve(per_story[s].size());
    for (const auto& v : per_story[s]) z.push_back(st.apply(v));
    rows[s] = centroid_distance_rows(corpus.stories[s].story_id, corpus.stories[s].dataset, z,
                                     bin_sizes);
  };
  const long n = static_cast<long>(corpus.stories.size());
  if (exec == Exec::Serial) {
    for (long s = 0; s < n; ++s) one_story(s);
  } else {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (long s = 0; s < n; ++s) {
      try {
        one_story(s);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  std::vector<BinRow> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

ExplorationFit exploration_fit(const std::vector<BinRow>& rows) {
  std::set<std::string> field_stories, sim_stories;
  std::map<std::pair<int, std::string>, int> group_ids;
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd X(n, 4);
  Eigen::VectorXd y(n);
  std::vector<int> groups(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[i];
    const double field = r.dataset == Dataset::Field ? 1.0 : 0.0;
    (field > 0 ? field_stories : sim_stories).insert(r.story_id);
    X.row(i) << 1.0, r.bin_size, field, r.bin_size * field;
    y(i) = r.log_distance;
    auto key = std::make_pair(static_cast<int>(field), r.story_id);
    auto [it, inserted] = group_ids.emplace(key, static_cast<int>(group_ids.size()));
    groups[i] = it->second;
  }
  if (field_stories.size() < 2 || sim_stories.size() < 2) {
    throw Error(Errc::ConfigInvalid, "exploration fit needs >= 2 stories from each dataset");
  }
  ExplorationFit fit;
  fit.model = stats::mixed_random_intercept(y, X, groups,
                                            {"intercept", "bin_size", "dataset_field",
                                             "bin_size:dataset_field"});
  Eigen::VectorXd w_sim(4), w_field(4);
  w_sim << 0, 1, 0, 0;
  w_field << 0, 1, 0, 1;
  fit.slope_simulated = stats::linear_combination(fit.model.coefficients, fit.model.covariance,
                                                  w_sim, fit.model.df_residual, "slope_simulated");
  fit.slope_field = stats::linear_combination(fit.model.coefficients, fit.model.covariance, w_field,
                                              fit.model.df_residual, "slope_field");
  return fit;
}

}  // namespace dyadic
