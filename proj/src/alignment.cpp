#include "dyadic/alignment.hpp"

#include <algorithm>

#include "dyadic/error.hpp"

namespace dyadic {

std::string_view to_string(Direction d) {
  return d == Direction::UserToAi ? "user_to_ai" : "ai_to_user";
}

std::string_view to_string(Volume v) { return v == Volume::Long ? "long" : "short"; }

namespace {

double lookup(const ValenceMap& valences, const Turn& t) {
  auto it = valences.find(key_of(t));
  if (it == valences.end()) {
    throw Error(Errc::ConfigInvalid, "no valence for story " + t.story_id + " turn " +
                                         std::to_string(t.turn_index));
  }
  return it->second.value;
}

}  // namespace

StoryValences story_valences(const Story& story, const ValenceMap& valences) {
  StoryValences sv;
  sv.story_id = story.story_id;
  sv.dataset = story.dataset;
  for (const auto& inter : story.interactions) {
    sv.user.push_back(lookup(valences, inter.user_turn));
    sv.ai.push_back(lookup(valences, inter.ai_turn));
  }
  return sv;
}

PairedSeries directional_series(const StoryValences& story, Direction direction) {
  if (story.user.size() != story.ai.size()) {
    throw Error(Errc::LengthMismatch, "user and AI valence series differ in length");
  }
  const std::size_t n = story.user.size();
  PairedSeries s;
  if (direction == Direction::UserToAi) {
    if (n < 1) throw Error(Errc::InsufficientPairs, "story " + story.story_id + " has no interactions");
    s.x = story.user;
    s.y = story.ai;
  } else {
    if (n < 2) {
      throw Error(Errc::InsufficientPairs,
                  "story " + story.story_id + " needs 2 interactions for AI-to-user pairs");
    }
    s.x.assign(story.ai.begin(), story.ai.end() - 1);
    s.y.assign(story.user.begin() + 1, story.user.end());
  }
  return s;
}

AlignmentResult story_alignment(const PairedSeries& series, std::string story_id, Dataset dataset,
                                Direction direction) {
  if (series.x.size() < 3) {
    throw Error(Errc::InsufficientPairs, "alignment needs at least 3 pairs in story " + story_id);
  }
  AlignmentResult r;
  r.story_id = std::move(story_id);
  r.dataset = dataset;
  r.direction = direction;
  r.n_pairs = static_cast<int>(series.x.size());
  r.r = stats::pearson(series.x, series.y);
  r.fisher_z = stats::fisher_z(stats::clamp_correlation(r.r));
  return r;
}

stats::TTestResult alignment_ttest(std::span<const double> zs, double mu0) {
  return stats::one_sample_t(zs, mu0);
}

stats::AnovaTable alignment_anova(const std::vector<AlignmentResult>& results) {
  std::vector<double> z;
  std::vector<int> dataset;
  std::vector<int> turn;
  for (const auto& r : results) {
    z.push_back(r.fisher_z);
    dataset.push_back(r.dataset == Dataset::Field ? 0 : 1);
    turn.push_back(r.direction == Direction::UserToAi ? 0 : 1);
  }
  auto table = stats::anova_2x2(z, dataset, turn, "dataset", "turn");
  if (table.total_ss == 0.0) throw Error(Errc::ZeroVariance, "all Fisher z values are equal");
  return table;
}

std::array<int, 3> stage_sizes(int n) {
  const int base = n / 3;
  const int extra = n % 3;
  return {base + (extra > 0 ? 1 : 0), base + (extra > 1 ? 1 : 0), base};
}

StageProfile stage_split(std::string session_id, std::span<const double> gaps) {
  const int n = static_cast<int>(gaps.size());
  if (n < 3) {
    throw Error(Errc::TooShort, "session " + session_id + " has fewer than three interactions");
  }
  const auto sizes = stage_sizes(n);
  double g[3] = {0, 0, 0};
  int at = 0;
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < sizes[k]; ++i) g[k] += gaps[at++];
    g[k] /= sizes[k];
  }
  StageProfile p;
  p.session_id = std::move(session_id);
  p.length = n;
  p.g1 = g[0];
  p.g2 = g[1];
  p.g3 = g[2];
  p.delta12 = p.g2 - p.g1;
  p.delta23 = p.g3 - p.g2;
  return p;
}

void assign_volume(std::vector<StageProfile>& profiles) {
  if (profiles.empty()) return;
  std::vector<int> lengths;
  for (const auto& p : profiles) lengths.push_back(p.length);
  std::sort(lengths.begin(), lengths.end());
  const std::size_t m = lengths.size();
  const double median =
      m % 2 == 1 ? lengths[m / 2] : 0.5 * (lengths[m / 2 - 1] + lengths[m / 2]);
  for (auto& p : profiles) p.volume = p.length > median ? Volume::Long : Volume::Short;
}

std::vector<StageProfile> stage_profiles(const Corpus& corpus, const ValenceMap& valences) {
  std::vector<StageProfile> out;
  for (const auto& story : corpus.stories) {
    for (const auto& session : story.sessions) {
      if (session.length < 3) continue;
      std::vector<double> gaps;
      for (int i = session.first_interaction; i < session.end_interaction(); ++i) {
        const auto& inter = story.interactions[i];
        gaps.push_back(lookup(valences, inter.user_turn) - lookup(valences, inter.ai_turn));
      }
      auto p = stage_split(session.session_id, gaps);
      p.story_id = story.story_id;
      p.dataset = story.dataset;
      out.push_back(std::move(p));
    }
  }
  assign_volume(out);
  return out;
}

stats::RegressionFit rubber_band_fit(const std::vector<StageProfile>& profiles) {
  if (profiles.size() < 5) throw Error(Errc::InsufficientPairs, "rubber-band fit needs >= 5 profiles");
  const auto n = static_cast<Eigen::Index>(profiles.size());
  Eigen::MatrixXd X(n, 4);
  Eigen::VectorXd y(n);
  std::vector<double> d12;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = profiles[i];
    const double vol = p.volume == Volume::Long ? 1.0 : 0.0;
    X.row(i) << 1.0, p.delta12, vol, p.delta12 * vol;
    y(i) = p.delta23;
    d12.push_back(p.delta12);
  }
  if (stats::sample_variance(d12) == 0.0) throw Error(Errc::ZeroVariance, "delta12 is constant");
  return stats::ols(y, X, {"intercept", "delta12", "volume", "delta12:volume"});
}

stats::RegressionFit agent_valence_fit(const Corpus& corpus, const ValenceMap& valences) {
  std::vector<double> values;
  std::vector<double> is_user;
  for (const auto& story : corpus.stories) {
    for (const auto& inter : story.interactions) {
      values.push_back(lookup(valences, inter.user_turn));
      is_user.push_back(1.0);
      values.push_back(lookup(valences, inter.ai_turn));
      is_user.push_back(0.0);
    }
  }
  const auto n = static_cast<Eigen::Index>(values.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X.row(i) << 1.0, is_user[i];
    y(i) = values[i];
  }
  return stats::ols(y, X, {"intercept", "agent_user"});
}

}  // namespace dyadic
