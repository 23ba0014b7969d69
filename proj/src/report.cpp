#include "dyadic/report.hpp"

#include <cmath>

#include "dyadic/csv.hpp"
#include "dyadic/error.hpp"

namespace dyadic::report {

namespace {

std::string s(std::string_view v) { return std::string(v); }

}  // namespace

std::size_t validation_csv(const std::filesystem::path& file,
                           const std::vector<std::pair<Dataset, ValidationReport>>& reports) {
  CsvWriter csv(file, {"dataset", "story_id", "under_length", "empty", "alternation"});
  for (const auto& [dataset, report] : reports) {
    for (const auto& v : report.stories) {
      csv.row(s(to_string(dataset)), v.story_id, v.under_length, v.empty, v.alternation);
    }
  }
  csv.close();
  return csv.rows();
}

std::size_t sessions_csv(const std::filesystem::path& file, const std::vector<const Corpus*>& corpora) {
  CsvWriter csv(file, {"dataset", "story_id", "session_id", "first_interaction", "length"});
  for (const auto* c : corpora) {
    for (const auto& story : c->stories) {
      for (const auto& session : story.sessions) {
        csv.row(s(to_string(story.dataset)), story.story_id, session.session_id,
                session.first_interaction, session.length);
      }
    }
  }
  csv.close();
  return csv.rows();
}

std::size_t rectified_csv(const std::filesystem::path& file, const RectifiedMap& rectified) {
  CsvWriter csv(file, {"story_id", "turn_index", "session_id", "edit_distance", "original_text",
                       "corrected_text"});
  for (const auto& [key, r] : rectified) {
    csv.row(key.story_id, key.turn_index, r.original.session_id, static_cast<long>(r.edit_distance),
            r.original.text, r.corrected_text);
  }
  csv.close();
  return csv.rows();
}

std::size_t exclusions_csv(const std::filesystem::path& file, const ExclusionLog& log) {
  CsvWriter csv(file, {"story_id", "session_id", "interaction_index", "edit_distance", "reason"});
  for (const auto& e : log.excluded) {
    csv.row(e.story_id, e.session_id, e.interaction_index, static_cast<long>(e.edit_distance), e.reason);
  }
  csv.close();
  return csv.rows();
}

std::size_t valence_csv(const std::filesystem::path& file, const std::vector<const Corpus*>& corpora,
                        const ValenceMap& valences) {
  CsvWriter csv(file, {"dataset", "story_id", "session_id", "interaction_index", "turn_index",
                       "agent", "method", "valence", "matched_count"});
  for (const auto* c : corpora) {
    for (const auto& story : c->stories) {
      for (const auto& inter : story.interactions) {
        for (const Turn* t : {&inter.user_turn, &inter.ai_turn}) {
          auto it = valences.find(key_of(*t));
          if (it == valences.end()) continue;
          csv.row(s(to_string(story.dataset)), story.story_id, t->session_id,
                  inter.interaction_index, t->turn_index, s(to_string(t->agent)),
                  s(to_string(it->second.method)), it->second.value, it->second.matched_count);
        }
      }
    }
  }
  csv.close();
  return csv.rows();
}

std::size_t alignment_csv(const std::filesystem::path& file,
                          const std::vector<AlignmentResult>& results) {
  CsvWriter csv(file, {"dataset", "story_id", "direction", "n_pairs", "r", "fisher_z"});
  for (const auto& r : results) {
    csv.row(s(to_string(r.dataset)), r.story_id, s(to_string(r.direction)), r.n_pairs, r.r, r.fisher_z);
  }
  csv.close();
  return csv.rows();
}

std::size_t skipped_csv(const std::filesystem::path& file, const std::vector<Skipped>& skipped) {
  CsvWriter csv(file, {"dataset", "story_id", "direction", "reason"});
  for (const auto& k : skipped) {
    csv.row(s(to_string(k.dataset)), k.story_id, s(to_string(k.direction)), k.reason);
  }
  csv.close();
  return csv.rows();
}

std::size_t ttests_csv(const std::filesystem::path& file, const std::vector<NamedTTest>& tests) {
  CsvWriter csv(file, {"dataset", "direction", "n_stories", "mean_z", "se", "t", "df", "p"});
  for (const auto& t : tests) {
    csv.row(s(to_string(t.dataset)), s(to_string(t.direction)), t.n, t.test.mean, t.test.se,
            t.test.t, t.test.df, t.test.p_two_sided);
  }
  csv.close();
  return csv.rows();
}

std::size_t anova_csv(const std::filesystem::path& file, const stats::AnovaTable& table) {
  CsvWriter csv(file, {"effect", "ss", "df", "f", "p"});
  for (const auto& e : table.effects) csv.row(e.name, e.ss, e.df, e.f, e.p);
  csv.row("residual", table.residual_ss, table.residual_df, std::optional<double>{},
          std::optional<double>{});
  csv.close();
  return csv.rows();
}

std::size_t stages_csv(const std::filesystem::path& file, const std::vector<StageProfile>& profiles) {
  CsvWriter csv(file, {"dataset", "story_id", "session_id", "length", "volume", "g1", "g2", "g3",
                       "delta12", "delta23"});
  for (const auto& p : profiles) {
    csv.row(s(to_string(p.dataset)), p.story_id, p.session_id, p.length, s(to_string(p.volume)),
            p.g1, p.g2, p.g3, p.delta12, p.delta23);
  }
  csv.close();
  return csv.rows();
}

std::size_t coefficients_csv(
    const std::filesystem::path& file,
    const std::vector<std::pair<std::string, std::vector<stats::Coefficient>>>& fits) {
  CsvWriter csv(file, {"model", "term", "estimate", "se", "t", "p"});
  for (const auto& [label, coefs] : fits) {
    for (const auto& c : coefs) csv.row(label, c.name, c.estimate, c.se, c.t, c.p);
  }
  csv.close();
  return csv.rows();
}

std::size_t exploration_rows_csv(const std::filesystem::path& file, const std::vector<BinRow>& rows) {
  CsvWriter csv(file, {"dataset", "story_id", "bin_size", "pair_index", "distance", "log_distance"});
  for (const auto& r : rows) {
    csv.row(s(to_string(r.dataset)), r.story_id, r.bin_size, r.pair_index, r.distance, r.log_distance);
  }
  csv.close();
  return csv.rows();
}

std::size_t mixed_fit_csv(const std::filesystem::path& file, const std::vector<MixedEntry>& fits) {
  CsvWriter csv(file, {"model", "term", "estimate", "se", "t", "p"});
  const std::optional<double> none;
  for (const auto& [label, fit, extra] : fits) {
    for (const auto& c : fit->coefficients) csv.row(label, c.name, c.estimate, c.se, c.t, c.p);
    for (const auto& c : extra) csv.row(label, c.name, c.estimate, c.se, c.t, c.p);
    csv.row(label, "group_variance", fit->group_variance, none, none, none);
    csv.row(label, "residual_variance", fit->residual_variance, none, none, none);
    csv.row(label, "n_groups", static_cast<double>(fit->n_groups), none, none, none);
    csv.row(label, "n", static_cast<double>(fit->n), none, none, none);
    csv.row(label, "collapsed_to_ols", fit->collapsed_to_ols ? 1.0 : 0.0, none, none, none);
  }
  csv.close();
  return csv.rows();
}

std::size_t infodyn_csv(const std::filesystem::path& file, const std::vector<SurprisalRecord>& records,
                        const std::vector<Dataset>& datasets) {
  if (datasets.size() != records.size()) {
    throw Error(Errc::LengthMismatch, "one dataset label per surprisal record expected");
  }
  CsvWriter csv(file, {"dataset", "story_id", "turn_index", "agent", "n_tokens", "novelty_bits",
                       "transience_bits", "resonance_bits", "boundary_excluded"});
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    csv.row(s(to_string(datasets[i])), r.story_id, r.turn.turn_index, s(to_string(r.agent)),
            r.n_tokens, r.novelty_bits, r.transience_bits, r.resonance_bits, r.boundary_excluded);
  }
  csv.close();
  return csv.rows();
}

}  // namespace dyadic::report
