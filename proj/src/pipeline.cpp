#include "dyadic/pipeline.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "dyadic/alignment.hpp"
#include "dyadic/error.hpp"
#include "dyadic/exploration.hpp"
#include "dyadic/http_providers.hpp"
#include "dyadic/infodynamics.hpp"
#include "dyadic/preprocess.hpp"
#include "dyadic/report.hpp"
#include "dyadic/svg.hpp"

namespace dyadic {

namespace fs = std::filesystem;

namespace {

fs::path data_dir() {
  if (const char* env = std::getenv("DYADIC_DATA_DIR"); env && *env) return env;
#ifdef DYADIC_DATA_DIR
  return DYADIC_DATA_DIR;
#else
  return "data";
#endif
}

}  // namespace

RunConfig default_run_config() {
  RunConfig c;
  const auto data = data_dir();
  c.lexicon_dir = data / "lexicon";
  c.positive_words = data / "seeds" / "positive.txt";
  c.negative_words = data / "seeds" / "negative.txt";
  c.prompts_dir = data / "prompts";
  return c;
}

void RunConfig::validate() const {
  if (field_path.empty()) throw Error(Errc::ConfigInvalid, "no field corpus given");
  if (!fs::exists(field_path)) throw Error(Errc::ConfigInvalid, "field corpus not found: " + field_path.string());
  if (!simulated_path.empty() && !fs::exists(simulated_path)) {
    throw Error(Errc::ConfigInvalid, "simulated corpus not found: " + simulated_path.string());
  }
  if (!vectors_path.empty() && !fs::exists(vectors_path)) {
    throw Error(Errc::ConfigInvalid, "vector file not found: " + vectors_path.string());
  }
  if (output_dir.empty()) throw Error(Errc::ConfigInvalid, "no output directory given");
  if (!(alignment || rubber_band || exploration || infodynamics)) {
    throw Error(Errc::ConfigInvalid, "no analysis enabled");
  }
  if (alignment && anova && simulated_path.empty()) {
    throw Error(Errc::ConfigInvalid, "the Dataset x Turn ANOVA needs a simulated corpus");
  }
  if (exploration && simulated_path.empty()) {
    throw Error(Errc::ConfigInvalid, "the exploration model needs a simulated corpus");
  }
  if (surprisal_window < 1) throw Error(Errc::ConfigInvalid, "surprisal window must be >= 1");
  if (max_bin_size < 1) throw Error(Errc::ConfigInvalid, "max bin size must be >= 1");
  for (const auto* p : {&corrector, &embedder, &tokenizer, &surprisal, &chat}) {
    if (p->endpoint) dyadic::validate(*p->endpoint);
  }
}

// ---------------------------------------------------------------------------
// INI configuration

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(Errc::ConfigInvalid, key + ": expected a boolean, got '" + v + "'");
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long x = std::stol(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(Errc::ConfigInvalid, key + ": expected an integer, got '" + v + "'");
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(Errc::ConfigInvalid, key + ": expected a number, got '" + v + "'");
}

void apply_provider(ProviderConfig& p, const std::string& section,
                    const boost::property_tree::ptree& tree) {
  ProviderEndpoint ep = p.endpoint.value_or(ProviderEndpoint{});
  bool http = p.endpoint.has_value();
  for (const auto& [key, node] : tree) {
    const std::string v = node.data();
    const std::string name = section + "." + key;
    if (key == "stub") {
      p.stub.kind = v;
      http = false;
    } else if (key == "url") {
      ep.url = v;
      http = !v.empty();
    } else if (key == "auth_env") {
      ep.auth_env = v;
    } else if (key == "timeout_ms") {
      ep.timeout_ms = parse_long(name, v);
    } else if (key == "max_retries") {
      ep.retry.max_retries = static_cast<int>(parse_long(name, v));
    } else if (key == "base_delay_ms") {
      ep.retry.base_delay_ms = parse_long(name, v);
    } else if (key == "max_parallelism") {
      ep.max_parallelism = static_cast<int>(parse_long(name, v));
    } else if (key == "logprob_base") {
      if (v != "e" && v != "2") throw Error(Errc::ConfigInvalid, name + " must be 'e' or '2'");
      ep.declared.logprob_base = v == "2" ? LogprobBase::Two : LogprobBase::E;
      p.stub.params["base"] = v;
    } else if (key == "embedding_dim") {
      ep.declared.embedding_dim = static_cast<int>(parse_long(name, v));
      p.stub.params["dim"] = v;
    } else if (key == "deterministic") {
      ep.declared.deterministic = parse_bool(name, v);
    } else {
      p.stub.params[key] = v;
    }
  }
  if (http) {
    p.endpoint = ep;
  } else {
    p.endpoint.reset();
  }
}

}  // namespace

void apply_ini(RunConfig& c, const fs::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(Errc::ConfigInvalid, e.what());
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& v) -> fs::path {
    if (v.empty()) return {};
    fs::path p(v);
    return p.is_absolute() ? p : base / p;
  };
  for (const auto& [section, body] : tree) {
    if (section == "corrector" || section == "embedder" || section == "tokenizer" ||
        section == "surprisal" || section == "chat") {
      ProviderConfig& p = section == "corrector"  ? c.corrector
                          : section == "embedder" ? c.embedder
                          : section == "tokenizer" ? c.tokenizer
                          : section == "surprisal" ? c.surprisal
                                                   : c.chat;
      apply_provider(p, section, body);
      continue;
    }
    for (const auto& [key, node] : body) {
      const std::string v = node.data();
      const std::string name = section + "." + key;
      if (section == "input") {
        if (key == "field") c.field_path = resolve(v);
        else if (key == "simulated") c.simulated_path = resolve(v);
        else if (key == "vectors") c.vectors_path = resolve(v);
        else if (key == "drop_trailing_user_turn") c.drop_trailing_user_turn = parse_bool(name, v);
        else throw Error(Errc::ConfigInvalid, "unknown key " + name);
      } else if (section == "output") {
        if (key == "dir") c.output_dir = resolve(v);
        else throw Error(Errc::ConfigInvalid, "unknown key " + name);
      } else if (section == "analysis") {
        if (key == "preprocess") c.preprocess = parse_bool(name, v);
        else if (key == "alignment") c.alignment = parse_bool(name, v);
        else if (key == "anova") c.anova = parse_bool(name, v);
        else if (key == "rubber_band") c.rubber_band = parse_bool(name, v);
        else if (key == "exploration") c.exploration = parse_bool(name, v);
        else if (key == "infodynamics") c.infodynamics = parse_bool(name, v);
        else if (key == "figures") c.figures = parse_bool(name, v);
        else if (key == "valence") {
          if (v == "lexicon") c.valence_method = ValenceMethod::Lexicon;
          else if (v == "embedding") c.valence_method = ValenceMethod::Embedding;
          else throw Error(Errc::ConfigInvalid, name + " must be 'lexicon' or 'embedding'");
        } else if (key == "edit_threshold") c.edit_threshold = static_cast<std::size_t>(parse_long(name, v));
        else if (key == "apply_corrections") c.apply_corrections = parse_bool(name, v);
        else if (key == "surprisal_window") c.surprisal_window = static_cast<int>(parse_long(name, v));
        else if (key == "max_bin_size") c.max_bin_size = static_cast<int>(parse_long(name, v));
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_long(name, v));
        else if (key == "exec") {
          if (v == "serial") c.exec = Exec::Serial;
          else if (v == "parallel") c.exec = Exec::Parallel;
          else throw Error(Errc::ConfigInvalid, name + " must be 'serial' or 'parallel'");
        } else throw Error(Errc::ConfigInvalid, "unknown key " + name);
      } else if (section == "lexicon") {
        if (key == "dir") c.lexicon_dir = resolve(v);
        else if (key == "window") c.lexicon_window = static_cast<int>(parse_long(name, v));
        else if (key == "positive_words") c.positive_words = resolve(v);
        else if (key == "negative_words") c.negative_words = resolve(v);
        else throw Error(Errc::ConfigInvalid, "unknown key " + name);
      } else if (section == "simulation") {
        auto& s = c.simulation;
        if (key == "model") s.model = v;
        else if (key == "temperature") s.temperature = parse_real(name, v);
        else if (key == "max_tokens") s.max_tokens = static_cast<int>(parse_long(name, v));
        else if (key == "user_temperature") s.user_temperature = parse_real(name, v);
        else if (key == "user_max_tokens") s.user_max_tokens = static_cast<int>(parse_long(name, v));
        else if (key == "prompts") c.prompts_dir = resolve(v);
        else if (key == "context_limit_chars") s.context_limit_chars = static_cast<std::size_t>(parse_long(name, v));
        else if (key == "max_total_calls") s.max_total_calls = parse_long(name, v);
        else if (key == "empty_retries") s.empty_retries = static_cast<int>(parse_long(name, v));
        else if (key == "parallel_stories") s.parallel_stories = static_cast<int>(parse_long(name, v));
        else throw Error(Errc::ConfigInvalid, "unknown key " + name);
      } else {
        throw Error(Errc::ConfigInvalid, "unknown section [" + section + "]");
      }
    }
  }
}

RunConfig load_run_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(Errc::ConfigInvalid, "config file not found: " + path.string());
  RunConfig c = default_run_config();
  apply_ini(c, path);
  return c;
}

// ---------------------------------------------------------------------------
// Providers

std::unique_ptr<CorrectorProvider> make_corrector(const ProviderConfig& c) {
  if (c.endpoint) return std::make_unique<HttpCorrector>(*c.endpoint);
  return make_stub_corrector(c.stub);
}

std::unique_ptr<EmbeddingProvider> make_embedder(const ProviderConfig& c) {
  if (c.endpoint) return std::make_unique<HttpEmbedder>(*c.endpoint);
  return make_stub_embedder(c.stub);
}

std::unique_ptr<Tokenizer> make_tokenizer(const ProviderConfig& c) {
  if (c.endpoint) return std::make_unique<HttpTokenizer>(*c.endpoint);
  if (c.stub.kind == "whitespace") return std::make_unique<WhitespaceTokenizer>();
  throw Error(Errc::ConfigInvalid, "unknown tokenizer stub '" + c.stub.kind + "'");
}

std::unique_ptr<SurprisalProvider> make_surprisal(const ProviderConfig& c) {
  if (c.endpoint) return std::make_unique<HttpSurprisal>(*c.endpoint);
  return make_stub_surprisal(c.stub);
}

std::unique_ptr<ChatProvider> make_chat(const ProviderConfig& c) {
  if (c.endpoint) return std::make_unique<HttpChat>(*c.endpoint);
  return make_stub_chat(c.stub);
}

// ---------------------------------------------------------------------------
// Manifest

bool ReportBundle::contains(std::string_view relative_path) const {
  for (const auto& f : files) {
    if (f.path == relative_path) return true;
  }
  return false;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::Io, "cannot initialise SHA-256");
  }
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Preprocess: return "preprocess";
    case Stage::Sentiment: return "sentiment";
    case Stage::Alignment: return "alignment";
    case Stage::Exploration: return "exploration";
    case Stage::Infodynamics: return "infodynamics";
    case Stage::Report: return "report";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

template <class F>
void run_stage(Stage stage, F&& body) {
  try {
    body();
  } catch (const StageFailed&) {
    throw;
  } catch (const Error& e) {
    throw StageFailed(std::string(to_string(stage)), e.code(), e.what());
  } catch (const std::exception& e) {
    throw StageFailed(std::string(to_string(stage)), Errc::StageFailed, e.what());
  }
}

struct Plan {
  bool preprocess, sentiment, alignment, rubber_band, exploration, infodynamics, figures;
};

Plan plan_for(const RunConfig& c, std::optional<Stage> only) {
  Plan p{c.preprocess,  c.alignment || c.rubber_band, c.alignment, c.rubber_band,
         c.exploration, c.infodynamics,               c.figures};
  if (!only || *only == Stage::Report) return p;
  const Stage s = *only;
  p.preprocess = c.preprocess && s != Stage::Ingest;
  p.sentiment = s == Stage::Sentiment || s == Stage::Alignment;
  p.alignment = s == Stage::Alignment && c.alignment;
  p.rubber_band = s == Stage::Alignment && c.rubber_band;
  p.exploration = s == Stage::Exploration;
  p.infodynamics = s == Stage::Infodynamics;
  p.figures = false;
  return p;
}

Corpus merged(const Corpus& a, const Corpus* b) {
  Corpus m;
  m.dataset = a.dataset;
  m.stories = a.stories;
  if (b) m.stories.insert(m.stories.end(), b->stories.begin(), b->stories.end());
  return m;
}

}  // namespace

ReportBundle run_pipeline(const RunConfig& config, std::optional<Stage> only) {
  if (!only || *only == Stage::Report || *only == Stage::Alignment || *only == Stage::Exploration ||
      *only == Stage::Infodynamics) {
    RunConfig check = config;
    if (only && *only != Stage::Report) {
      check.alignment = *only == Stage::Alignment && config.alignment;
      check.rubber_band = *only == Stage::Alignment && config.rubber_band;
      check.exploration = *only == Stage::Exploration;
      check.infodynamics = *only == Stage::Infodynamics;
      if (*only == Stage::Alignment && !check.alignment && !check.rubber_band) check.alignment = true;
    }
    check.validate();
  } else {
    if (config.field_path.empty() || !fs::exists(config.field_path)) {
      throw Error(Errc::ConfigInvalid, "field corpus not found: " + config.field_path.string());
    }
  }
  const Plan plan = plan_for(config, only);
  const fs::path out = config.output_dir;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw Error(Errc::ConfigInvalid, "cannot create output directory " + out.string());

  ReportBundle bundle;
  std::vector<std::string> written;
  auto file = [&](const std::string& name) {
    written.push_back(name);
    return out / name;
  };

  Corpus field;
  std::optional<Corpus> sim;
  run_stage(Stage::Ingest, [&] {
    LoadOptions opts{config.drop_trailing_user_turn};
    field = load_transcripts(config.field_path, Dataset::Field, opts);
    if (!config.simulated_path.empty()) sim = load_transcripts(config.simulated_path, Dataset::Simulated, opts);
    if (sim) {
      std::set<std::string> ids;
      for (const auto& s : field.stories) ids.insert(s.story_id);
      for (const auto& s : sim->stories) {
        if (ids.count(s.story_id)) {
          throw Error(Errc::ConfigInvalid, "story id " + s.story_id + " appears in both corpora");
        }
      }
    }
    std::vector<std::pair<Dataset, ValidationReport>> reports{{Dataset::Field, validate_corpus(field)}};
    if (sim) reports.emplace_back(Dataset::Simulated, validate_corpus(*sim));
    report::validation_csv(file("validation.csv"), reports);
    std::vector<const Corpus*> cs{&field};
    if (sim) cs.push_back(&*sim);
    report::sessions_csv(file("sessions.csv"), cs);
  });

  if (plan.preprocess) {
    run_stage(Stage::Preprocess, [&] {
      auto corrector = make_corrector(config.corrector);
      const int par = config.corrector.endpoint ? config.corrector.endpoint->max_parallelism : 1;
      RectifyOptions ropts;
      ropts.check_determinism = corrector->capabilities().deterministic && config.corrector.endpoint.has_value();
      const auto rectified = rectify_user_turns(field, *corrector, par, ropts);
      FilterOptions fopts{config.edit_threshold, config.apply_corrections};
      auto filtered = filter_by_edit_distance(field, rectified, fopts);
      report::rectified_csv(file("rectified.csv"), rectified);
      report::exclusions_csv(file("exclusions.csv"), filtered.log);
      field = std::move(filtered.corpus);
    });
  }

  std::vector<const Corpus*> corpora{&field};
  if (sim) corpora.push_back(&*sim);

  VectorMap vectors;
  bool have_vectors = false;
  auto ensure_vectors = [&] {
    if (have_vectors) return;
    if (!config.vectors_path.empty()) {
      vectors = load_vectors(config.vectors_path);
    } else {
      auto embedder = make_embedder(config.embedder);
      probe_capabilities(*embedder);
      const auto all = merged(field, sim ? &*sim : nullptr);
      vectors = embed_corpus(all, *embedder);
    }
    have_vectors = true;
  };

  ValenceMap valences;
  if (plan.sentiment) {
    run_stage(Stage::Sentiment, [&] {
      if (config.valence_method == ValenceMethod::Lexicon) {
        const auto lexicon = load_lexicon(config.lexicon_dir, config.lexicon_window);
        for (const auto* c : corpora) valences.merge(score_corpus(*c, lexicon, config.exec));
      } else {
        ensure_vectors();
        auto embedder = make_embedder(config.embedder);
        const auto centroids = seed_centroids(load_word_list(config.positive_words),
                                              load_word_list(config.negative_words), *embedder);
        for (const auto* c : corpora) valences.merge(score_corpus(*c, vectors, centroids, config.exec));
      }
      report::valence_csv(file("valence.csv"), corpora, valences);
    });
  }

  std::vector<StoryValences> trajectories;
  std::vector<AlignmentResult> alignments;
  std::vector<StageProfile> profiles;
  if (plan.alignment || plan.rubber_band) {
    run_stage(Stage::Alignment, [&] {
      for (const auto* c : corpora) {
        for (const auto& story : c->stories) trajectories.push_back(story_valences(story, valences));
      }
      if (plan.alignment) {
        std::vector<report::Skipped> skipped;
        for (const auto& sv : trajectories) {
          for (Direction d : {Direction::UserToAi, Direction::AiToUser}) {
            try {
              alignments.push_back(story_alignment(directional_series(sv, d), sv.story_id, sv.dataset, d));
            } catch (const Error& e) {
              if (e.code() != Errc::InsufficientPairs && e.code() != Errc::ZeroVariance) throw;
              skipped.push_back({sv.story_id, sv.dataset, d, e.what()});
            }
          }
        }
        if (!skipped.empty()) {
          bundle.warnings.push_back(std::to_string(skipped.size()) +
                                    " story/direction pair(s) skipped in alignment (see alignment_skipped.csv)");
        }
        report::alignment_csv(file("alignment.csv"), alignments);
        report::skipped_csv(file("alignment_skipped.csv"), skipped);
        std::vector<report::NamedTTest> tests;
        for (const auto* c : corpora) {
          for (Direction d : {Direction::UserToAi, Direction::AiToUser}) {
            std::vector<double> zs;
            for (const auto& a : alignments) {
              if (a.dataset == c->dataset && a.direction == d) zs.push_back(a.fisher_z);
            }
            if (zs.size() < 2) continue;
            tests.push_back({c->dataset, d, static_cast<int>(zs.size()), alignment_ttest(zs)});
          }
        }
        report::ttests_csv(file("alignment_tests.csv"), tests);
        if (config.anova && sim) report::anova_csv(file("anova.csv"), alignment_anova(alignments));
      }
      if (plan.rubber_band) {
        std::vector<std::pair<std::string, std::vector<stats::Coefficient>>> band, agent;
        for (const auto* c : corpora) {
          auto ps = stage_profiles(*c, valences);
          band.emplace_back(std::string(to_string(c->dataset)), rubber_band_fit(ps).coefficients);
          agent.emplace_back(std::string(to_string(c->dataset)), agent_valence_fit(*c, valences).coefficients);
          profiles.insert(profiles.end(), ps.begin(), ps.end());
        }
        report::stages_csv(file("stages.csv"), profiles);
        report::coefficients_csv(file("rubber_band.csv"), band);
        report::coefficients_csv(file("valence_model.csv"), agent);
      }
    });
  }

  std::vector<BinRow> rows;
  std::optional<ExplorationFit> exploration;
  if (plan.exploration) {
    run_stage(Stage::Exploration, [&] {
      ensure_vectors();
      const auto all = merged(field, sim ? &*sim : nullptr);
      int longest = 0;
      for (const auto& s : all.stories) longest = std::max(longest, static_cast<int>(s.interactions.size()));
      const auto sizes = default_bin_sizes(longest, config.max_bin_size);
      rows = exploration_rows(all, vectors, sizes, config.exec);
      exploration = exploration_fit(rows);
      if (exploration->model.collapsed_to_ols) bundle.warnings.push_back("exploration: " + exploration->model.warning);
      report::exploration_rows_csv(file("exploration_rows.csv"), rows);
      report::mixed_fit_csv(file("exploration_fit.csv"),
                            {{"exploration", &exploration->model,
                              {exploration->slope_simulated, exploration->slope_field}}});
    });
  }

  std::vector<SurprisalRecord> records;
  std::vector<Dataset> record_datasets;
  std::vector<std::pair<Dataset, ResonanceFit>> resonance;
  if (plan.infodynamics) {
    run_stage(Stage::Infodynamics, [&] {
      auto tokenizer = make_tokenizer(config.tokenizer);
      auto surprisal = make_surprisal(config.surprisal);
      probe_capabilities(*surprisal);
      for (const auto* c : corpora) {
        auto rs = surprisal_records(*c, *tokenizer, *surprisal, config.surprisal_window, config.exec);
        resonance.emplace_back(c->dataset, resonance_fit(rs));
        if (resonance.back().second.model.collapsed_to_ols) {
          bundle.warnings.push_back("resonance: " + resonance.back().second.model.warning);
        }
        record_datasets.insert(record_datasets.end(), rs.size(), c->dataset);
        records.insert(records.end(), rs.begin(), rs.end());
      }
      report::infodyn_csv(file("infodyn.csv"), records, record_datasets);
      std::vector<report::MixedEntry> entries;
      for (const auto& [d, fit] : resonance) {
        entries.push_back({std::string(to_string(d)), &fit.model, {fit.slope_user, fit.slope_ai}});
      }
      report::mixed_fit_csv(file("resonance_fit.csv"), entries);
    });
  }

  if (plan.figures) {
    run_stage(Stage::Report, [&] {
      auto write_svg = [&](const std::string& name, const std::string& body) {
        std::ofstream f(file(name), std::ios::binary);
        f << body;
        if (!f) throw Error(Errc::Io, "cannot write " + (out / name).string());
      };
      if (!trajectories.empty()) write_svg("fig_valence_trajectories.svg", svg::valence_trajectories(trajectories));
      if (!alignments.empty()) write_svg("fig_alignment_boxes.svg", svg::alignment_boxes(alignments));
      if (!profiles.empty()) write_svg("fig_stage_gaps.svg", svg::stage_lines(profiles));
      if (!rows.empty()) write_svg("fig_exploration.svg", svg::exploration_scatter(rows, exploration));
      for (const auto& [d, fit] : resonance) {
        std::vector<SurprisalRecord> mine;
        for (std::size_t i = 0; i < records.size(); ++i) {
          if (record_datasets[i] == d) mine.push_back(records[i]);
        }
        write_svg("fig_resonance_" + std::string(to_string(d)) + ".svg",
                  svg::resonance_scatter(mine, fit));
      }
    });
  }

  nlohmann::json manifest;
  manifest["files"] = nlohmann::json::array();
  for (const auto& name : written) {
    ManifestEntry e{name, sha256_file(out / name), fs::file_size(out / name)};
    manifest["files"].push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    bundle.files.push_back(std::move(e));
  }
  std::ofstream mf(out / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << '\n';
  if (!mf) throw Error(Errc::Io, "cannot write manifest.json");
  return bundle;
}

}  // namespace dyadic
