// Command-line front end. Exit codes: 0 success, 2 configuration error,
// 3 provider error, 4 analysis error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "dyadic/error.hpp"
#include "dyadic/exploration.hpp"
#include "dyadic/pipeline.hpp"
#include "dyadic/simulator.hpp"
#include "dyadic/synthbench.hpp"

namespace fs = std::filesystem;
using namespace dyadic;

namespace {

struct Overrides {
  std::string config;
  std::string field, simulated, out, vectors, valence, exec;
  std::string corrector_url, embedder_url, tokenizer_url, surprisal_url, chat_url;
  long corrector_timeout_ms = 0;
  int window = 0;
  long threshold = -1;
  bool no_figures = false;
  bool apply_corrections = false;
};

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "INI run configuration");
  app.add_option("--field", o.field, "field transcripts (JSON lines)");
  app.add_option("--simulated", o.simulated, "simulated transcripts (JSON lines)");
  app.add_option("--out", o.out, "output directory (or file for simulate)");
  app.add_option("--vectors", o.vectors, "precomputed turn embeddings (JSON lines)");
  app.add_option("--valence", o.valence, "valence method")->check(CLI::IsMember({"lexicon", "embedding"}));
  app.add_option("--exec", o.exec, "kernel execution")->check(CLI::IsMember({"serial", "parallel"}));
  app.add_option("--corrector-url", o.corrector_url, "spelling corrector endpoint");
  app.add_option("--corrector-timeout-ms", o.corrector_timeout_ms, "corrector timeout");
  app.add_option("--embedder-url", o.embedder_url, "embedding endpoint");
  app.add_option("--tokenizer-url", o.tokenizer_url, "tokenizer endpoint");
  app.add_option("--surprisal-url", o.surprisal_url, "surprisal endpoint");
  app.add_option("--chat-url", o.chat_url, "chat completion endpoint");
  app.add_option("--window", o.window, "surprisal window in tokens");
  app.add_option("--threshold", o.threshold, "edit-distance exclusion threshold");
  app.add_flag("--no-figures", o.no_figures, "skip SVG figures");
  app.add_flag("--apply-corrections", o.apply_corrections, "analyse corrected user texts");
}

void set_url(ProviderConfig& p, const std::string& url) {
  if (url.empty()) return;
  ProviderEndpoint ep = p.endpoint.value_or(ProviderEndpoint{});
  ep.url = url;
  p.endpoint = ep;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? default_run_config() : load_run_config(o.config);
  if (!o.field.empty()) c.field_path = o.field;
  if (!o.simulated.empty()) c.simulated_path = o.simulated;
  if (!o.out.empty()) c.output_dir = o.out;
  if (!o.vectors.empty()) c.vectors_path = o.vectors;
  if (!o.valence.empty()) c.valence_method = o.valence == "embedding" ? ValenceMethod::Embedding : ValenceMethod::Lexicon;
  if (!o.exec.empty()) c.exec = o.exec == "serial" ? Exec::Serial : Exec::Parallel;
  set_url(c.corrector, o.corrector_url);
  set_url(c.embedder, o.embedder_url);
  set_url(c.tokenizer, o.tokenizer_url);
  set_url(c.surprisal, o.surprisal_url);
  set_url(c.chat, o.chat_url);
  if (o.corrector_timeout_ms > 0) {
    if (!c.corrector.endpoint) throw Error(Errc::ConfigInvalid, "--corrector-timeout-ms needs a corrector URL");
    c.corrector.endpoint->timeout_ms = o.corrector_timeout_ms;
  }
  if (o.window > 0) c.surprisal_window = o.window;
  if (o.threshold >= 0) c.edit_threshold = static_cast<std::size_t>(o.threshold);
  if (o.no_figures) c.figures = false;
  if (o.apply_corrections) c.apply_corrections = true;
  return c;
}

int run_stage_command(const Overrides& o, std::optional<Stage> only) {
  const RunConfig c = resolve(o);
  const auto bundle = run_pipeline(c, only);
  for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : bundle.files) std::cout << f.sha256 << "  " << f.path << '\n';
  return 0;
}

int run_simulate(const Overrides& o, bool dry_run, const std::string& audit_path) {
  RunConfig c = resolve(o);
  if (c.field_path.empty()) throw Error(Errc::ConfigInvalid, "simulate needs --field");
  if (o.out.empty()) throw Error(Errc::ConfigInvalid, "simulate needs --out");
  load_prompts(c.simulation, c.prompts_dir);
  const Corpus field = load_transcripts(c.field_path, Dataset::Field, {c.drop_trailing_user_turn});
  std::unique_ptr<ChatProvider> chat = dry_run ? make_stub_chat({"echo", {}}) : make_chat(c.chat);
  const auto result = simulate_dataset(field, *chat, c.simulation);
  const fs::path out(o.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream tf(out, std::ios::binary);
  write_transcripts(result.corpus, tf);
  if (!tf) throw Error(Errc::Io, "cannot write " + out.string());
  const fs::path audit = audit_path.empty() ? fs::path(out.string() + ".audit.jsonl") : fs::path(audit_path);
  std::ofstream af(audit, std::ios::binary);
  write_audit(result.exchanges, af, dry_run);
  if (!af) throw Error(Errc::Io, "cannot write " + audit.string());
  std::cerr << "simulated " << result.corpus.stories.size() << " stories, "
            << result.corpus.interaction_count() << " interactions, " << result.calls << " calls\n";
  return 0;
}

struct SynthArgs {
  std::string kind;
  std::string out = "synth";
  std::uint64_t seed = 1;
  int stories = 27;
  int interactions = 50;
  int dim = 16;
  int n = 2000;
  double kappa = 0.8;
  double sigma = 0.2;
  std::string direction = "user_to_ai";
};

void write_corpus(const Corpus& c, const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  write_transcripts(c, f);
  if (!f) throw Error(Errc::Io, "cannot write " + path.string());
}

int run_synthbench(const SynthArgs& a) {
  const fs::path out(a.out);
  fs::create_directories(out);
  if (a.kind == "dyad") {
    const auto d = a.direction == "ai_to_user" ? Direction::AiToUser : Direction::UserToAi;
    synth::write_valence_table(synth::gen_coupled_dyad(a.stories, a.interactions, a.kappa, a.sigma, d, a.seed),
                               out / "dyad_valences.csv");
  } else if (a.kind == "exploration") {
    auto data = synth::gen_exploration_data(a.stories, a.interactions, a.dim, 1.0, 3.0, a.seed);
    Corpus field, sim;
    field.dataset = Dataset::Field;
    sim.dataset = Dataset::Simulated;
    for (auto& s : data.corpus.stories) (s.dataset == Dataset::Field ? field : sim).stories.push_back(s);
    write_corpus(field, out / "field.jsonl");
    write_corpus(sim, out / "simulated.jsonl");
    std::ofstream vf(out / "vectors.jsonl", std::ios::binary);
    write_vectors(data.vectors, vf);
  } else if (a.kind == "resonance") {
    synth::write_surprisal_records(synth::gen_resonance_records(a.n, {}, a.seed), out / "resonance_records.csv");
  } else if (a.kind == "gaps") {
    auto data = synth::gen_mean_reverting_gaps(a.stories, {}, a.seed);
    write_corpus(data.corpus, out / "gaps.jsonl");
    std::vector<StoryValences> sv;
    for (const auto& s : data.corpus.stories) sv.push_back(story_valences(s, data.valences));
    synth::write_valence_table(sv, out / "gaps_valences.csv");
  } else if (a.kind == "corpus") {
    std::vector<std::vector<int>> lengths;
    synth::CounterRng rng(a.seed, 5);
    for (int s = 0; s < a.stories; ++s) {
      std::vector<int> sessions;
      for (int left = a.interactions; left > 0;) {
        const int len = std::min(left, rng.uniform_int(3, 12));
        sessions.push_back(len);
        left -= len;
      }
      lengths.push_back(sessions);
    }
    write_corpus(synth::skeleton_corpus(lengths, Dataset::Field, a.seed), out / "corpus.jsonl");
  } else {
    throw Error(Errc::ConfigInvalid, "unknown synthbench kind '" + a.kind + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic turn-taking analysis toolkit"};
  app.require_subcommand(1);
  Overrides o;

  struct Cmd {
    const char* name;
    const char* help;
    std::optional<Stage> only;
  };
  const Cmd cmds[] = {
      {"ingest", "load and validate transcripts", Stage::Ingest},
      {"preprocess", "spelling rectification and edit-distance filter", Stage::Preprocess},
      {"sentiment", "turn valence scoring", Stage::Sentiment},
      {"align", "affective alignment and stage analyses", Stage::Alignment},
      {"explore", "semantic exploration model", Stage::Exploration},
      {"infodyn", "novelty, transience and resonance", Stage::Infodynamics},
      {"report", "all enabled analyses with figures", Stage::Report},
      {"all", "all enabled analyses with figures", std::nullopt},
  };
  std::vector<std::pair<CLI::App*, std::optional<Stage>>> stage_cmds;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(*sub, o);
    stage_cmds.emplace_back(sub, c.only);
  }

  auto* simulate = app.add_subcommand("simulate", "generate a matched AI-AI corpus");
  add_common(*simulate, o);
  bool dry_run = false;
  std::string audit;
  simulate->add_flag("--dry-run", dry_run, "use the offline echo chat stub");
  simulate->add_option("--audit", audit, "audit log path (default: <out>.audit.jsonl)");

  auto* synthbench = app.add_subcommand("synthbench", "emit synthetic fixtures with known ground truth");
  SynthArgs sa;
  synthbench->add_option("--kind", sa.kind, "generator")
      ->required()
      ->check(CLI::IsMember({"dyad", "exploration", "resonance", "gaps", "corpus"}));
  synthbench->add_option("--out", sa.out, "output directory");
  synthbench->add_option("--seed", sa.seed, "random seed");
  synthbench->add_option("--stories", sa.stories, "stories (or participants)");
  synthbench->add_option("--interactions", sa.interactions, "interactions per story");
  synthbench->add_option("--dim", sa.dim, "embedding dimension");
  synthbench->add_option("-n", sa.n, "records");
  synthbench->add_option("--kappa", sa.kappa, "coupling");
  synthbench->add_option("--sigma", sa.sigma, "follower noise");
  synthbench->add_option("--direction", sa.direction, "follower direction")
      ->check(CLI::IsMember({"user_to_ai", "ai_to_user"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(o, dry_run, audit);
    if (synthbench->parsed()) return run_synthbench(sa);
    for (const auto& [sub, only] : stage_cmds) {
      if (sub->parsed()) return run_stage_command(o, only);
    }
  } catch (const StageFailed& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.cause() == Errc::StageFailed ? 4 : exit_code_for(e.cause());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
