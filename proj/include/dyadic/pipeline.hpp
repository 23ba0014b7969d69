#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/exec.hpp"
#include "dyadic/providers.hpp"
#include "dyadic/sentiment.hpp"
#include "dyadic/simulator.hpp"

namespace dyadic {

// A provider is either a local stub or an HTTP endpoint (url set).
struct ProviderConfig {
  StubSpec stub;
  std::optional<ProviderEndpoint> endpoint;
};

struct RunConfig {
  std::filesystem::path field_path;
  std::filesystem::path simulated_path;  // optional
  std::filesystem::path output_dir = "out";
  std::filesystem::path vectors_path;    // optional precomputed embeddings
  bool drop_trailing_user_turn = false;

  bool preprocess = true;
  bool alignment = true;
  bool anova = true;  // needs both datasets
  bool rubber_band = true;
  bool exploration = true;  // needs both datasets
  bool infodynamics = true;
  bool figures = true;

  ValenceMethod valence_method = ValenceMethod::Lexicon;
  std::filesystem::path lexicon_dir;
  int lexicon_window = 3;
  std::filesystem::path positive_words;
  std::filesystem::path negative_words;

  std::size_t edit_threshold = 100;
  bool apply_corrections = false;
  int surprisal_window = 128;
  int max_bin_size = 15;
  std::uint64_t seed = 1;
  Exec exec = Exec::Parallel;

  ProviderConfig corrector{{"identity", {}}, {}};
  ProviderConfig embedder{{"hash-dense", {{"dim", "64"}}}, {}};
  ProviderConfig tokenizer{{"whitespace", {}}, {}};
  ProviderConfig surprisal{{"context-hash", {}}, {}};
  ProviderConfig chat{{"echo", {}}, {}};

  SimConfig simulation;
  std::filesystem::path prompts_dir;

  // ConfigInvalid when nothing is enabled, inputs are missing, or an analysis
  // needing both datasets has no simulated corpus.
  void validate() const;
};

// Defaults with data paths pointing at the bundled lexicon and prompts.
RunConfig default_run_config();

// INI file: sections [input], [output], [analysis], [lexicon], [simulation]
// and one per provider ([corrector], [embedder], [tokenizer], [surprisal],
// [chat]). Relative paths resolve against the file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
void apply_ini(RunConfig& config, const std::filesystem::path& path);

std::unique_ptr<CorrectorProvider> make_corrector(const ProviderConfig& c);
std::unique_ptr<EmbeddingProvider> make_embedder(const ProviderConfig& c);
std::unique_ptr<Tokenizer> make_tokenizer(const ProviderConfig& c);
std::unique_ptr<SurprisalProvider> make_surprisal(const ProviderConfig& c);
std::unique_ptr<ChatProvider> make_chat(const ProviderConfig& c);

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct ReportBundle {
  std::vector<ManifestEntry> files;
  std::vector<std::string> warnings;

  bool contains(std::string_view relative_path) const;
};

std::string sha256_file(const std::filesystem::path& path);

enum class Stage { Ingest, Preprocess, Sentiment, Alignment, Exploration, Infodynamics, Report };
std::string_view to_string(Stage s);

// Runs the enabled stages in order and writes CSV tables, SVG figures and
// manifest.json into output_dir. Failures are rethrown as StageFailed.
// `only`, when set, restricts the run to ingest plus that stage and its inputs.
ReportBundle run_pipeline(const RunConfig& config, std::optional<Stage> only = std::nullopt);

}  // namespace dyadic
