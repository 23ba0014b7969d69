#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dyadic/alignment.hpp"
#include "dyadic/corpus.hpp"
#include "dyadic/exploration.hpp"
#include "dyadic/infodynamics.hpp"
#include "dyadic/preprocess.hpp"
#include "dyadic/sentiment.hpp"
#include "dyadic/statkit.hpp"

// CSV tables written by the pipeline. Each writer creates `dir / name` and
// returns the number of data rows written.
namespace dyadic::report {

std::size_t validation_csv(const std::filesystem::path& file,
                           const std::vector<std::pair<Dataset, ValidationReport>>& reports);

std::size_t sessions_csv(const std::filesystem::path& file, const std::vector<const Corpus*>& corpora);

std::size_t rectified_csv(const std::filesystem::path& file, const RectifiedMap& rectified);

std::size_t exclusions_csv(const std::filesystem::path& file, const ExclusionLog& log);

std::size_t valence_csv(const std::filesystem::path& file, const std::vector<const Corpus*>& corpora,
                        const ValenceMap& valences);

std::size_t alignment_csv(const std::filesystem::path& file,
                          const std::vector<AlignmentResult>& results);

struct Skipped {
  std::string story_id;
  Dataset dataset = Dataset::Field;
  Direction direction = Direction::UserToAi;
  std::string reason;
};

std::size_t skipped_csv(const std::filesystem::path& file, const std::vector<Skipped>& skipped);

struct NamedTTest {
  Dataset dataset;
  Direction direction;
  int n = 0;
  stats::TTestResult test;
};

std::size_t ttests_csv(const std::filesystem::path& file, const std::vector<NamedTTest>& tests);

std::size_t anova_csv(const std::filesystem::path& file, const stats::AnovaTable& table);

std::size_t stages_csv(const std::filesystem::path& file, const std::vector<StageProfile>& profiles);

// One row per coefficient, labelled with the dataset it was fitted on.
std::size_t coefficients_csv(const std::filesystem::path& file,
                             const std::vector<std::pair<std::string, std::vector<stats::Coefficient>>>& fits);

std::size_t exploration_rows_csv(const std::filesystem::path& file, const std::vector<BinRow>& rows);

struct MixedEntry {
  std::string label;
  const stats::MixedFit* fit = nullptr;
  std::vector<stats::Coefficient> extra;  // e.g. simple slopes
};

// Coefficients, extra contrasts and variance components of each fit.
std::size_t mixed_fit_csv(const std::filesystem::path& file, const std::vector<MixedEntry>& fits);

std::size_t infodyn_csv(const std::filesystem::path& file, const std::vector<SurprisalRecord>& records,
                        const std::vector<Dataset>& datasets);

}  // namespace dyadic::report
