#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dyadic/corpus.hpp"
#include "dyadic/exec.hpp"
#include "dyadic/providers.hpp"

namespace dyadic {

// Minimal number of single code-point insertions, deletions and substitutions.
std::size_t levenshtein(std::string_view a, std::string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

std::vector<std::size_t> edit_distances(
    const std::vector<std::pair<std::string, std::string>>& pairs, Exec exec = Exec::Parallel);

struct RectifiedTurn {
  Turn original;
  std::string corrected_text;
  std::size_t edit_distance = 0;
};

using RectifiedMap = std::map<TurnKey, RectifiedTurn>;

struct RectifyOptions {
  // Query the provider twice per turn and fail if a deterministic provider disagrees.
  bool check_determinism = false;
};

RectifiedTurn rectify_turn(const Turn& turn, CorrectorProvider& corrector,
                           const RectifyOptions& options = {});

// Rectifies every user turn, issuing up to `parallelism` concurrent provider calls.
RectifiedMap rectify_user_turns(const Corpus& corpus, CorrectorProvider& corrector,
                                int parallelism = 1, const RectifyOptions& options = {});

struct Exclusion {
  std::string story_id;
  std::string session_id;
  int interaction_index = 0;  // index before filtering
  std::size_t edit_distance = 0;
  std::string reason;
};

struct ExclusionLog {
  std::vector<Exclusion> excluded;
  std::size_t before = 0;
  std::size_t after = 0;
};

struct FilterResult {
  Corpus corpus;
  ExclusionLog log;
  RectifiedMap rectified;  // re-keyed onto the re-sequenced turn indices
};

inline constexpr std::size_t kDefaultEditThreshold = 100;

struct FilterOptions {
  std::size_t threshold = kDefaultEditThreshold;  // exclude when distance >= threshold
  bool apply_corrections = false;  // replace retained user texts with corrected text
};

// Drops interactions whose user turn has edit_distance >= threshold, then
// re-sequences interaction and turn indices per story. Sessions left empty
// disappear. Throws MissingRectification.
FilterResult filter_by_edit_distance(const Corpus& corpus, const RectifiedMap& rectified,
                                     const FilterOptions& options = {});

}  // namespace dyadic
