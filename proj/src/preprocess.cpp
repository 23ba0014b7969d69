#include "dyadic/preprocess.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "dyadic/error.hpp"
#include "dyadic/text.hpp"

namespace dyadic {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  // Single row over the shorter string.
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a == b) return 0;
  return levenshtein(std::u32string_view(text::to_code_points(a)),
                     std::u32string_view(text::to_code_points(b)));
}

std::vector<std::size_t> edit_distances(
    const std::vector<std::pair<std::string, std::string>>& pairs, Exec exec) {
  std::vector<std::size_t> out(pairs.size());
  const auto n = static_cast<long>(pairs.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) out[i] = levenshtein(pairs[i].first, pairs[i].second);
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) out[i] = levenshtein(pairs[i].first, pairs[i].second);
  }
  return out;
}

RectifiedTurn rectify_turn(const Turn& turn, CorrectorProvider& corrector,
                           const RectifyOptions& options) {
  if (turn.text.empty()) {
    throw Error(Errc::MalformedRecord, "cannot rectify empty turn in story " + turn.story_id);
  }
  RectifiedTurn r;
  r.original = turn;
  r.corrected_text = corrector.correct(turn.text);
  if (options.check_determinism && corrector.capabilities().deterministic) {
    const auto again = corrector.correct(turn.text);
    if (again != r.corrected_text) {
      throw Error(Errc::ProviderNonDeterministic,
                  "corrector returned different outputs for story " + turn.story_id + " turn " +
                      std::to_string(turn.turn_index));
    }
  }
  r.edit_distance = levenshtein(turn.text, r.corrected_text);
  return r;
}

RectifiedMap rectify_user_turns(const Corpus& corpus, CorrectorProvider& corrector,
                                int parallelism, const RectifyOptions& options) {
  std::vector<const Turn*> turns;
  for (const auto& story : corpus.stories)
    for (const auto& inter : story.interactions) turns.push_back(&inter.user_turn);

  std::vector<RectifiedTurn> results(turns.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= turns.size()) return;
      try {
        results[i] = rectify_turn(*turns[i], corrector, options);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(turns.size());
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::clamp(parallelism, 1, 64);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  RectifiedMap out;
  for (auto& r : results) out.emplace(key_of(r.original), std::move(r));
  return out;
}

FilterResult filter_by_edit_distance(const Corpus& corpus, const RectifiedMap& rectified,
                                     const FilterOptions& options) {
  FilterResult result;
  result.corpus.dataset = corpus.dataset;
  result.corpus.provenance = corpus.provenance;
  result.log.before = corpus.interaction_count();

  for (const auto& story : corpus.stories) {
    Story kept;
    kept.story_id = story.story_id;
    kept.dataset = story.dataset;
    kept.genre = story.genre;
    for (const auto& inter : story.interactions) {
      auto it = rectified.find(key_of(inter.user_turn));
      if (it == rectified.end()) {
        throw Error(Errc::MissingRectification,
                    "no rectification for story " + story.story_id + " turn " +
                        std::to_string(inter.user_turn.turn_index));
      }
      const auto& rect = it->second;
      if (rect.edit_distance >= options.threshold) {
        result.log.excluded.push_back(Exclusion{story.story_id, inter.user_turn.session_id,
                                                inter.interaction_index, rect.edit_distance,
                                                "edit_distance >= " +
                                                    std::to_string(options.threshold)});
        continue;
      }
      Interaction next = inter;
      const int idx = static_cast<int>(kept.interactions.size());
      next.interaction_index = idx;
      next.user_turn.turn_index = 2 * idx;
      next.ai_turn.turn_index = 2 * idx + 1;
      if (options.apply_corrections) {
        next.user_turn.text = rect.corrected_text;
        next.user_turn.char_count = text::code_point_length(rect.corrected_text);
      }
      RectifiedTurn moved = rect;
      moved.original.turn_index = next.user_turn.turn_index;
      if (options.apply_corrections) {
        moved.original.text = next.user_turn.text;
        moved.original.char_count = next.user_turn.char_count;
        moved.edit_distance = 0;
      }
      result.rectified.emplace(key_of(next.user_turn), std::move(moved));

      const auto& sid = next.user_turn.session_id;
      if (kept.sessions.empty() || kept.sessions.back().session_id != sid) {
        kept.sessions.push_back(Session{sid, kept.story_id, idx, 0});
      }
      kept.sessions.back().length += 1;
      kept.interactions.push_back(std::move(next));
    }
    if (!kept.interactions.empty()) result.corpus.stories.push_back(std::move(kept));
  }
  result.log.after = result.corpus.interaction_count();
  return result;
}

}  // namespace dyadic
