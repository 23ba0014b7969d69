// Serial against parallel timings of the data-parallel kernels.
// Range argument 0 selects Exec::Serial, 1 selects Exec::Parallel.

#include <benchmark/benchmark.h>

#include "dyadic/exploration.hpp"
#include "dyadic/pipeline.hpp"
#include "dyadic/preprocess.hpp"
#include "dyadic/sentiment.hpp"
#include "dyadic/synthbench.hpp"

using namespace dyadic;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

const std::vector<std::pair<std::string, std::string>>& text_pairs() {
  static const auto pairs = [] {
    const Corpus c = synth::skeleton_corpus(std::vector<std::vector<int>>(40, {60}), Dataset::Field, 1);
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& st : c.stories) {
      for (std::size_t i = 0; i + 1 < st.interactions.size(); ++i) {
        out.emplace_back(st.interactions[i].user_turn.text, st.interactions[i + 1].ai_turn.text);
      }
    }
    return out;
  }();
  return pairs;
}

const synth::ExplorationData& exploration_data() {
  static const auto d = synth::gen_exploration_data(27, 60, 64, 1.0, 3.0, 2);
  return d;
}

}  // namespace

static void BM_EditDistances(benchmark::State& state) {
  const auto& pairs = text_pairs();
  for (auto _ : state) benchmark::DoNotOptimize(edit_distances(pairs, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pairs.size()));
}
BENCHMARK(BM_EditDistances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Standardize(benchmark::State& state) {
  std::vector<Vector> vs;
  for (const auto& [k, v] : exploration_data().vectors) vs.push_back(v);
  for (auto _ : state) benchmark::DoNotOptimize(standardize(vs, exec_of(state)));
}
BENCHMARK(BM_Standardize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_ScoreCorpus(benchmark::State& state) {
  static const Lexicon lexicon = load_lexicon(default_run_config().lexicon_dir);
  static const Corpus c = synth::skeleton_corpus(std::vector<std::vector<int>>(60, {40}), Dataset::Field, 3);
  for (auto _ : state) benchmark::DoNotOptimize(score_corpus(c, lexicon, exec_of(state)));
}
BENCHMARK(BM_ScoreCorpus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_ExplorationRows(benchmark::State& state) {
  const auto& d = exploration_data();
  const auto sizes = default_bin_sizes(60);
  for (auto _ : state) benchmark::DoNotOptimize(exploration_rows(d.corpus, d.vectors, sizes, exec_of(state)));
}
BENCHMARK(BM_ExplorationRows)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
