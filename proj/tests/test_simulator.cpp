#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "dyadic/error.hpp"
#include "dyadic/simulator.hpp"
#include "dyadic/synthbench.hpp"
#include "dyadic/text.hpp"

using namespace dyadic;

namespace {

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::Io;
}

SimConfig config() {
  SimConfig c;
  c.user_sim_prompt = "Du er en deltager.";
  c.ai_sim_prompt = "Du er en fortæller.";
  c.parallel_stories = 2;
  return c;
}

// Returns "" for the first `empties` calls, then echoes.
class SometimesEmpty final : public ChatProvider {
 public:
  explicit SometimesEmpty(int empties) : left_(empties) {}
  std::string complete(const ChatRequest& r) override {
    if (left_-- > 0) return "  \n ";
    return EchoChat().complete(r);
  }

 private:
  int left_;
};

}  // namespace

TEST(Simulator, MirrorsSessionStructure) {
  const Corpus field = synth::skeleton_corpus({{3, 2}, {1}, {2, 2, 1}}, Dataset::Field, 1, "f");
  EchoChat chat;
  const auto r = simulate_dataset(field, chat, config());
  ASSERT_EQ(r.corpus.stories.size(), 3u);
  EXPECT_EQ(r.corpus.dataset, Dataset::Simulated);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& f = field.stories[s];
    const auto& g = r.corpus.stories[s];
    EXPECT_EQ(g.story_id, "sim-" + f.story_id);
    EXPECT_EQ(g.dataset, Dataset::Simulated);
    ASSERT_EQ(g.sessions.size(), f.sessions.size());
    for (std::size_t k = 0; k < f.sessions.size(); ++k) {
      EXPECT_EQ(g.sessions[k].length, f.sessions[k].length);
      EXPECT_EQ(g.sessions[k].first_interaction, f.sessions[k].first_interaction);
      EXPECT_EQ(g.sessions[k].session_id, "sim-" + f.sessions[k].session_id);
    }
    ASSERT_EQ(g.interactions.size(), f.interactions.size());
    for (const auto& in : g.interactions) {
      EXPECT_EQ(in.user_turn.turn_index, 2 * in.interaction_index);
      EXPECT_EQ(in.ai_turn.agent, Agent::Ai);
      EXPECT_FALSE(in.ai_turn.text.empty());
    }
  }
  EXPECT_EQ(r.calls, 2 * 11);
  EXPECT_EQ(r.exchanges.size(), 22u);
}

TEST(Context, FirstTurnSeesOnlyPrompt) {
  const Corpus c = synth::skeleton_corpus({{2}}, Dataset::Simulated, 2);
  const auto m = build_context(SimRole::UserSim, c.stories[0], 0, config());
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].role, "system");
  EXPECT_EQ(m[0].content, "Du er en deltager.");
}

TEST(Context, UserSimSessionStartSeesOnlyPrecedingInteraction) {
  const Corpus c = synth::skeleton_corpus({{4, 2}}, Dataset::Simulated, 3);
  const auto& st = c.stories[0];
  const auto m = build_context(SimRole::UserSim, st, 4, config());
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[1], (ChatMessage{"assistant", st.interactions[3].user_turn.text}));
  EXPECT_EQ(m[2], (ChatMessage{"user", st.interactions[3].ai_turn.text}));
  const auto m5 = build_context(SimRole::UserSim, st, 5, config());
  ASSERT_EQ(m5.size(), 5u);
  EXPECT_EQ(m5[3].content, st.interactions[4].user_turn.text);
  // Within the first session everything earlier is visible.
  EXPECT_EQ(build_context(SimRole::UserSim, st, 3, config()).size(), 7u);
}

TEST(Context, AiSimSeesWholeStory) {
  const Corpus c = synth::skeleton_corpus({{2, 2}}, Dataset::Simulated, 4);
  const auto& st = c.stories[0];
  const auto m = build_context(SimRole::AiSim, st, 3, config());
  ASSERT_EQ(m.size(), 1u + 6u + 1u);
  EXPECT_EQ(m[1], (ChatMessage{"user", st.interactions[0].user_turn.text}));
  EXPECT_EQ(m[2].role, "assistant");
  EXPECT_EQ(m.back(), (ChatMessage{"user", st.interactions[3].user_turn.text}));
  EXPECT_EQ(code_of([&] { build_context(SimRole::AiSim, st, 4, config()); }), Errc::OutOfRange);
}

TEST(Context, AiSimTruncationDropsOldestTurns) {
  const Corpus c = synth::skeleton_corpus({{6}}, Dataset::Simulated, 5);
  const auto& st = c.stories[0];
  auto cfg = config();
  const auto full = build_context(SimRole::AiSim, st, 5, cfg);
  std::size_t total = 0;
  for (const auto& m : full) total += text::code_point_length(m.content);
  const std::size_t first = text::code_point_length(full[1].content);
  cfg.context_limit_chars = total - 1;
  const auto cut = build_context(SimRole::AiSim, st, 5, cfg);
  ASSERT_EQ(cut.size(), full.size() - 1);
  EXPECT_EQ(cut[1], full[2]);
  cfg.context_limit_chars = total - first;
  EXPECT_EQ(build_context(SimRole::AiSim, st, 5, cfg).size(), full.size() - 1);
  cfg.context_limit_chars = 1;
  const auto minimal = build_context(SimRole::AiSim, st, 5, cfg);
  ASSERT_EQ(minimal.size(), 2u);
  EXPECT_EQ(minimal[0].role, "system");
  EXPECT_EQ(minimal[1], full.back());
}

TEST(Request, UserParametersFallBackToAi) {
  const Corpus c = synth::skeleton_corpus({{2}}, Dataset::Simulated, 6);
  auto cfg = config();
  cfg.temperature = 0.3;
  cfg.max_tokens = 40;
  cfg.model = "m";
  auto r = build_request(SimRole::UserSim, c.stories[0], 1, cfg);
  EXPECT_EQ(r.temperature, 0.3);
  EXPECT_EQ(r.max_tokens, 40);
  EXPECT_EQ(r.model, "m");
  cfg.user_temperature = 1.1;
  cfg.user_max_tokens = 12;
  r = build_request(SimRole::UserSim, c.stories[0], 1, cfg);
  EXPECT_EQ(r.temperature, 1.1);
  EXPECT_EQ(r.max_tokens, 12);
  EXPECT_EQ(build_request(SimRole::AiSim, c.stories[0], 1, cfg).max_tokens, 40);
}

TEST(NextTurn, EmptyCompletionsRetriedThenFail) {
  const Corpus c = synth::skeleton_corpus({{2}}, Dataset::Simulated, 7);
  auto cfg = config();
  cfg.empty_retries = 2;
  SometimesEmpty two(2);
  CallBudget budget(0);
  const auto ex = next_turn(SimRole::AiSim, c.stories[0], 0, cfg, two, budget);
  EXPECT_EQ(ex.retries, 2);
  EXPECT_EQ(budget.used(), 3);
  EXPECT_EQ(ex.turn_index, 1);
  SometimesEmpty three(3);
  EXPECT_EQ(code_of([&] { next_turn(SimRole::AiSim, c.stories[0], 0, cfg, three, budget); }),
            Errc::EmptyGeneration);
}

TEST(NextTurn, BudgetExceeded) {
  const Corpus field = synth::skeleton_corpus({{3}, {3}}, Dataset::Field, 8);
  auto cfg = config();
  cfg.max_total_calls = 5;
  EchoChat chat;
  EXPECT_EQ(code_of([&] { simulate_dataset(field, chat, cfg); }), Errc::BudgetExceeded);
  CallBudget b(2);
  b.charge();
  b.charge();
  EXPECT_EQ(code_of([&] { b.charge(); }), Errc::BudgetExceeded);
  EXPECT_EQ(b.used(), 2);
}

TEST(Audit, RecordsReproduceRequests) {
  const Corpus field = synth::skeleton_corpus({{2, 1}, {2}}, Dataset::Field, 9);
  EchoChat chat;
  const auto r = simulate_dataset(field, chat, config());
  std::ostringstream out;
  write_audit(r.exchanges, out);
  std::istringstream in(out.str());
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const auto& ex = r.exchanges.at(i++);
    EXPECT_EQ(j.at("story_id"), ex.story_id);
    EXPECT_EQ(j.at("role"), std::string(to_string(ex.role)));
    EXPECT_TRUE(j.contains("latency_ms"));
    // Replaying the recorded messages reproduces the recorded response.
    ChatRequest req;
    for (const auto& m : j.at("messages")) {
      req.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    }
    req.max_tokens = j.at("max_tokens").get<int>();
    req.temperature = j.at("temperature").get<double>();
    EXPECT_EQ(req.messages, ex.request.messages);
    EXPECT_EQ(text::collapse_whitespace(chat.complete(req)), j.at("response").get<std::string>());
  }
  EXPECT_EQ(i, r.exchanges.size());
  std::ostringstream quiet;
  write_audit(r.exchanges, quiet, true);
  EXPECT_EQ(quiet.str().find("latency_ms"), std::string::npos);
}

TEST(Config, Validate) {
  auto c = config();
  EXPECT_NO_THROW(c.validate());
  c.max_tokens = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), Errc::ConfigInvalid);
  c = config();
  c.temperature = -0.1;
  EXPECT_EQ(code_of([&] { c.validate(); }), Errc::ConfigInvalid);
  c = config();
  c.user_max_tokens = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), Errc::ConfigInvalid);
  c = config();
  c.parallel_stories = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), Errc::ConfigInvalid);
  c = config();
  c.empty_retries = -1;
  EXPECT_EQ(code_of([&] { c.validate(); }), Errc::ConfigInvalid);
}

TEST(Config, LoadPrompts) {
  const auto dir = std::filesystem::temp_directory_path() / "dyadic_prompts";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "user_sim.txt") << "bruger\n";
  std::ofstream(dir / "ai_sim.txt") << "fortæller\r\n";
  SimConfig c;
  load_prompts(c, dir);
  EXPECT_EQ(c.user_sim_prompt, "bruger");
  EXPECT_EQ(c.ai_sim_prompt, "fortæller");
  std::filesystem::remove(dir / "ai_sim.txt");
  EXPECT_EQ(code_of([&] { load_prompts(c, dir); }), Errc::Io);
  std::filesystem::remove_all(dir);
}
