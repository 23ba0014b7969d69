#include "dyadic/simulator.hpp"

#include <chrono>
#include <exception>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "dyadic/error.hpp"
#include "dyadic/text.hpp"

namespace dyadic {

std::string_view to_string(SimRole r) { return r == SimRole::UserSim ? "user_sim" : "ai_sim"; }

void SimConfig::validate() const {
  if (!(temperature >= 0.0)) throw Error(Errc::ConfigInvalid, "temperature must be >= 0");
  if (max_tokens < 1) throw Error(Errc::ConfigInvalid, "max_tokens must be >= 1");
  if (user_temperature && !(*user_temperature >= 0.0)) {
    throw Error(Errc::ConfigInvalid, "user temperature must be >= 0");
  }
  if (user_max_tokens && *user_max_tokens < 1) {
    throw Error(Errc::ConfigInvalid, "user max_tokens must be >= 1");
  }
  if (empty_retries < 0) throw Error(Errc::ConfigInvalid, "empty_retries must be >= 0");
  if (parallel_stories < 1) throw Error(Errc::ConfigInvalid, "parallel_stories must be >= 1");
  if (max_total_calls < 0) throw Error(Errc::ConfigInvalid, "max_total_calls must be >= 0");
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

const Session& session_of(const Story& story, int interaction_index) {
  for (const auto& s : story.sessions) {
    if (interaction_index >= s.first_interaction && interaction_index < s.end_interaction()) return s;
  }
  throw Error(Errc::OutOfRange, "interaction " + std::to_string(interaction_index) +
                                    " lies outside every session of story " + story.story_id);
}

std::size_t chars(const std::vector<ChatMessage>& ms) {
  std::size_t n = 0;
  for (const auto& m : ms) n += text::code_point_length(m.content);
  return n;
}

}  // namespace

void load_prompts(SimConfig& config, const std::filesystem::path& dir) {
  config.user_sim_prompt = read_file(dir / "user_sim.txt");
  config.ai_sim_prompt = read_file(dir / "ai_sim.txt");
}

std::vector<ChatMessage> build_context(SimRole role, const Story& story, int interaction_index,
                                       const SimConfig& config) {
  const int i = interaction_index;
  std::vector<ChatMessage> out;
  if (role == SimRole::UserSim) {
    if (static_cast<int>(story.interactions.size()) < i) {
      throw Error(Errc::OutOfRange, "story is missing interactions before " + std::to_string(i));
    }
    out.push_back({"system", config.user_sim_prompt});
    const int first = session_of(story, i).first_interaction;
    const int from = first > 0 ? first - 1 : 0;
    for (int k = from; k < i; ++k) {
      out.push_back({"assistant", story.interactions[k].user_turn.text});
      out.push_back({"user", story.interactions[k].ai_turn.text});
    }
    return out;
  }

  if (static_cast<int>(story.interactions.size()) <= i) {
    throw Error(Errc::OutOfRange, "AI turn requested before its user turn");
  }
  std::vector<ChatMessage> history;
  for (int k = 0; k < i; ++k) {
    history.push_back({"user", story.interactions[k].user_turn.text});
    history.push_back({"assistant", story.interactions[k].ai_turn.text});
  }
  const ChatMessage system{"system", config.ai_sim_prompt};
  const ChatMessage current{"user", story.interactions[i].user_turn.text};
  std::size_t budget = text::code_point_length(system.content) + text::code_point_length(current.content);
  std::size_t used = chars(history);
  std::size_t drop = 0;
  while (drop < history.size() && budget + used > config.context_limit_chars) {
    used -= text::code_point_length(history[drop].content);
    ++drop;
  }
  out.push_back(system);
  out.insert(out.end(), history.begin() + static_cast<long>(drop), history.end());
  out.push_back(current);
  return out;
}

ChatRequest build_request(SimRole role, const Story& story, int interaction_index,
                          const SimConfig& config) {
  ChatRequest req;
  req.messages = build_context(role, story, interaction_index, config);
  req.model = config.model;
  if (role == SimRole::UserSim) {
    req.temperature = config.user_temperature.value_or(config.temperature);
    req.max_tokens = config.user_max_tokens.value_or(config.max_tokens);
  } else {
    req.temperature = config.temperature;
    req.max_tokens = config.max_tokens;
  }
  return req;
}

void CallBudget::charge() {
  const long n = ++used_;
  if (limit_ > 0 && n > limit_) {
    --used_;
    throw Error(Errc::BudgetExceeded, "call budget of " + std::to_string(limit_) + " exhausted");
  }
}

ChatExchange next_turn(SimRole role, const Story& story, int interaction_index,
                       const SimConfig& config, ChatProvider& client, CallBudget& budget) {
  ChatExchange ex;
  ex.story_id = story.story_id;
  ex.turn_index = 2 * interaction_index + (role == SimRole::AiSim ? 1 : 0);
  ex.role = role;
  ex.request = build_request(role, story, interaction_index, config);
  for (int attempt = 0; attempt <= config.empty_retries; ++attempt) {
    budget.charge();
    const auto start = std::chrono::steady_clock::now();
    std::string reply = client.complete(ex.request);
    ex.latency_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    reply = text::collapse_whitespace(reply);
    if (!reply.empty()) {
      ex.response = std::move(reply);
      ex.retries = attempt;
      return ex;
    }
  }
  throw Error(Errc::EmptyGeneration, "empty completion for story " + story.story_id + " turn " +
                                         std::to_string(ex.turn_index) + " after " +
                                         std::to_string(config.empty_retries + 1) + " attempt(s)");
}

namespace {

std::vector<ChatExchange> simulate_story(const Story& field, Story& sim, ChatProvider& client,
                                         const SimConfig& config, CallBudget& budget) {
  sim = Story{};
  sim.story_id = "sim-" + field.story_id;
  sim.dataset = Dataset::Simulated;
  sim.genre = field.genre;
  for (const auto& s : field.sessions) {
    sim.sessions.push_back(
        Session{"sim-" + s.session_id, sim.story_id, s.first_interaction, s.length});
  }
  std::vector<ChatExchange> log;
  const int n = static_cast<int>(field.interactions.size());
  for (int i = 0; i < n; ++i) {
    const std::string& session_id = session_of(sim, i).session_id;
    auto user = next_turn(SimRole::UserSim, sim, i, config, client, budget);
    Interaction inter;
    inter.interaction_index = i;
    inter.user_turn = make_turn(sim.story_id, session_id, 2 * i, Agent::User, user.response);
    sim.interactions.push_back(inter);
    auto ai = next_turn(SimRole::AiSim, sim, i, config, client, budget);
    sim.interactions.back().ai_turn = make_turn(sim.story_id, session_id, 2 * i + 1, Agent::Ai, ai.response);
    log.push_back(std::move(user));
    log.push_back(std::move(ai));
  }
  return log;
}

}  // namespace

SimulationResult simulate_dataset(const Corpus& field, ChatProvider& client, const SimConfig& config) {
  config.validate();
  CallBudget budget(config.max_total_calls);
  const long n = static_cast<long>(field.stories.size());
  std::vector<Story> stories(field.stories.size());
  std::vector<std::vector<ChatExchange>> logs(field.stories.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.parallel_stories)
  for (long s = 0; s < n; ++s) {
    try {
      logs[s] = simulate_story(field.stories[s], stories[s], client, config, budget);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  SimulationResult result;
  result.corpus.dataset = Dataset::Simulated;
  result.corpus.provenance.source_path = "simulated:" + field.provenance.source_path;
  result.corpus.stories = std::move(stories);
  for (auto& l : logs) {
    for (auto& ex : l) result.exchanges.push_back(std::move(ex));
  }
  result.calls = budget.used();
  return result;
}

void write_audit(const std::vector<ChatExchange>& exchanges, std::ostream& out, bool omit_latency) {
  for (const auto& ex : exchanges) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : ex.request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    nlohmann::json rec = {{"story_id", ex.story_id},
                          {"turn_index", ex.turn_index},
                          {"role", to_string(ex.role)},
                          {"model", ex.request.model},
                          {"temperature", ex.request.temperature},
                          {"max_tokens", ex.request.max_tokens},
                          {"messages", messages},
                          {"response", ex.response},
                          {"retries", ex.retries}};
    if (!omit_latency) rec["latency_ms"] = ex.latency_ms;
    out << rec.dump() << '\n';
  }
}

}  // namespace dyadic
