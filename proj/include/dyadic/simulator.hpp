#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dyadic/corpus.hpp"
#include "dyadic/providers.hpp"

namespace dyadic {

enum class SimRole { UserSim, AiSim };
std::string_view to_string(SimRole r);

struct SimConfig {
  std::string model;
  double temperature = 0.7;
  int max_tokens = 70;
  // Generation parameters for the simulated participant; unset values fall back to the AI's.
  std::optional<double> user_temperature;
  std::optional<int> user_max_tokens;
  std::string user_sim_prompt;
  std::string ai_sim_prompt;
  std::size_t context_limit_chars = 16000;  // AI_SIM history budget, in code points
  long max_total_calls = 0;                 // 0 = unlimited
  int empty_retries = 2;                    // extra attempts after an empty completion
  int parallel_stories = 4;

  void validate() const;  // ConfigInvalid on bad values
};

// Reads user_sim.txt and ai_sim.txt from a prompt directory.
void load_prompts(SimConfig& config, const std::filesystem::path& dir);

struct ChatExchange {
  std::string story_id;
  int turn_index = 0;
  SimRole role = SimRole::UserSim;
  ChatRequest request;
  std::string response;
  double latency_ms = 0;
  int retries = 0;  // empty completions discarded before this one
};

// Messages sent for the next turn of `story`.
//   USER_SIM, generating the user turn of interaction i: its system prompt, then
//   the interaction preceding the session (only at session start it sees nothing
//   older), then every earlier interaction of the current session. Roles are
//   flipped: its own earlier turns are "assistant", the AI's are "user".
//   AI_SIM, generating the reply in interaction i: its system prompt, the whole
//   story before i and the user turn of i, with the oldest history turns dropped
//   until the total fits context_limit_chars.
std::vector<ChatMessage> build_context(SimRole role, const Story& story, int interaction_index,
                                       const SimConfig& config);

ChatRequest build_request(SimRole role, const Story& story, int interaction_index,
                          const SimConfig& config);

// Shared call counter enforcing max_total_calls across stories.
class CallBudget {
 public:
  explicit CallBudget(long limit) : limit_(limit) {}
  void charge();  // throws BudgetExceeded once the limit is used up
  long used() const { return used_.load(); }

 private:
  long limit_;
  std::atomic<long> used_{0};
};

// Generates one turn; retries empty completions up to config.empty_retries.
ChatExchange next_turn(SimRole role, const Story& story, int interaction_index,
                       const SimConfig& config, ChatProvider& client, CallBudget& budget);

struct SimulationResult {
  Corpus corpus;  // dataset SIMULATED, same stories / sessions / lengths as the field corpus
  std::vector<ChatExchange> exchanges;  // in story order, then turn order
  long calls = 0;
};

SimulationResult simulate_dataset(const Corpus& field, ChatProvider& client, const SimConfig& config);

// One JSON object per exchange: story_id, turn_index, role, messages, parameters,
// response, retries and (unless omit_latency) latency_ms.
void write_audit(const std::vector<ChatExchange>& exchanges, std::ostream& out,
                 bool omit_latency = false);

}  // namespace dyadic
