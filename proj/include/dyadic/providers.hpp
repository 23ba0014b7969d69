#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dyadic/error.hpp"

namespace dyadic {

enum class LogprobBase { E, Two };

struct Capabilities {
  std::optional<int> embedding_dim;
  LogprobBase logprob_base = LogprobBase::E;
  bool deterministic = true;
};

// Converts one log-probability in the declared base into surprisal bits.
inline double to_bits(double logprob, LogprobBase base) {
  return base == LogprobBase::Two ? -logprob : -logprob / std::log(2.0);
}

struct RetryPolicy {
  int max_retries = 3;
  long base_delay_ms = 100;
  double factor = 2.0;
  long max_delay_ms = 30000;
  bool idempotent = true;  // non-idempotent calls are never retried
};

struct ProviderEndpoint {
  std::string url;
  std::string auth_env;  // name of the environment variable holding a bearer token
  long timeout_ms = 30000;
  RetryPolicy retry;
  int max_parallelism = 4;
  Capabilities declared;
};

// Validates timeout > 0 and parallelism >= 1; throws ConfigInvalid.
void validate(const ProviderEndpoint& endpoint);

// ---------------------------------------------------------------------------
// Retry with exponential backoff

// Delay before retry number `retry_index` (0-based), drawn uniformly from
// [base * factor^k, base * factor^(k+1)) using u01 in [0, 1), capped at max_delay_ms.
long backoff_delay_ms(const RetryPolicy& policy, int retry_index, double u01);

using Sleeper = std::function<void(std::chrono::milliseconds)>;
using Jitter = std::function<double()>;

Sleeper real_sleeper();
Jitter default_jitter();

template <class T>
struct Retried {
  T value;
  std::vector<Attempt> attempts;
};

// Runs `call` until it succeeds. Only ProviderUnavailable failures are retried;
// any other exception propagates immediately. After exhausting the policy,
// throws ProviderUnavailable carrying the attempt log.
template <class F>
auto with_retry(F&& call, const RetryPolicy& policy, const Sleeper& sleep = real_sleeper(),
                const Jitter& jitter = default_jitter()) -> Retried<decltype(call())> {
  std::vector<Attempt> log;
  const int max_attempts = 1 + (policy.idempotent ? std::max(0, policy.max_retries) : 0);
  for (int attempt = 1;; ++attempt) {
    long delay = 0;
    if (attempt > 1) {
      delay = backoff_delay_ms(policy, attempt - 2, jitter());
      sleep(std::chrono::milliseconds(delay));
    }
    try {
      auto value = call();
      log.push_back(Attempt{attempt, delay, {}});
      return Retried<decltype(call())>{std::move(value), std::move(log)};
    } catch (const ProviderUnavailable& e) {
      log.push_back(Attempt{attempt, delay, e.what()});
      if (attempt >= max_attempts) {
        throw ProviderUnavailable("giving up after " + std::to_string(attempt) + " attempt(s): " +
                                      e.what(),
                                  std::move(log));
      }
    }
  }
}

// Caps concurrent calls against one endpoint.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(int max_parallelism);

  class Slot {
   public:
    explicit Slot(ConcurrencyLimiter& owner) : owner_(&owner) { owner_->sem_.acquire(); }
    ~Slot() { owner_->sem_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    ConcurrencyLimiter* owner_;
  };

  Slot acquire() { return Slot(*this); }

 private:
  std::counting_semaphore<1024> sem_;
};

// ---------------------------------------------------------------------------
// Provider interfaces

class CorrectorProvider {
 public:
  virtual ~CorrectorProvider() = default;
  virtual std::string correct(std::string_view text) = 0;
  virtual Capabilities capabilities() { return {}; }
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) = 0;
  virtual Capabilities capabilities() { return {}; }
};

struct Token {
  std::int32_t id = 0;
  std::string piece;

  bool operator==(const Token&) const = default;
};

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<Token> tokenize(std::string_view text) = 0;
};

// Returns one log-probability per target token, each conditioned on the
// context followed by the preceding targets (teacher forcing).
class SurprisalProvider {
 public:
  virtual ~SurprisalProvider() = default;
  virtual std::vector<double> logprobs(std::span<const std::int32_t> context,
                                       std::span<const std::int32_t> targets) = 0;
  virtual Capabilities capabilities() { return {}; }
};

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.7;
  int max_tokens = 70;
  std::string model;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual Capabilities capabilities() { return {}; }
};

// Queries declared capabilities and, for embedders, checks the observed vector
// dimension against the declared one (CapabilityMismatch on disagreement).
Capabilities probe_capabilities(EmbeddingProvider& provider);
Capabilities probe_capabilities(SurprisalProvider& provider);

// ---------------------------------------------------------------------------
// Deterministic offline stubs

class IdentityCorrector final : public CorrectorProvider {
 public:
  std::string correct(std::string_view text) override { return std::string(text); }
};

// Replaces whole inputs found in the table; passes others through unchanged.
class TableCorrector final : public CorrectorProvider {
 public:
  explicit TableCorrector(std::map<std::string, std::string> table) : table_(std::move(table)) {}
  std::string correct(std::string_view text) override;

 private:
  std::map<std::string, std::string> table_;
};

// One-hot vector at fnv1a(text) mod dim.
class HashOneHotEmbedder final : public EmbeddingProvider {
 public:
  explicit HashOneHotEmbedder(int dim);
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  Capabilities capabilities() override;

 private:
  int dim_;
};

// Dense pseudo-random vector seeded by the text hash (deterministic, non-sparse).
class HashDenseEmbedder final : public EmbeddingProvider {
 public:
  explicit HashDenseEmbedder(int dim);
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  Capabilities capabilities() override;

 private:
  int dim_;
};

class TableEmbedder final : public EmbeddingProvider {
 public:
  TableEmbedder(std::map<std::string, std::vector<double>> table, Capabilities declared = {})
      : table_(std::move(table)), declared_(declared) {}
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  Capabilities capabilities() override { return declared_; }

 private:
  std::map<std::string, std::vector<double>> table_;
  Capabilities declared_;
};

// Splits on whitespace; ids are a stable hash of the piece.
class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::vector<Token> tokenize(std::string_view text) override;
};

// Every target gets probability p.
class FixedProbabilitySurprisal final : public SurprisalProvider {
 public:
  explicit FixedProbabilitySurprisal(double p, LogprobBase base = LogprobBase::E);
  std::vector<double> logprobs(std::span<const std::int32_t> context,
                               std::span<const std::int32_t> targets) override;
  Capabilities capabilities() override;

 private:
  double p_;
  LogprobBase base_;
};

// Memoryless: probability depends only on the target token id.
class TokenTableSurprisal final : public SurprisalProvider {
 public:
  TokenTableSurprisal(std::map<std::int32_t, double> p, double fallback_p,
                      LogprobBase base = LogprobBase::E);
  std::vector<double> logprobs(std::span<const std::int32_t> context,
                               std::span<const std::int32_t> targets) override;
  Capabilities capabilities() override;

 private:
  std::map<std::int32_t, double> p_;
  double fallback_;
  LogprobBase base_;
};

// Context-sensitive: probability is a hash of (the last `memory` tokens seen, target),
// mapped into [0.01, 0.99].
class ContextHashSurprisal final : public SurprisalProvider {
 public:
  explicit ContextHashSurprisal(int memory = 8) : memory_(memory) {}
  std::vector<double> logprobs(std::span<const std::int32_t> context,
                               std::span<const std::int32_t> targets) override;

 private:
  int memory_;
};

// Replays log-probabilities recorded in a JSON-lines file of
// {context_tokens, target_tokens, logprobs}; unknown requests raise ProviderUnavailable.
class RecordedSurprisal final : public SurprisalProvider {
 public:
  RecordedSurprisal(const std::string& path, LogprobBase base = LogprobBase::E);
  std::vector<double> logprobs(std::span<const std::int32_t> context,
                               std::span<const std::int32_t> targets) override;
  Capabilities capabilities() override;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>>, std::vector<double>>
      table_;
  LogprobBase base_;
};

// Returns a deterministic continuation built from the last message.
class EchoChat final : public ChatProvider {
 public:
  std::string complete(const ChatRequest& request) override;
};

// Stub construction from a kind name and parameters (used by the CLI config).
struct StubSpec {
  std::string kind;  // echo | identity | hash-one-hot | hash-dense | fixed-probability | whitespace
  std::map<std::string, std::string> params;
};

std::unique_ptr<CorrectorProvider> make_stub_corrector(const StubSpec& spec);
std::unique_ptr<EmbeddingProvider> make_stub_embedder(const StubSpec& spec);
std::unique_ptr<SurprisalProvider> make_stub_surprisal(const StubSpec& spec);
std::unique_ptr<ChatProvider> make_stub_chat(const StubSpec& spec);

}  // namespace dyadic
