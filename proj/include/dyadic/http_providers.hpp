#pragma once

#include <atomic>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>

#include "dyadic/providers.hpp"

// Plain HTTP+JSON clients for the provider wire contracts. Every endpoint is a
// single URL receiving a JSON POST; `<url>/capabilities` answers the GET handshake.
namespace dyadic {

class HttpJsonClient {
 public:
  explicit HttpJsonClient(ProviderEndpoint endpoint, Sleeper sleeper = real_sleeper());

  // POST with retry and the endpoint's parallelism cap.
  nlohmann::json post(const nlohmann::json& body);

  // GET `<url>/capabilities`, cached. Falls back to the declared capabilities
  // when the endpoint does not implement the handshake (HTTP 404).
  Capabilities capabilities();

  long calls() const { return calls_.load(); }
  const ProviderEndpoint& endpoint() const { return endpoint_; }

 private:
  nlohmann::json request_once(const std::string& method, const std::string& path,
                              const nlohmann::json* body);

  ProviderEndpoint endpoint_;
  std::string scheme_host_port_;
  std::string path_;
  Sleeper sleeper_;
  ConcurrencyLimiter limiter_;
  std::atomic<long> calls_{0};
  std::mutex caps_mu_;
  std::optional<Capabilities> caps_;
};

// POST {text} -> {corrected_text}
class HttpCorrector final : public CorrectorProvider {
 public:
  explicit HttpCorrector(ProviderEndpoint endpoint) : client_(std::move(endpoint)) {}
  std::string correct(std::string_view text) override;
  Capabilities capabilities() override { return client_.capabilities(); }

 private:
  HttpJsonClient client_;
};

// POST {texts: [..]} -> {vectors: [[..]]}
class HttpEmbedder final : public EmbeddingProvider {
 public:
  explicit HttpEmbedder(ProviderEndpoint endpoint) : client_(std::move(endpoint)) {}
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  Capabilities capabilities() override { return client_.capabilities(); }

 private:
  HttpJsonClient client_;
};

// POST {text} -> {tokens: [ids], pieces: [strings]}
class HttpTokenizer final : public Tokenizer {
 public:
  explicit HttpTokenizer(ProviderEndpoint endpoint) : client_(std::move(endpoint)) {}
  std::vector<Token> tokenize(std::string_view text) override;

 private:
  HttpJsonClient client_;
};

// POST {context_tokens, target_tokens} -> {logprobs: [..]}
class HttpSurprisal final : public SurprisalProvider {
 public:
  explicit HttpSurprisal(ProviderEndpoint endpoint) : client_(std::move(endpoint)) {}
  std::vector<double> logprobs(std::span<const std::int32_t> context,
                               std::span<const std::int32_t> targets) override;
  Capabilities capabilities() override { return client_.capabilities(); }

 private:
  HttpJsonClient client_;
};

// POST {messages: [{role, content}], temperature, max_tokens} -> {text}
class HttpChat final : public ChatProvider {
 public:
  explicit HttpChat(ProviderEndpoint endpoint) : client_(std::move(endpoint)) {}
  std::string complete(const ChatRequest& request) override;
  Capabilities capabilities() override { return client_.capabilities(); }

 private:
  HttpJsonClient client_;
};

}  // namespace dyadic
