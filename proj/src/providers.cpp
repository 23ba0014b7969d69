#include "dyadic/providers.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "dyadic/text.hpp"

namespace dyadic {

using nlohmann::json;

void validate(const ProviderEndpoint& endpoint) {
  if (endpoint.timeout_ms <= 0) throw Error(Errc::ConfigInvalid, "provider timeout must be > 0");
  if (endpoint.max_parallelism < 1) {
    throw Error(Errc::ConfigInvalid, "provider parallelism must be >= 1");
  }
  if (endpoint.retry.max_retries < 0) throw Error(Errc::ConfigInvalid, "retries must be >= 0");
}

long backoff_delay_ms(const RetryPolicy& policy, int retry_index, double u01) {
  const double lo = static_cast<double>(policy.base_delay_ms) * std::pow(policy.factor, retry_index);
  const double hi = lo * policy.factor;
  const double d = lo + std::clamp(u01, 0.0, 1.0) * (hi - lo);
  // Keep the whole-millisecond result inside the half-open interval.
  const long upper = std::max(static_cast<long>(std::ceil(hi)) - 1, static_cast<long>(lo));
  return std::min(std::min(static_cast<long>(std::floor(d)), upper), policy.max_delay_ms);
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Jitter default_jitter() {
  auto gen = std::make_shared<std::mt19937_64>(std::random_device{}());
  auto mu = std::make_shared<std::mutex>();
  return [gen, mu] {
    std::lock_guard lock(*mu);
    return std::uniform_real_distribution<double>(0.0, 1.0)(*gen);
  };
}

ConcurrencyLimiter::ConcurrencyLimiter(int max_parallelism)
    : sem_(std::clamp(max_parallelism, 1, 1024)) {}

Capabilities probe_capabilities(EmbeddingProvider& provider) {
  Capabilities caps = provider.capabilities();
  const std::string probe[] = {"capability probe"};
  auto v = provider.embed(probe);
  if (v.size() != 1) throw Error(Errc::CapabilityMismatch, "probe returned wrong vector count");
  const int observed = static_cast<int>(v.front().size());
  if (caps.embedding_dim && *caps.embedding_dim != observed) {
    throw Error(Errc::CapabilityMismatch, "declared dim " + std::to_string(*caps.embedding_dim) +
                                              " but observed " + std::to_string(observed));
  }
  caps.embedding_dim = observed;
  return caps;
}

Capabilities probe_capabilities(SurprisalProvider& provider) { return provider.capabilities(); }

// ---------------------------------------------------------------------------

std::string TableCorrector::correct(std::string_view text) {
  auto it = table_.find(std::string(text));
  return it == table_.end() ? std::string(text) : it->second;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_from_hash(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

}  // namespace

HashOneHotEmbedder::HashOneHotEmbedder(int dim) : dim_(dim) {
  if (dim < 1) throw Error(Errc::ConfigInvalid, "embedding dim must be >= 1");
}

std::vector<std::vector<double>> HashOneHotEmbedder::embed(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    std::vector<double> v(dim_, 0.0);
    v[text::fnv1a(t) % static_cast<std::uint64_t>(dim_)] = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

Capabilities HashOneHotEmbedder::capabilities() {
  Capabilities c;
  c.embedding_dim = dim_;
  return c;
}

HashDenseEmbedder::HashDenseEmbedder(int dim) : dim_(dim) {
  if (dim < 1) throw Error(Errc::ConfigInvalid, "embedding dim must be >= 1");
}

std::vector<std::vector<double>> HashDenseEmbedder::embed(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    std::uint64_t state = text::fnv1a(t);
    std::vector<double> v(dim_);
    for (auto& x : v) x = 2.0 * unit_from_hash(splitmix64(state)) - 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

Capabilities HashDenseEmbedder::capabilities() {
  Capabilities c;
  c.embedding_dim = dim_;
  return c;
}

std::vector<std::vector<double>> TableEmbedder::embed(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  for (const auto& t : texts) {
    auto it = table_.find(t);
    if (it == table_.end()) throw ProviderUnavailable("no table embedding for '" + t + "'");
    out.push_back(it->second);
  }
  return out;
}

std::vector<Token> WhitespaceTokenizer::tokenize(std::string_view text) {
  std::vector<Token> out;
  std::istringstream in{std::string(text)};
  std::string piece;
  while (in >> piece) {
    out.push_back(Token{static_cast<std::int32_t>(text::fnv1a(piece) & 0x7fffffff), piece});
  }
  return out;
}

namespace {

double log_in_base(double p, LogprobBase base) {
  return base == LogprobBase::Two ? std::log2(p) : std::log(p);
}

void check_probability(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(Errc::ConfigInvalid, "stub probability must be in (0,1]");
}

}  // namespace

FixedProbabilitySurprisal::FixedProbabilitySurprisal(double p, LogprobBase base)
    : p_(p), base_(base) {
  check_probability(p);
}

std::vector<double> FixedProbabilitySurprisal::logprobs(std::span<const std::int32_t>,
                                                        std::span<const std::int32_t> targets) {
  return std::vector<double>(targets.size(), log_in_base(p_, base_));
}

Capabilities FixedProbabilitySurprisal::capabilities() {
  Capabilities c;
  c.logprob_base = base_;
  return c;
}

TokenTableSurprisal::TokenTableSurprisal(std::map<std::int32_t, double> p, double fallback_p,
                                         LogprobBase base)
    : p_(std::move(p)), fallback_(fallback_p), base_(base) {
  check_probability(fallback_p);
  for (const auto& [id, q] : p_) check_probability(q);
}

std::vector<double> TokenTableSurprisal::logprobs(std::span<const std::int32_t>,
                                                  std::span<const std::int32_t> targets) {
  std::vector<double> out;
  out.reserve(targets.size());
  for (auto id : targets) {
    auto it = p_.find(id);
    out.push_back(log_in_base(it == p_.end() ? fallback_ : it->second, base_));
  }
  return out;
}

Capabilities TokenTableSurprisal::capabilities() {
  Capabilities c;
  c.logprob_base = base_;
  return c;
}

std::vector<double> ContextHashSurprisal::logprobs(std::span<const std::int32_t> context,
                                                   std::span<const std::int32_t> targets) {
  std::vector<std::int32_t> history(context.begin(), context.end());
  std::vector<double> out;
  out.reserve(targets.size());
  for (auto target : targets) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const std::size_t start =
        history.size() > static_cast<std::size_t>(memory_) ? history.size() - memory_ : 0;
    for (std::size_t i = start; i < history.size(); ++i) {
      h = (h ^ static_cast<std::uint32_t>(history[i])) * 0x100000001b3ULL;
    }
    h = (h ^ static_cast<std::uint32_t>(target)) * 0x100000001b3ULL;
    std::uint64_t state = h;
    const double p = 0.01 + 0.98 * unit_from_hash(splitmix64(state));
    out.push_back(std::log(p));
    history.push_back(target);
  }
  return out;
}

RecordedSurprisal::RecordedSurprisal(const std::string& path, LogprobBase base) : base_(base) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read " + path);
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::collapse_whitespace(line).empty()) continue;
    try {
      auto rec = json::parse(line);
      auto ctx = rec.at("context_tokens").get<std::vector<std::int32_t>>();
      auto tgt = rec.at("target_tokens").get<std::vector<std::int32_t>>();
      auto lp = rec.at("logprobs").get<std::vector<double>>();
      if (lp.size() != tgt.size()) throw Error(Errc::MalformedRecord, "logprob count mismatch");
      table_[{std::move(ctx), std::move(tgt)}] = std::move(lp);
    } catch (const json::exception& e) {
      throw Error(Errc::MalformedRecord, path + " line " + std::to_string(n) + ": " + e.what());
    }
  }
}

std::vector<double> RecordedSurprisal::logprobs(std::span<const std::int32_t> context,
                                                std::span<const std::int32_t> targets) {
  auto key = std::make_pair(std::vector<std::int32_t>(context.begin(), context.end()),
                            std::vector<std::int32_t>(targets.begin(), targets.end()));
  auto it = table_.find(key);
  if (it == table_.end()) throw ProviderUnavailable("request not present in recorded surprisal file");
  return it->second;
}

Capabilities RecordedSurprisal::capabilities() {
  Capabilities c;
  c.logprob_base = base_;
  return c;
}

std::string EchoChat::complete(const ChatRequest& request) {
  std::string last;
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role != "system") {
      last = it->content;
      break;
    }
  }
  std::istringstream in(last);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  std::ostringstream out;
  out << "[" << request.messages.size() << "]";
  if (words.empty()) out << " Der var engang";
  // The prefix counts against the token budget.
  const std::size_t keep = std::min<std::size_t>(words.size(), std::max(0, request.max_tokens - 1));
  for (std::size_t i = 0; i < keep; ++i) out << ' ' << words[i];
  return out.str();
}

// ---------------------------------------------------------------------------

namespace {

std::string param(const StubSpec& spec, const std::string& key, const std::string& fallback) {
  auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

LogprobBase parse_base(const std::string& s) {
  if (s == "e" || s == "E") return LogprobBase::E;
  if (s == "2") return LogprobBase::Two;
  throw Error(Errc::ConfigInvalid, "logprob base must be 'e' or '2'");
}

[[noreturn]] void unknown_stub(const StubSpec& spec, const char* what) {
  throw Error(Errc::ConfigInvalid, "unknown " + std::string(what) + " stub '" + spec.kind + "'");
}

}  // namespace

std::unique_ptr<CorrectorProvider> make_stub_corrector(const StubSpec& spec) {
  if (spec.kind == "identity" || spec.kind == "echo") return std::make_unique<IdentityCorrector>();
  unknown_stub(spec, "corrector");
}

std::unique_ptr<EmbeddingProvider> make_stub_embedder(const StubSpec& spec) {
  const int dim = std::stoi(param(spec, "dim", "64"));
  if (spec.kind == "hash-one-hot") return std::make_unique<HashOneHotEmbedder>(dim);
  if (spec.kind == "hash-dense") return std::make_unique<HashDenseEmbedder>(dim);
  unknown_stub(spec, "embedding");
}

std::unique_ptr<SurprisalProvider> make_stub_surprisal(const StubSpec& spec) {
  const auto base = parse_base(param(spec, "base", "e"));
  if (spec.kind == "fixed-probability") {
    return std::make_unique<FixedProbabilitySurprisal>(std::stod(param(spec, "p", "0.5")), base);
  }
  if (spec.kind == "context-hash") {
    return std::make_unique<ContextHashSurprisal>(std::stoi(param(spec, "memory", "8")));
  }
  if (spec.kind == "recorded") return std::make_unique<RecordedSurprisal>(param(spec, "path", ""), base);
  unknown_stub(spec, "surprisal");
}

std::unique_ptr<ChatProvider> make_stub_chat(const StubSpec& spec) {
  if (spec.kind == "echo") return std::make_unique<EchoChat>();
  unknown_stub(spec, "chat");
}

}  // namespace dyadic
