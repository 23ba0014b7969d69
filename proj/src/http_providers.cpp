#include "dyadic/http_providers.hpp"

#include <cstdlib>
#include <httplib.h>

namespace dyadic {

using nlohmann::json;

namespace {

void split_url(const std::string& url, std::string& scheme_host_port, std::string& path) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::ConfigInvalid, "provider url must start with http:// or https://: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port = url;
    path = "/";
  } else {
    scheme_host_port = url.substr(0, path_start);
    path = url.substr(path_start);
  }
}

LogprobBase parse_base(const json& j) {
  const auto s = j.is_string() ? j.get<std::string>() : std::to_string(j.get<int>());
  if (s == "e") return LogprobBase::E;
  if (s == "2") return LogprobBase::Two;
  throw Error(Errc::CapabilityMismatch, "unsupported logprob base '" + s + "'");
}

}  // namespace

HttpJsonClient::HttpJsonClient(ProviderEndpoint endpoint, Sleeper sleeper)
    : endpoint_(std::move(endpoint)),
      sleeper_(std::move(sleeper)),
      limiter_(std::max(1, endpoint_.max_parallelism)) {
  validate(endpoint_);
  split_url(endpoint_.url, scheme_host_port_, path_);
}

json HttpJsonClient::request_once(const std::string& method, const std::string& path,
                                  const json* body) {
  auto slot = limiter_.acquire();
  ++calls_;
  httplib::Client cli(scheme_host_port_);
  if (!cli.is_valid()) throw Error(Errc::ConfigInvalid, "invalid provider url " + endpoint_.url);
  const auto secs = endpoint_.timeout_ms / 1000;
  const auto usecs = (endpoint_.timeout_ms % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (!endpoint_.auth_env.empty()) {
    const char* token = std::getenv(endpoint_.auth_env.c_str());
    if (token == nullptr) {
      throw Error(Errc::ConfigInvalid, "environment variable " + endpoint_.auth_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  httplib::Result res = method == "GET"
                            ? cli.Get(path, headers)
                            : cli.Post(path, headers, body->dump(), "application/json");
  if (!res) {
    throw ProviderUnavailable(endpoint_.url + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw ProviderUnavailable(endpoint_.url + ": HTTP " + std::to_string(res->status));
  }
  if (res->status == 404 && method == "GET") return json();
  if (res->status >= 400) {
    // Client errors are not transient; surface them without retrying.
    throw Error(Errc::ProviderUnavailable,
                endpoint_.url + ": HTTP " + std::to_string(res->status) + " " + res->body);
  }
  try {
    return json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ProviderUnavailable, endpoint_.url + ": response is not JSON: " + e.what());
  }
}

json HttpJsonClient::post(const json& body) {
  return with_retry([&] { return request_once("POST", path_, &body); }, endpoint_.retry, sleeper_)
      .value;
}

Capabilities HttpJsonClient::capabilities() {
  std::lock_guard lock(caps_mu_);
  if (caps_) return *caps_;
  std::string caps_path = path_;
  if (caps_path.empty() || caps_path.back() != '/') caps_path += '/';
  caps_path += "capabilities";
  auto j = with_retry([&] { return request_once("GET", caps_path, nullptr); }, endpoint_.retry,
                      sleeper_)
               .value;
  Capabilities c = endpoint_.declared;
  if (j.is_object()) {
    if (j.contains("embedding_dim") && j["embedding_dim"].is_number_integer()) {
      const int dim = j["embedding_dim"].get<int>();
      if (c.embedding_dim && *c.embedding_dim != dim) {
        throw Error(Errc::CapabilityMismatch, "configured dim " + std::to_string(*c.embedding_dim) +
                                                  " but endpoint declares " + std::to_string(dim));
      }
      c.embedding_dim = dim;
    }
    if (j.contains("logprob_base")) c.logprob_base = parse_base(j["logprob_base"]);
    if (j.contains("deterministic") && j["deterministic"].is_boolean()) {
      c.deterministic = j["deterministic"].get<bool>();
    }
  }
  caps_ = c;
  return c;
}

namespace {

template <class T>
T field(const json& j, const char* name, const std::string& url) {
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::ProviderUnavailable, url + ": bad response field '" + name + "': " + e.what());
  }
}

}  // namespace

std::string HttpCorrector::correct(std::string_view text) {
  auto j = client_.post(json{{"text", std::string(text)}});
  return field<std::string>(j, "corrected_text", client_.endpoint().url);
}

std::vector<std::vector<double>> HttpEmbedder::embed(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  auto j = client_.post(json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}});
  auto v = field<std::vector<std::vector<double>>>(j, "vectors", client_.endpoint().url);
  if (v.size() != texts.size()) {
    throw Error(Errc::ProviderUnavailable, "embedding endpoint returned " +
                                               std::to_string(v.size()) + " vectors for " +
                                               std::to_string(texts.size()) + " texts");
  }
  return v;
}

std::vector<Token> HttpTokenizer::tokenize(std::string_view text) {
  auto j = client_.post(json{{"text", std::string(text)}});
  auto ids = field<std::vector<std::int32_t>>(j, "tokens", client_.endpoint().url);
  auto pieces = field<std::vector<std::string>>(j, "pieces", client_.endpoint().url);
  if (ids.size() != pieces.size()) {
    throw Error(Errc::TokenizerMismatch, "tokenizer returned mismatched ids and pieces");
  }
  std::vector<Token> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back(Token{ids[i], std::move(pieces[i])});
  return out;
}

std::vector<double> HttpSurprisal::logprobs(std::span<const std::int32_t> context,
                                            std::span<const std::int32_t> targets) {
  json body{{"context_tokens", std::vector<std::int32_t>(context.begin(), context.end())},
            {"target_tokens", std::vector<std::int32_t>(targets.begin(), targets.end())}};
  auto lp = field<std::vector<double>>(client_.post(body), "logprobs", client_.endpoint().url);
  if (lp.size() != targets.size()) {
    throw Error(Errc::ProviderUnavailable, "surprisal endpoint returned wrong logprob count");
  }
  return lp;
}

std::string HttpChat::complete(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  json body{{"messages", messages},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
  if (!request.model.empty()) body["model"] = request.model;
  return field<std::string>(client_.post(body), "text", client_.endpoint().url);
}

}  // namespace dyadic
