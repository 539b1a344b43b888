#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "verity/llm.hpp"

namespace verity {
namespace {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v == nullptr ? std::string{} : std::string(v);
}

// Splits "scheme://host[:port]/path" into ("scheme://host[:port]", "/path").
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme = url.find("://");
  auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpChatBackend::Config HttpChatBackend::config_from_env() {
  Config config;
  config.url = env_or_empty("VERITY_LLM_URL");
  config.model = env_or_empty("VERITY_LLM_MODEL");
  config.api_key = env_or_empty("VERITY_LLM_API_KEY");
  return config;
}

HttpChatBackend::HttpChatBackend(Config config) : config_(std::move(config)) {
  if (config_.url.empty()) throw std::invalid_argument("http backend: empty url (set VERITY_LLM_URL)");
}

std::string HttpChatBackend::send(const LlmRequest& request) {
  using nlohmann::json;
  auto [base, path] = split_url(config_.url);
  httplib::Client client(base);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  json body{{"model", config_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
            {"temperature", request.decoding.temperature},
            {"max_tokens", request.decoding.max_tokens}};

  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw BackendUnavailable("http backend: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw BackendUnavailable("http backend: status " + std::to_string(res->status));
  }
  json reply = json::parse(res->body, nullptr, false);
  if (!reply.is_object()) throw BackendUnavailable("http backend: response is not JSON");
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendUnavailable(std::string("http backend: unexpected response shape: ") + e.what());
  }
}

}  // namespace verity
