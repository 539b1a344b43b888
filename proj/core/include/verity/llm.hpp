#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "verity/error.hpp"

namespace verity {

struct Decoding {
  double temperature = 0.0;
  std::uint32_t max_tokens = 512;

  friend bool operator==(const Decoding&, const Decoding&) = default;
};

struct LlmRequest {
  std::string template_id;
  std::string prompt;
  Decoding decoding;

  friend bool operator==(const LlmRequest&, const LlmRequest&) = default;
};

enum class Provenance { Live, Cache };

struct LlmResponse {
  std::string text;
  Provenance provenance = Provenance::Live;
  std::chrono::milliseconds latency{0};
};

/// Replay mode asked for a request that was never recorded.
class CacheMiss : public Error {
 public:
  explicit CacheMiss(const std::string& digest) : Error("llm cache miss: " + digest), digest_(digest) {}
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::string digest_;
};

/// The live backend failed on every attempt.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

/// Canonical serialization of a request: compact JSON with sorted keys
///   {"max_tokens":N,"prompt":"...","temperature":T,"template":"..."}
std::string canonical_request(const LlmRequest& request);

/// Lowercase hex SHA-256 (64 characters) of canonical_request(request).
std::string digest(const LlmRequest& request);

/// Anything that turns a prompt into a completion. Pipeline stages depend on
/// this interface only.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual LlmResponse complete(const LlmRequest& request) = 0;
};

/// Raw transport to a model server. Implementations throw on failure.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string send(const LlmRequest& request) = 0;
};

/// Chat-completions style HTTP backend.
///
/// POST {url}  {"model": M, "messages": [{"role": "user", "content": P}],
///              "temperature": T, "max_tokens": N}
/// and reads choices[0].message.content from the response.
class HttpChatBackend : public ChatBackend {
 public:
  struct Config {
    std::string url;  // full endpoint, e.g. http://localhost:8000/v1/chat/completions
    std::string model;
    std::string api_key;
    std::chrono::seconds timeout{120};
  };

  /// Reads VERITY_LLM_URL, VERITY_LLM_MODEL and VERITY_LLM_API_KEY.
  static Config config_from_env();

  explicit HttpChatBackend(Config config);
  std::string send(const LlmRequest& request) override;

 private:
  Config config_;
};

/// Persistent map from request digest to completion text.
///
/// The backing file holds one JSON object per line:
///   {"digest": D, "template": ID, "prompt": P, "temperature": T, "max_tokens": N, "text": X}
/// New entries are appended and flushed under a lock, so the file is always a
/// sequence of complete lines. Full keys are stored and compared on lookup.
class ReplayCache {
 public:
  ReplayCache() = default;
  /// Loads `path` if it exists; later inserts are appended to it.
  explicit ReplayCache(std::filesystem::path path);

  std::optional<std::string> find(const LlmRequest& request) const;
  void insert(const LlmRequest& request, const std::string& text);
  std::size_t size() const;
  const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

 private:
  struct Entry {
    LlmRequest request;
    std::string text;
  };

  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, Entry> entries_;
};

enum class LlmMode { Live, Replay, Record };

std::string_view to_string(LlmMode mode) noexcept;
std::optional<LlmMode> parse_llm_mode(std::string_view text) noexcept;

struct RetryPolicy {
  int max_retries = 2;
  std::chrono::milliseconds base_delay{500};  // doubled after each failure
};

/// Thread-safe facade combining a backend, the replay cache and retries.
///
/// replay: cached text or CacheMiss, never the network.
/// record: cached text if present, otherwise a live call that is persisted.
/// live:   a live call, nothing persisted.
class LlmClient : public LanguageModel {
 public:
  LlmClient(LlmMode mode, std::shared_ptr<ReplayCache> cache, std::shared_ptr<ChatBackend> backend,
            RetryPolicy retry = {}, std::ptrdiff_t max_in_flight = 4);

  LlmResponse complete(const LlmRequest& request) override;

  LlmMode mode() const noexcept { return mode_; }
  std::uint64_t live_calls() const noexcept { return live_calls_.load(); }

 private:
  std::string call_live(const LlmRequest& request);

  LlmMode mode_;
  std::shared_ptr<ReplayCache> cache_;
  std::shared_ptr<ChatBackend> backend_;
  RetryPolicy retry_;
  std::counting_semaphore<1024> in_flight_;
  std::atomic<std::uint64_t> live_calls_{0};
};

}  // namespace verity
