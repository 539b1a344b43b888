#include "verity/llm.hpp"

#include <array>
#include <fstream>
#include <thread>

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "json.hpp"

namespace verity {
namespace {

using nlohmann::json;

json request_key(const LlmRequest& request) {
  return json{{"template", request.template_id},
              {"prompt", request.prompt},
              {"temperature", request.decoding.temperature},
              {"max_tokens", request.decoding.max_tokens}};
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

}  // namespace

std::string canonical_request(const LlmRequest& request) { return request_key(request).dump(); }

std::string digest(const LlmRequest& request) { return sha256_hex(canonical_request(request)); }

ReplayCache::ReplayCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_, std::ios::binary);
  if (!in) return;  // a missing file is an empty cache
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (!record.is_object()) {
      throw FormatError("llm cache " + path_->string() + ": bad record on line " + std::to_string(line_no));
    }
    try {
      Entry entry{LlmRequest{record.at("template").get<std::string>(), record.at("prompt").get<std::string>(),
                             Decoding{record.at("temperature").get<double>(),
                                      record.at("max_tokens").get<std::uint32_t>()}},
                  record.at("text").get<std::string>()};
      auto key = digest(entry.request);
      if (record.contains("digest") && record.at("digest").get<std::string>() != key) {
        throw FormatError("llm cache " + path_->string() + ": digest mismatch on line " + std::to_string(line_no));
      }
      entries_.try_emplace(std::move(key), std::move(entry));
    } catch (const json::exception& e) {
      throw FormatError("llm cache " + path_->string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::optional<std::string> ReplayCache::find(const LlmRequest& request) const {
  const auto key = digest(request);
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  if (!(it->second.request == request)) throw Error("llm cache: digest collision on " + key);
  return it->second.text;
}

void ReplayCache::insert(const LlmRequest& request, const std::string& text) {
  auto key = digest(request);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.try_emplace(key, Entry{request, text});
  if (!inserted) return;
  if (!path_) return;
  json record = request_key(request);
  record["digest"] = key;
  record["text"] = text;
  std::ofstream out(*path_, std::ios::binary | std::ios::app);
  if (!out) throw IoError("llm cache: cannot append to " + path_->string());
  out << record.dump() << '\n';
  out.flush();
  if (!out) throw IoError("llm cache: write failure on " + path_->string());
}

std::size_t ReplayCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::string_view to_string(LlmMode mode) noexcept {
  switch (mode) {
    case LlmMode::Live: return "live";
    case LlmMode::Replay: return "replay";
    case LlmMode::Record: return "record";
  }
  return "replay";
}

std::optional<LlmMode> parse_llm_mode(std::string_view text) noexcept {
  if (text == "live") return LlmMode::Live;
  if (text == "replay") return LlmMode::Replay;
  if (text == "record") return LlmMode::Record;
  return std::nullopt;
}

LlmClient::LlmClient(LlmMode mode, std::shared_ptr<ReplayCache> cache, std::shared_ptr<ChatBackend> backend,
                     RetryPolicy retry, std::ptrdiff_t max_in_flight)
    : mode_(mode),
      cache_(std::move(cache)),
      backend_(std::move(backend)),
      retry_(retry),
      in_flight_(std::max<std::ptrdiff_t>(1, max_in_flight)) {
  if (mode_ != LlmMode::Live && !cache_) throw std::invalid_argument("llm client: replay/record mode needs a cache");
  if (mode_ != LlmMode::Replay && !backend_) throw std::invalid_argument("llm client: live/record mode needs a backend");
}

std::string LlmClient::call_live(const LlmRequest& request) {
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
    if (attempt > 0) {
      auto delay = retry_.base_delay * (1 << (attempt - 1));
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
    }
    try {
      in_flight_.acquire();
      struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
      } release{in_flight_};
      live_calls_.fetch_add(1);
      return backend_->send(request);
    } catch (const std::exception& e) {
      last_error = e.what();
      spdlog::warn("llm: attempt {} for template '{}' failed: {}", attempt + 1, request.template_id, last_error);
    }
  }
  throw BackendUnavailable("llm backend unavailable after " + std::to_string(retry_.max_retries + 1) +
                           " attempts: " + last_error);
}

LlmResponse LlmClient::complete(const LlmRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  };

  if (mode_ != LlmMode::Live) {
    if (auto text = cache_->find(request)) return LlmResponse{std::move(*text), Provenance::Cache, elapsed()};
    if (mode_ == LlmMode::Replay) throw CacheMiss(digest(request));
  }
  auto text = call_live(request);
  if (mode_ == LlmMode::Record) cache_->insert(request, text);
  return LlmResponse{std::move(text), Provenance::Live, elapsed()};
}

}  // namespace verity
