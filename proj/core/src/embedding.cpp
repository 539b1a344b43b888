#include "verity/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include "httplib.h"
#include "json.hpp"

#include "verity/text.hpp"

namespace verity {
namespace {

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

HashingProvider::HashingProvider(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw std::invalid_argument("hashing provider: dimension must be positive");
}

std::size_t HashingProvider::bucket(std::string_view feature) const noexcept {
  return static_cast<std::size_t>(fnv1a(feature) % dimension_);
}

std::vector<std::string> HashingProvider::features(std::string_view text) {
  auto tokens = tokenize(text);
  std::vector<std::string> out;
  out.reserve(tokens.size() * 2);
  for (const auto& t : tokens) out.push_back(t);
  for (std::size_t i = 1; i < tokens.size(); ++i) out.push_back(tokens[i - 1] + ' ' + tokens[i]);
  return out;
}

std::vector<double> HashingProvider::encode(std::string_view text) const {
  std::vector<double> v(dimension_, 0.0);
  for (const auto& f : features(text)) v[bucket(f)] += 1.0;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(Config config) : config_(std::move(config)) {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  auto res = client.Get("/health");
  if (!res) throw Failure("encoder: /health unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Failure("encoder: /health returned " + std::to_string(res->status));
  auto health = nlohmann::json::parse(res->body, nullptr, false);
  if (!health.is_object() || !health.contains("dimension")) throw Failure("encoder: malformed /health reply");
  dimension_ = health.at("dimension").get<std::size_t>();
  model_id_ = health.value("model", "");
  if (dimension_ == 0) throw Failure("encoder: reported dimension 0");
}

std::vector<std::vector<double>> HttpEmbeddingProvider::encode_batch(std::span<const std::string> texts) const {
  using nlohmann::json;
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  json body{{"texts", json(std::vector<std::string>(texts.begin(), texts.end()))}};
  auto res = client.Post("/encode", body.dump(), "application/json");
  if (!res) throw Failure("encoder: /encode unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Failure("encoder: /encode returned " + std::to_string(res->status));
  auto reply = json::parse(res->body, nullptr, false);
  if (!reply.is_object()) throw Failure("encoder: malformed /encode reply");
  std::vector<std::vector<double>> vectors;
  try {
    if (reply.at("dimension").get<std::size_t>() != dimension_) throw Failure("encoder: dimension changed");
    vectors = reply.at("vectors").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw Failure(std::string("encoder: malformed /encode reply: ") + e.what());
  }
  if (vectors.size() != texts.size()) throw Failure("encoder: vector count mismatch");
  for (const auto& v : vectors) {
    if (v.size() != dimension_) throw Failure("encoder: vector length mismatch");
  }
  return vectors;
}

std::vector<double> HttpEmbeddingProvider::encode(std::string_view text) const {
  std::string t(text);
  return encode_batch(std::span(&t, 1)).front();
}

}  // namespace verity
