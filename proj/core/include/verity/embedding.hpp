#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "verity/error.hpp"

namespace verity {

/// Maps text to a fixed-length real vector. Implementations must be
/// deterministic and safe for concurrent encode calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> encode(std::string_view text) const = 0;
  /// "hashing" or "http"; stored in judge checkpoints.
  virtual std::string kind() const = 0;
};

/// Feature hashing of unigrams and adjacent-token bigrams (64-bit FNV-1a,
/// bucket = hash mod dimension), L2-normalized. Text without tokens encodes
/// to the zero vector. Never fails.
class HashingProvider final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDimension = 256;

  explicit HashingProvider(std::size_t dimension = kDefaultDimension);

  std::size_t dimension() const override { return dimension_; }
  std::vector<double> encode(std::string_view text) const override;
  std::string kind() const override { return "hashing"; }

  /// Bucket of a unigram token, or of a bigram written as "left right".
  std::size_t bucket(std::string_view feature) const noexcept;
  /// Every feature string (unigrams then bigrams) extracted from `text`.
  static std::vector<std::string> features(std::string_view text);

 private:
  std::size_t dimension_;
};

/// Encoder reached over HTTP.
///
///   GET  /health -> {"status": "ok", "model": ID, "dimension": D}
///   POST /encode {"texts": [...]} -> {"dimension": D, "vectors": [[...], ...]}
///
/// The dimension is read from /health at construction and checked against
/// every /encode reply.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  class Failure : public Error {
   public:
    using Error::Error;
  };

  struct Config {
    std::string base_url;  // e.g. http://127.0.0.1:8090
    std::chrono::seconds timeout{60};
  };

  explicit HttpEmbeddingProvider(Config config);

  std::size_t dimension() const override { return dimension_; }
  std::vector<double> encode(std::string_view text) const override;
  std::vector<std::vector<double>> encode_batch(std::span<const std::string> texts) const;
  std::string kind() const override { return "http"; }
  const std::string& model_id() const noexcept { return model_id_; }

 private:
  Config config_;
  std::size_t dimension_ = 0;
  std::string model_id_;
};

}  // namespace verity
