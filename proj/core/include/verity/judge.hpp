#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "verity/embedding.hpp"
#include "verity/error.hpp"
#include "verity/reasoning.hpp"
#include "verity/types.hpp"

namespace verity {

/// Two-way distribution in label order [true, false].
using Probabilities = std::array<double, 2>;

inline constexpr std::size_t kTrueLabel = 0;
inline constexpr std::size_t kFalseLabel = 1;

constexpr std::size_t label_index(Stance s) noexcept { return s == Stance::True ? kTrueLabel : kFalseLabel; }

/// Largest |z1 - z2| the fusion weights respond to. Beyond it the weights are
/// frozen, which keeps both strictly inside (0, 1) in double precision.
inline constexpr double kMaxFusionGap = 30.0;

/// Floor applied to the gold probability inside the log of the loss.
inline constexpr double kLossEpsilon = 1e-12;

/// Convex branch weights. first + second == 1 exactly.
struct FusionWeights {
  double first = 0.5;
  double second = 0.5;
};

/// Normalized exponentials of two logits, computed so that the smaller weight
/// is formed directly and the larger as its complement.
FusionWeights fusion_weights(double z_first, double z_second) noexcept;

/// -ln(max(p[gold], kLossEpsilon)).
double cross_entropy(const Probabilities& p, Stance gold) noexcept;

/// argmax over [true, false]; an exact tie resolves to false.
Stance decide(const Probabilities& p) noexcept;

/// Judge head: one classifier shared by both branches (d -> h -> 2, tanh
/// hidden layer, softmax output) and two fusion logits.
///
/// Parameters live in one flat vector laid out as
///   [hidden weights h*d (row-major) | hidden bias h | output weights 2*h | output bias 2 | fusion logits 2]
class JudgeModel {
 public:
  static constexpr std::size_t kDefaultHidden = 128;

  struct Output {
    Probabilities first{};   // p1, branch aligned with the preliminary label
    Probabilities second{};  // p2
    Probabilities fused{};   // w1 * p1 + w2 * p2
    FusionWeights weights;
  };

  /// All-zero parameters.
  JudgeModel(std::size_t input_dim, std::size_t hidden_dim);

  /// Weights uniform in +-1/sqrt(fan_in), biases zero, fusion logits equal.
  static JudgeModel initialize(std::size_t input_dim, std::size_t hidden_dim = kDefaultHidden,
                               std::uint64_t seed = 0);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden_dim() const noexcept { return hidden_dim_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  std::span<double> hidden_weights() noexcept { return slice(0, hidden_dim_ * input_dim_); }
  std::span<double> hidden_bias() noexcept { return slice(hidden_offset_bias(), hidden_dim_); }
  std::span<double> output_weights() noexcept { return slice(output_offset(), 2 * hidden_dim_); }
  std::span<double> output_bias() noexcept { return slice(output_offset() + 2 * hidden_dim_, 2); }
  std::span<double> fusion_logits() noexcept { return slice(params_.size() - 2, 2); }

  FusionWeights weights() const noexcept;

  /// softmax(MLP(v)). Throws std::invalid_argument on a dimension mismatch.
  Probabilities classify(std::span<const double> v) const;

  Output forward(std::span<const double> v1, std::span<const double> v2) const;

  /// Loss for one example; adds its gradient into `grad` (parameter_count long).
  double accumulate_gradient(std::span<const double> v1, std::span<const double> v2, Stance gold,
                             std::span<double> grad) const;

  void write(std::ostream& out, const EmbeddingProvider& provider) const;
  void save(const std::filesystem::path& path, const EmbeddingProvider& provider) const;

  friend bool operator==(const JudgeModel&, const JudgeModel&) = default;

 private:
  struct Activations {
    std::vector<double> hidden;
    Probabilities probs{};
  };

  std::size_t hidden_offset_bias() const noexcept { return hidden_dim_ * input_dim_; }
  std::size_t output_offset() const noexcept { return hidden_dim_ * input_dim_ + hidden_dim_; }
  std::span<double> slice(std::size_t offset, std::size_t count) noexcept {
    return std::span(params_).subspan(offset, count);
  }
  Activations run(std::span<const double> v) const;
  void backprop(std::span<const double> v, const Activations& act, const std::array<double, 2>& d_logits,
                std::span<double> grad) const;

  std::size_t input_dim_;
  std::size_t hidden_dim_;
  std::vector<double> params_;
};

/// A checkpoint: the model plus the provider it was trained against.
struct JudgeCheckpoint {
  JudgeModel model;
  std::string provider_kind;
  std::size_t provider_dimension = 0;
};

JudgeCheckpoint read_checkpoint(std::istream& in);
JudgeCheckpoint load_checkpoint(const std::filesystem::path& path);

/// Rationale agreeing with the preliminary label first, the other second.
std::pair<const Rationale&, const Rationale&> order_rationales(const RationalePair& pair) noexcept;

/// provider.encode(claim + " [SEP] " + rationale).
std::vector<double> encode_branch(const Claim& claim, const Rationale& rationale, const EmbeddingProvider& provider);

struct JudgeExample {
  Claim claim;
  RationalePair pair;
  Stance gold = Stance::False;
};

struct EncodedExample {
  std::vector<double> first;
  std::vector<double> second;
  Stance gold = Stance::False;
};

EncodedExample encode_example(const JudgeExample& example, const EmbeddingProvider& provider);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean per-example loss seen during each epoch
};

/// Loss became NaN or infinite.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Mini-batch gradient descent on mean cross-entropy over every parameter of
/// `model`. The provider is frozen. Example order per epoch comes from a
/// Fisher-Yates shuffle driven by std::mt19937_64(seed), so a seed fixes the
/// whole run.
TrainResult train(JudgeModel& model, std::span<const JudgeExample> data, const EmbeddingProvider& provider,
                  const TrainConfig& config);
TrainResult train_encoded(JudgeModel& model, std::span<const EncodedExample> data, const TrainConfig& config);

/// Largest relative error between the analytic gradient and central finite
/// differences over every parameter. Per parameter the error is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
double gradient_check(const JudgeModel& model, const EncodedExample& example, double step = 1e-5);
double gradient_check(const JudgeModel& model, const JudgeExample& example, const EmbeddingProvider& provider,
                      double step = 1e-5);

struct Verdict {
  Stance label = Stance::False;
  Probabilities p_ver{0.5, 0.5};
  std::string explanation;
  std::vector<SourceLink> sources;
};

/// label = decide(p_ver); explanation = the rationale whose stance is label.
Verdict make_verdict(const Probabilities& p_ver, const RationalePair& pair, std::vector<SourceLink> sources);

Verdict predict(const JudgeModel& model, const Claim& claim, const RationalePair& pair,
                const EmbeddingProvider& provider, std::vector<SourceLink> sources);

}  // namespace verity
