#include "verity/judge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace verity {
namespace {

using nlohmann::json;

constexpr std::string_view kCheckpointFormat = "verity-judge";
constexpr int kCheckpointVersion = 1;

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Probabilities softmax(double a, double b) noexcept {
  const double m = std::max(a, b);
  const double ea = std::exp(a - m);
  const double eb = std::exp(b - m);
  const double s = ea + eb;
  return {ea / s, eb / s};
}

void check_dim(std::span<const double> v, std::size_t expected) {
  if (v.size() != expected) {
    throw std::invalid_argument("judge: expected a vector of length " + std::to_string(expected) + ", got " +
                                std::to_string(v.size()));
  }
}

}  // namespace

FusionWeights fusion_weights(double z_first, double z_second) noexcept {
  const double gap = std::clamp(z_first - z_second, -kMaxFusionGap, kMaxFusionGap);
  const double small = 1.0 / (1.0 + std::exp(std::abs(gap)));
  const double large = 1.0 - small;
  return gap >= 0.0 ? FusionWeights{large, small} : FusionWeights{small, large};
}

double cross_entropy(const Probabilities& p, Stance gold) noexcept {
  return -std::log(std::max(p[label_index(gold)], kLossEpsilon));
}

Stance decide(const Probabilities& p) noexcept { return p[kTrueLabel] > p[kFalseLabel] ? Stance::True : Stance::False; }

JudgeModel::JudgeModel(std::size_t input_dim, std::size_t hidden_dim)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), params_(hidden_dim * input_dim + hidden_dim + 2 * hidden_dim + 4) {
  if (input_dim == 0 || hidden_dim == 0) throw std::invalid_argument("judge: dimensions must be positive");
}

JudgeModel JudgeModel::initialize(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed) {
  JudgeModel model(input_dim, hidden_dim);
  std::mt19937_64 rng(seed);
  const double a1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (double& w : model.hidden_weights()) w = a1 * (2.0 * unit_uniform(rng) - 1.0);
  const double a2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (double& w : model.output_weights()) w = a2 * (2.0 * unit_uniform(rng) - 1.0);
  return model;
}

FusionWeights JudgeModel::weights() const noexcept {
  const auto n = params_.size();
  return fusion_weights(params_[n - 2], params_[n - 1]);
}

JudgeModel::Activations JudgeModel::run(std::span<const double> v) const {
  check_dim(v, input_dim_);
  Activations act;
  act.hidden.resize(hidden_dim_);
  const double* w1 = params_.data();
  const double* b1 = params_.data() + hidden_offset_bias();
  for (std::size_t j = 0; j < hidden_dim_; ++j) {
    const double* row = w1 + j * input_dim_;
    double a = b1[j];
    for (std::size_t i = 0; i < input_dim_; ++i) a += row[i] * v[i];
    act.hidden[j] = std::tanh(a);
  }
  const double* w2 = params_.data() + output_offset();
  const double* b2 = w2 + 2 * hidden_dim_;
  double o0 = b2[0];
  double o1 = b2[1];
  for (std::size_t j = 0; j < hidden_dim_; ++j) {
    o0 += w2[j] * act.hidden[j];
    o1 += w2[hidden_dim_ + j] * act.hidden[j];
  }
  act.probs = softmax(o0, o1);
  return act;
}

Probabilities JudgeModel::classify(std::span<const double> v) const { return run(v).probs; }

JudgeModel::Output JudgeModel::forward(std::span<const double> v1, std::span<const double> v2) const {
  Output out;
  out.first = classify(v1);
  out.second = classify(v2);
  out.weights = weights();
  for (std::size_t k = 0; k < 2; ++k) {
    out.fused[k] = out.weights.first * out.first[k] + out.weights.second * out.second[k];
  }
  return out;
}

void JudgeModel::backprop(std::span<const double> v, const Activations& act, const std::array<double, 2>& d_logits,
                          std::span<double> grad) const {
  const double* w2 = params_.data() + output_offset();
  double* g_w1 = grad.data();
  double* g_b1 = grad.data() + hidden_offset_bias();
  double* g_w2 = grad.data() + output_offset();
  double* g_b2 = g_w2 + 2 * hidden_dim_;

  g_b2[0] += d_logits[0];
  g_b2[1] += d_logits[1];
  for (std::size_t j = 0; j < hidden_dim_; ++j) {
    const double h = act.hidden[j];
    g_w2[j] += d_logits[0] * h;
    g_w2[hidden_dim_ + j] += d_logits[1] * h;
    const double d_hidden = w2[j] * d_logits[0] + w2[hidden_dim_ + j] * d_logits[1];
    const double d_pre = d_hidden * (1.0 - h * h);
    if (d_pre == 0.0) continue;
    g_b1[j] += d_pre;
    double* row = g_w1 + j * input_dim_;
    for (std::size_t i = 0; i < input_dim_; ++i) row[i] += d_pre * v[i];
  }
}

double JudgeModel::accumulate_gradient(std::span<const double> v1, std::span<const double> v2, Stance gold,
                                       std::span<double> grad) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("judge: gradient buffer has the wrong size");
  const auto act1 = run(v1);
  const auto act2 = run(v2);
  const auto w = weights();
  const std::size_t g = label_index(gold);
  const double fused_gold = w.first * act1.probs[g] + w.second * act2.probs[g];
  if (fused_gold < kLossEpsilon) return -std::log(kLossEpsilon);  // clamped: flat

  const double d_fused = -1.0 / fused_gold;

  // Branch logits: dL/do_k = dL/dp_g * w_i * p_g * (delta_gk - p_k).
  auto branch_logits = [&](const Probabilities& p, double weight) {
    std::array<double, 2> d{};
    for (std::size_t k = 0; k < 2; ++k) {
      d[k] = d_fused * weight * p[g] * ((k == g ? 1.0 : 0.0) - p[k]);
    }
    return d;
  };
  backprop(v1, act1, branch_logits(act1.probs, w.first), grad);
  backprop(v2, act2, branch_logits(act2.probs, w.second), grad);

  const auto n = params_.size();
  const double gap = params_[n - 2] - params_[n - 1];
  if (std::abs(gap) < kMaxFusionGap) {
    const double d_gap = d_fused * (act1.probs[g] - act2.probs[g]) * w.first * w.second;
    grad[n - 2] += d_gap;
    grad[n - 1] -= d_gap;
  }
  return -std::log(fused_gold);
}

void JudgeModel::write(std::ostream& out, const EmbeddingProvider& provider) const {
  if (provider.dimension() != input_dim_) throw std::invalid_argument("judge: provider dimension mismatch");
  json doc{{"format", kCheckpointFormat},
           {"version", kCheckpointVersion},
           {"provider", {{"kind", provider.kind()}, {"dimension", provider.dimension()}}},
           {"input_dim", input_dim_},
           {"hidden_dim", hidden_dim_},
           {"parameters", params_}};
  out << doc.dump() << '\n';
}

void JudgeModel::save(const std::filesystem::path& path, const EmbeddingProvider& provider) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("judge: cannot write " + path.string());
  write(out, provider);
  if (!out) throw IoError("judge: write failure on " + path.string());
}

JudgeCheckpoint read_checkpoint(std::istream& in) {
  json doc = json::parse(in, nullptr, false);
  if (!doc.is_object() || doc.value("format", "") != kCheckpointFormat) throw FormatError("judge checkpoint: bad header");
  if (doc.value("version", 0) != kCheckpointVersion) throw FormatError("judge checkpoint: unsupported version");
  try {
    JudgeModel model(doc.at("input_dim").get<std::size_t>(), doc.at("hidden_dim").get<std::size_t>());
    auto params = doc.at("parameters").get<std::vector<double>>();
    if (params.size() != model.parameter_count()) throw FormatError("judge checkpoint: parameter count mismatch");
    std::copy(params.begin(), params.end(), model.parameters().begin());
    return JudgeCheckpoint{std::move(model), doc.at("provider").at("kind").get<std::string>(),
                           doc.at("provider").at("dimension").get<std::size_t>()};
  } catch (const json::exception& e) {
    throw FormatError(std::string("judge checkpoint: ") + e.what());
  }
}

JudgeCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("judge: cannot open " + path.string());
  return read_checkpoint(in);
}

std::pair<const Rationale&, const Rationale&> order_rationales(const RationalePair& pair) noexcept {
  return {pair.for_stance(pair.y_llm), pair.for_stance(opposite(pair.y_llm))};
}

std::vector<double> encode_branch(const Claim& claim, const Rationale& rationale, const EmbeddingProvider& provider) {
  auto v = provider.encode(claim.text + " [SEP] " + rationale.text);
  if (v.size() != provider.dimension()) throw Error("judge: provider returned a vector of the wrong length");
  return v;
}

EncodedExample encode_example(const JudgeExample& example, const EmbeddingProvider& provider) {
  auto [first, second] = order_rationales(example.pair);
  return EncodedExample{encode_branch(example.claim, first, provider), encode_branch(example.claim, second, provider),
                        example.gold};
}

TrainResult train_encoded(JudgeModel& model, std::span<const EncodedExample> data, const TrainConfig& config) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  if (config.batch_size == 0 || !(config.learning_rate > 0.0)) {
    throw std::invalid_argument("train: batch size and learning rate must be positive");
  }
  TrainResult result;
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::vector<double> grad(model.parameter_count());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = data[order[i]];
        const double l = model.accumulate_gradient(ex.first, ex.second, ex.gold, grad);
        if (!std::isfinite(l)) {
          throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch) + ", example " +
                              std::to_string(order[i]));
        }
        epoch_loss += l;
      }
      const double scale = config.learning_rate / static_cast<double>(end - start);
      auto params = model.parameters();
      for (std::size_t p = 0; p < params.size(); ++p) params[p] -= scale * grad[p];
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  return result;
}

TrainResult train(JudgeModel& model, std::span<const JudgeExample> data, const EmbeddingProvider& provider,
                  const TrainConfig& config) {
  if (provider.dimension() != model.input_dim()) throw std::invalid_argument("train: provider dimension mismatch");
  std::vector<EncodedExample> encoded;
  encoded.reserve(data.size());
  for (const auto& ex : data) encoded.push_back(encode_example(ex, provider));
  return train_encoded(model, encoded, config);
}

double gradient_check(const JudgeModel& model, const EncodedExample& example, double step) {
  std::vector<double> analytic(model.parameter_count(), 0.0);
  model.accumulate_gradient(example.first, example.second, example.gold, analytic);

  JudgeModel probe = model;
  auto params = probe.parameters();
  auto loss_at = [&] { return cross_entropy(probe.forward(example.first, example.second).fused, example.gold); };

  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + step;
    const double up = loss_at();
    params[p] = saved - step;
    const double down = loss_at();
    params[p] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double denom = std::max({std::abs(analytic[p]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[p] - numeric) / denom);
  }
  return worst;
}

double gradient_check(const JudgeModel& model, const JudgeExample& example, const EmbeddingProvider& provider,
                      double step) {
  return gradient_check(model, encode_example(example, provider), step);
}

Verdict make_verdict(const Probabilities& p_ver, const RationalePair& pair, std::vector<SourceLink> sources) {
  Verdict v;
  v.p_ver = p_ver;
  v.label = decide(p_ver);
  v.explanation = pair.for_stance(v.label).text;
  v.sources = std::move(sources);
  return v;
}

Verdict predict(const JudgeModel& model, const Claim& claim, const RationalePair& pair,
                const EmbeddingProvider& provider, std::vector<SourceLink> sources) {
  auto [first, second] = order_rationales(pair);
  const auto out = model.forward(encode_branch(claim, first, provider), encode_branch(claim, second, provider));
  return make_verdict(out.fused, pair, std::move(sources));
}

}  // namespace verity
