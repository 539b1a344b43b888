#include "verity/mixing.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace verity {
namespace {

void check_ratio(MixRatio ratio) {
  if (!(ratio.open >= 0.0) || !(ratio.gold >= 0.0) || ratio.open + ratio.gold <= 0.0) {
    throw std::invalid_argument("mix: ratio components must be non-negative and not both zero");
  }
}

// First `count` entries of a seeded Fisher-Yates permutation of [0, n).
std::vector<std::size_t> sample(std::size_t n, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace

std::optional<MixRatio> parse_mix_ratio(std::string_view text) noexcept {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto number = [](std::string_view s) -> std::optional<double> {
    try {
      std::size_t used = 0;
      const double v = std::stod(std::string(s), &used);
      if (used != s.size()) return std::nullopt;
      return v;
    } catch (...) {
      return std::nullopt;
    }
  };
  auto open = number(text.substr(0, colon));
  auto gold = number(text.substr(colon + 1));
  if (!open || !gold || *open < 0.0 || *gold < 0.0 || *open + *gold <= 0.0) return std::nullopt;
  return MixRatio{*open, *gold};
}

MixCounts plan_mix(std::size_t gold_pool, std::size_t open_pool, MixRatio ratio, std::optional<std::size_t> total) {
  check_ratio(ratio);
  const double share_open = ratio.open / (ratio.open + ratio.gold);
  const double share_gold = 1.0 - share_open;
  double target = static_cast<double>(total.value_or(share_open > 0.0 ? open_pool : gold_pool));
  if (share_open > 0.0) target = std::min(target, std::floor(static_cast<double>(open_pool) / share_open + 1e-9));
  if (share_gold > 0.0) target = std::min(target, std::floor(static_cast<double>(gold_pool) / share_gold + 1e-9));

  const auto t = static_cast<std::size_t>(target);
  MixCounts counts;
  counts.open = std::min(open_pool, static_cast<std::size_t>(std::llround(static_cast<double>(t) * share_open)));
  counts.gold = std::min(gold_pool, t - counts.open);
  return counts;
}

std::vector<JudgeExample> mix_training_data(std::span<const JudgeExample> gold_pool,
                                            std::span<const JudgeExample> open_pool, MixRatio ratio,
                                            std::uint64_t seed, std::optional<std::size_t> total) {
  check_ratio(ratio);
  if (gold_pool.empty() && open_pool.empty()) throw std::invalid_argument("mix: both pools are empty");
  const auto counts = plan_mix(gold_pool.size(), open_pool.size(), ratio, total);

  std::mt19937_64 rng(seed);
  const auto open_pick = sample(open_pool.size(), counts.open, rng);
  const auto gold_pick = sample(gold_pool.size(), counts.gold, rng);

  std::vector<JudgeExample> out;
  out.reserve(counts.open + counts.gold);
  std::size_t taken_open = 0;
  std::size_t taken_gold = 0;
  while (taken_open < counts.open || taken_gold < counts.gold) {
    // Take from whichever pool is furthest behind its quota.
    const bool open_left = taken_open < counts.open;
    const bool gold_left = taken_gold < counts.gold;
    bool take_open = open_left;
    if (open_left && gold_left) {
      take_open = static_cast<double>(taken_open) * static_cast<double>(counts.gold) <=
                  static_cast<double>(taken_gold) * static_cast<double>(counts.open);
    }
    if (take_open) {
      out.push_back(open_pool[open_pick[taken_open++]]);
    } else {
      out.push_back(gold_pool[gold_pick[taken_gold++]]);
    }
  }
  return out;
}

}  // namespace verity
