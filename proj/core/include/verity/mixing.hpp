#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "verity/judge.hpp"

namespace verity {

/// Relative weight of open-setting and gold-setting examples, e.g. 80:20.
struct MixRatio {
  double open = 100.0;
  double gold = 0.0;
};

/// Parses "open:gold", e.g. "80:20".
std::optional<MixRatio> parse_mix_ratio(std::string_view text) noexcept;

struct MixCounts {
  std::size_t open = 0;
  std::size_t gold = 0;
};

/// How many examples to draw from each pool. The target size defaults to the
/// open pool size (the gold pool size when the open weight is zero) and is
/// scaled down until neither pool is over-drawn.
MixCounts plan_mix(std::size_t gold_pool, std::size_t open_pool, MixRatio ratio,
                   std::optional<std::size_t> total = std::nullopt);

/// Seeded sampling without replacement from each pool, interleaved so every
/// prefix stays close to the requested proportion. Throws
/// std::invalid_argument for a negative or all-zero ratio or two empty pools.
std::vector<JudgeExample> mix_training_data(std::span<const JudgeExample> gold_pool,
                                            std::span<const JudgeExample> open_pool, MixRatio ratio,
                                            std::uint64_t seed, std::optional<std::size_t> total = std::nullopt);

}  // namespace verity
