#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "verity/types.hpp"

namespace verity {

/// Fraction of positions where preds[i] == golds[i]. Throws
/// std::invalid_argument on empty input or a length mismatch.
double accuracy(std::span<const Stance> preds, std::span<const Stance> golds);

struct EvidenceQuality {
  double evidence_ratio = 0.0;  // retrieved gold / total gold
  double claim_ratio = 0.0;     // claims with at least one gold hit / claims
  std::size_t claims = 0;       // claims with non-empty gold evidence
  std::size_t gold_total = 0;
  std::size_t gold_hits = 0;
  std::size_t claims_hit = 0;
};

/// Matches on (normalized title, paragraph index). Claims with no gold
/// evidence are left out of every numerator and denominator. Both ratios are
/// 0 when no claim has gold evidence.
EvidenceQuality evidence_quality(std::span<const std::vector<EvidenceRef>> retrieved,
                                 std::span<const std::vector<EvidenceRef>> gold);

}  // namespace verity
