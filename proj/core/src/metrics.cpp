#include "verity/metrics.hpp"

#include <set>
#include <stdexcept>

#include "verity/corpus.hpp"

namespace verity {

double accuracy(std::span<const Stance> preds, std::span<const Stance> golds) {
  if (preds.size() != golds.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (preds.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == golds[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

EvidenceQuality evidence_quality(std::span<const std::vector<EvidenceRef>> retrieved,
                                 std::span<const std::vector<EvidenceRef>> gold) {
  if (retrieved.size() != gold.size()) throw std::invalid_argument("evidence_quality: length mismatch");
  auto normalized = [](const std::vector<EvidenceRef>& refs) {
    std::set<EvidenceRef> out;
    for (const auto& r : refs) out.insert(EvidenceRef{normalize_title(r.page_title), r.paragraph_index});
    return out;
  };

  EvidenceQuality q;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto gold_set = normalized(gold[i]);
    if (gold_set.empty()) continue;
    const auto got = normalized(retrieved[i]);
    std::size_t hits = 0;
    for (const auto& g : gold_set) hits += got.contains(g) ? 1 : 0;
    ++q.claims;
    q.gold_total += gold_set.size();
    q.gold_hits += hits;
    q.claims_hit += hits > 0 ? 1 : 0;
  }
  if (q.claims > 0) {
    q.evidence_ratio = static_cast<double>(q.gold_hits) / static_cast<double>(q.gold_total);
    q.claim_ratio = static_cast<double>(q.claims_hit) / static_cast<double>(q.claims);
  }
  return q;
}

}  // namespace verity
