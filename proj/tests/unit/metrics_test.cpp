#include "doctest.h"

#include <algorithm>
#include <random>

#include "verity/metrics.hpp"

using namespace verity;

namespace {

using Refs = std::vector<EvidenceRef>;

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("accuracy examples") {
    const std::vector<Stance> golds{Stance::True, Stance::False, Stance::True, Stance::False};
    CHECK(accuracy(golds, golds) == 1.0);
    const std::vector<Stance> preds{Stance::True, Stance::False, Stance::False, Stance::False};
    CHECK(accuracy(preds, golds) == 0.75);
    const std::vector<Stance> shorter{Stance::True};
    CHECK_THROWS_AS(accuracy(shorter, golds), std::invalid_argument);
    CHECK_THROWS_AS(accuracy(std::vector<Stance>{}, std::vector<Stance>{}), std::invalid_argument);
  }

  TEST_CASE("accuracy is invariant under paired shuffles") {
    std::mt19937_64 rng(1);
    std::vector<Stance> p(50);
    std::vector<Stance> g(50);
    for (std::size_t i = 0; i < 50; ++i) {
      p[i] = rng() % 2 ? Stance::True : Stance::False;
      g[i] = rng() % 2 ? Stance::True : Stance::False;
    }
    const double before = accuracy(p, g);
    std::vector<std::size_t> order(50);
    for (std::size_t i = 0; i < 50; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Stance> ps;
    std::vector<Stance> gs;
    for (auto i : order) {
      ps.push_back(p[i]);
      gs.push_back(g[i]);
    }
    CHECK(accuracy(ps, gs) == before);
  }

  TEST_CASE("evidence quality examples") {
    const std::vector<Refs> gold{{{"a", 0}, {"a", 1}}, {{"b", 0}, {"b", 2}}};
    const std::vector<Refs> half{{{"a", 1}, {"c", 0}}, {{"b", 1}}};
    const auto q = evidence_quality(half, gold);
    CHECK(q.evidence_ratio == 0.25);
    CHECK(q.claim_ratio == 0.5);
    CHECK(q.gold_total == 4);
    CHECK(q.gold_hits == 1);

    const std::vector<Refs> superset{{{"a", 0}, {"a", 1}, {"z", 3}}, {{"b", 2}, {"b", 0}}};
    const auto full = evidence_quality(superset, gold);
    CHECK(full.evidence_ratio == 1.0);
    CHECK(full.claim_ratio == 1.0);
  }

  TEST_CASE("titles are compared after normalization") {
    const std::vector<Refs> gold{{{"Lake_Morrow", 0}}};
    const std::vector<Refs> got{{{"lake morrow", 0}}};
    CHECK(evidence_quality(got, gold).evidence_ratio == 1.0);
  }

  TEST_CASE("claims without gold evidence are excluded") {
    const std::vector<Refs> gold{{{"a", 0}}, {}};
    const std::vector<Refs> got{{{"a", 0}}, {{"x", 0}}};
    const auto q = evidence_quality(got, gold);
    CHECK(q.claims == 1);
    CHECK(q.claim_ratio == 1.0);

    const std::vector<Refs> none{{}, {}};
    const auto z = evidence_quality(got, none);
    CHECK(z.claims == 0);
    CHECK(z.evidence_ratio == 0.0);
    CHECK(z.claim_ratio == 0.0);
    CHECK_THROWS_AS(evidence_quality(got, std::vector<Refs>{{}}), std::invalid_argument);
  }

  TEST_CASE("adding a retrieved gold paragraph never lowers either ratio") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Refs> gold(5);
      std::vector<Refs> got(5);
      for (std::size_t c = 0; c < 5; ++c) {
        const auto n_gold = static_cast<std::uint32_t>(rng() % 4);
        const auto n_got = static_cast<std::uint32_t>(rng() % 4);
        for (std::uint32_t i = 0; i < n_gold; ++i) gold[c].push_back({"p" + std::to_string(c), i});
        for (std::uint32_t i = 0; i < n_got; ++i) {
          got[c].push_back({"p" + std::to_string(c), static_cast<std::uint32_t>(rng() % 5)});
        }
      }
      const auto before = evidence_quality(got, gold);
      const std::size_t c = rng() % 5;
      if (gold[c].empty()) continue;
      got[c].push_back(gold[c][rng() % gold[c].size()]);
      const auto after = evidence_quality(got, gold);
      CHECK(after.evidence_ratio >= before.evidence_ratio);
      CHECK(after.claim_ratio >= before.claim_ratio);
    }
  }
}
