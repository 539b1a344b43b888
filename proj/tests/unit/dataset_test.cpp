#include "doctest.h"

#include <sstream>

#include "fixture_world.hpp"
#include "verity/dataset.hpp"

using namespace verity;

namespace {

const std::filesystem::path kDir = test::fixture_dir() / "datasets";

DatasetLoad read_text(const std::string& text, DatasetFormat format) {
  std::istringstream in(text);
  return read_dataset(in, format);
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("format names") {
    CHECK(parse_dataset_format("hover") == DatasetFormat::Hover);
    CHECK(parse_dataset_format("feverous") == DatasetFormat::Feverous);
    CHECK_FALSE(parse_dataset_format("HOVER"));
  }

  TEST_CASE("HOVER fixture with four rows") {
    const auto load = load_dataset(kDir / "hover_four.json", DatasetFormat::Hover);
    REQUIRE(load.claims.size() == 4);
    std::size_t t = 0;
    for (const auto& c : load.claims) t += c.gold == Stance::True;
    CHECK(t == 2);
    CHECK(load.claims.size() - t == 2);

    const auto& h1 = load.claims[0];
    CHECK(h1.claim.id == "h1");
    CHECK(h1.gold_evidence == std::vector<EvidenceRef>{{"lake morrow", 0}, {"kaltberg", 1}});
    CHECK(h1.hops == 2);
    CHECK(load.claims[1].gold_evidence == std::vector<EvidenceRef>{{"ider", 0}});
    CHECK_FALSE(load.claims[2].hops);
    CHECK(load.claims[3].claim.id == "4");
    CHECK(load.claims[3].gold_evidence.empty());
  }

  TEST_CASE("JSON Lines and array layouts give the same claims") {
    const auto array = read_text(R"([{"uid":"a","claim":"x","label":"SUPPORTED","supporting_facts":[["P",1]]}])",
                                 DatasetFormat::Hover);
    const auto lines = read_text("{\"uid\":\"a\",\"claim\":\"x\",\"label\":\"SUPPORTED\",\"supporting_facts\":[[\"P\",1]]}\n\n",
                                 DatasetFormat::Hover);
    REQUIRE(array.claims.size() == 1);
    REQUIRE(lines.claims.size() == 1);
    CHECK(array.claims[0].claim.text == lines.claims[0].claim.text);
    CHECK(array.claims[0].gold_evidence == lines.claims[0].gold_evidence);
  }

  TEST_CASE("FEVEROUS keeps sentence evidence and skips other rows") {
    const auto load = load_dataset(kDir / "feverous_mixed.jsonl", DatasetFormat::Feverous);
    REQUIRE(load.claims.size() == 2);
    CHECK(load.skipped_label == 1);
    CHECK(load.skipped_no_text == 1);
    CHECK(load.claims[0].claim.id == "101");
    CHECK(load.claims[0].gold == Stance::True);
    CHECK(load.claims[0].gold_evidence == std::vector<EvidenceRef>{{"lake morrow", 0}, {"kaltberg", 2}});
    CHECK(load.claims[1].gold == Stance::False);
    CHECK(load.claims[1].gold_evidence == std::vector<EvidenceRef>{{"ider", 1}, {"ider", 3}});
  }

  TEST_CASE("other HOVER labels are skipped and counted") {
    const auto load = read_text(R"([{"uid":"a","claim":"x","label":"NOT ENOUGH INFO"}])", DatasetFormat::Hover);
    CHECK(load.claims.empty());
    CHECK(load.skipped_label == 1);
  }

  TEST_CASE("empty input gives no claims") {
    CHECK(read_text("", DatasetFormat::Hover).claims.empty());
    CHECK(read_text(" \n\n", DatasetFormat::Feverous).claims.empty());
  }

  TEST_CASE("malformed input names the offending line") {
    try {
      read_text("{\"id\":1,\"claim\":\"x\",\"label\":\"SUPPORTS\",\"evidence\":[]}\n{broken\n", DatasetFormat::Feverous);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(read_text(R"([{"uid":"a","label":"SUPPORTED"}])", DatasetFormat::Hover), FormatError);
    CHECK_THROWS_AS(read_text(R"([{"uid":"a","claim":"  ","label":"SUPPORTED"}])", DatasetFormat::Hover), FormatError);
    CHECK_THROWS_AS(read_text(R"([{"uid":"a","claim":"x","label":"SUPPORTED","supporting_facts":[["P",-1]]}])",
                              DatasetFormat::Hover),
                    FormatError);
    CHECK_THROWS_AS(read_text("[1,", DatasetFormat::Hover), FormatError);
    CHECK_THROWS_AS(load_dataset(kDir / "missing.json", DatasetFormat::Hover), IoError);
  }

  TEST_CASE("the world claims load completely") {
    const auto load = load_dataset(test::world_dir() / "claims.json", DatasetFormat::Hover);
    CHECK(load.claims.size() == 20);
    CHECK(load.skipped_label == 0);
  }
}
