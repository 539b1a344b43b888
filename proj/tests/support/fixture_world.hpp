#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "verity/corpus.hpp"
#include "verity/dataset.hpp"
#include "verity/embedding.hpp"
#include "verity/judge.hpp"
#include "verity/llm.hpp"
#include "verity/pipeline.hpp"
#include "verity/retrieval.hpp"

// The checked-in 20-claim world under tests/fixtures/world: corpus, HOVER
// dataset, hand-written model transcript and the artifacts derived from them.
namespace verity::test {

std::filesystem::path fixture_dir();
std::filesystem::path world_dir();

struct TranscriptEntry {
  std::string uid;
  std::string claim;
  std::vector<std::string> entities;
  std::vector<std::pair<std::string, std::string>> plan;  // (question, answer)
  std::string r_true;
  std::string r_false;
  std::string judgment;
};

std::vector<TranscriptEntry> load_transcript(const std::filesystem::path& transcript,
                                             const std::vector<LabeledClaim>& claims);

// Answers every prompt the pipeline sends by looking up the transcript.
// Prompts it cannot place are recorded and answered with an empty string.
class TranscriptBackend : public ChatBackend {
 public:
  explicit TranscriptBackend(std::vector<TranscriptEntry> entries);
  std::string send(const LlmRequest& request) override;
  const std::vector<std::string>& unknown() const noexcept { return unknown_; }

 private:
  const TranscriptEntry* by_claim(const std::string& prompt, std::string_view before, std::string_view after) const;

  std::vector<TranscriptEntry> entries_;
  std::vector<std::pair<std::string, std::string>> answers_;  // resolved question -> answer
  std::vector<std::string> unknown_;
};

struct World {
  CorpusStore store;
  Bm25Index index;
  std::vector<LabeledClaim> claims;
  std::vector<TranscriptEntry> transcript;
};

World load_world();

// Replay-only client over the checked-in cache.
std::unique_ptr<LlmClient> replay_client();

// Transcript entry for a claim id; throws when absent.
const TranscriptEntry& transcript_for(const World& world, std::string_view uid);

// Labeled claim for an id; throws when absent.
const LabeledClaim& claim_for(const World& world, std::string_view uid);

// Judge whose verdict is true exactly when the first-ranked rationale uses
// "corroborated" more often than "contradicted".
JudgeModel keyword_judge(const HashingProvider& provider);
// Every text the judge encodes in full-pipeline runs over the world.
std::vector<std::string> keyword_judge_inputs(const World& world);
// True when no feature other than the two keywords hashes to their buckets.
bool keyword_buckets_isolated(const HashingProvider& provider, const std::vector<std::string>& inputs);
// Smallest power of two from 1024 up with isolated keyword buckets.
std::size_t keyword_judge_dimension(const std::vector<std::string>& inputs);

// Replay client, keyword judge and its hashing provider, ready to run the
// full pipeline over the world.
struct KeywordRuntime {
  std::unique_ptr<LlmClient> llm;
  HashingProvider provider;
  JudgeModel judge;

  PipelineDeps deps(const World& world) const;
};

KeywordRuntime keyword_runtime();

struct NamedRun {
  std::string name;
  RunConfig config;
};

// Configurations whose model traffic the replay cache covers.
std::vector<NamedRun> recorded_runs();

// Writes llm_cache.jsonl, keyword_judge.json and judge_train.jsonl into
// `out_dir`. Throws if the transcript cannot answer a prompt.
void generate_fixtures(const World& world, const std::filesystem::path& out_dir);

}  // namespace verity::test
