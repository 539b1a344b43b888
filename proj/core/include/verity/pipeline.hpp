#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "verity/corpus.hpp"
#include "verity/dataset.hpp"
#include "verity/disambiguation.hpp"
#include "verity/embedding.hpp"
#include "verity/judge.hpp"
#include "verity/llm.hpp"
#include "verity/metrics.hpp"
#include "verity/reasoning.hpp"
#include "verity/retrieval.hpp"

namespace verity {

enum class Setting { Gold, Open };

std::string_view to_string(Setting s) noexcept;
std::optional<Setting> parse_setting(std::string_view text) noexcept;

/// Stage toggles; all on is the full system.
struct AblationFlags {
  bool ambiguity_elimination = true;  // AE: plan questions for indirect references
  bool entity_retrieval = true;       // ER: per-entity page lookup (off: corpus-wide BM25 on the claim)
  bool evidence_selection = true;     // ERS: keep leading summary paragraphs (off: BM25 only)
  bool llm_reasoning = true;          // LLM: rationales + preliminary label (off: raw evidence to the judge)
  bool slm_judge = true;              // SLM: judge head (off: the preliminary label is final)
};

struct RunConfig {
  Setting setting = Setting::Open;
  AblationFlags flags;
  SelectionParams selection;
  std::size_t global_k = 10;  // paragraphs retrieved when entity retrieval is off
  DisambiguationOptions disambiguation;
  ReasoningOptions reasoning;
  std::uint64_t seed = 0;
  std::size_t concurrency = 1;  // claims in flight
};

/// Borrowed collaborators. Which ones are required depends on the config;
/// see check_dependencies.
struct PipelineDeps {
  const CorpusStore* store = nullptr;
  const Bm25Index* index = nullptr;
  LanguageModel* llm = nullptr;
  const JudgeModel* judge = nullptr;
  const EmbeddingProvider* provider = nullptr;
};

/// Throws std::invalid_argument naming the first missing dependency or an
/// unsupported flag combination.
void check_dependencies(const RunConfig& config, const PipelineDeps& deps);

/// Everything recorded about one claim.
struct ClaimRecord {
  Claim claim;
  std::optional<Stance> gold;
  std::vector<EvidenceRef> gold_evidence;
  bool ok = false;
  std::string error;
  std::vector<std::string> entities;
  DisambiguationPlan plan;
  std::vector<EvidenceRef> evidence;
  std::optional<RationalePair> rationales;
  Verdict verdict;
};

struct RunSummary {
  std::size_t claims = 0;
  std::size_t failed = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;  // correct / claims; failed claims count as wrong
  EvidenceQuality evidence;
};

struct RunReport {
  Setting setting = Setting::Open;
  AblationFlags flags;
  std::vector<ClaimRecord> records;  // input order
  RunSummary summary;
  std::chrono::milliseconds elapsed{0};  // not serialized
};

/// Runs every stage for one claim. `gold_evidence` is the evidence used in the
/// gold setting. Errors propagate to the caller.
ClaimRecord verify_claim(const Claim& claim, std::span<const EvidenceRef> gold_evidence, const RunConfig& config,
                         const PipelineDeps& deps);

/// verify_claim over a dataset with per-claim failure isolation, then metrics.
/// With a replay cache and fixed seed the report is a pure function of the
/// inputs regardless of `concurrency`.
RunReport run_pipeline(std::span<const LabeledClaim> claims, const RunConfig& config, const PipelineDeps& deps);

RunSummary summarize(std::span<const ClaimRecord> records);

/// Training examples from successful records that have gold labels and rationales.
std::vector<JudgeExample> judge_examples(const RunReport& report);

}  // namespace verity
