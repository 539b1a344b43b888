#include "verity/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

#include "verity/prompts.hpp"
#include "verity/text.hpp"

namespace verity {
namespace {

EvidenceSet gold_evidence_set(std::span<const EvidenceRef> refs, const CorpusStore& store) {
  EvidenceBlock block;
  for (const auto& ref : refs) {
    const Page* page = store.find(ref.page_title);
    const Paragraph* paragraph = store.find(EvidenceRef{normalize_title(ref.page_title), ref.paragraph_index});
    if (page == nullptr || paragraph == nullptr) {
      spdlog::warn("pipeline: gold evidence ({}, {}) is not in the corpus", ref.page_title, ref.paragraph_index);
      continue;
    }
    block.paragraphs.push_back(EvidenceParagraph{EvidenceRef{page->title, paragraph->index}, page->display_title,
                                                 page->url, paragraph->text});
  }
  std::vector<EvidenceBlock> blocks;
  blocks.push_back(std::move(block));
  return EvidenceSet(std::move(blocks));
}

EvidenceSet open_evidence(const Claim& claim, const RunConfig& config, const PipelineDeps& deps,
                          ClaimRecord& record) {
  const auto& flags = config.flags;
  SelectionParams selection = config.selection;
  if (!flags.evidence_selection) selection.summary_paragraphs = 0;

  if (flags.entity_retrieval) {
    auto resolution = resolve_entities(claim, *deps.llm, *deps.store, *deps.index, flags.ambiguity_elimination,
                                       config.disambiguation);
    record.plan = std::move(resolution.plan);
    record.entities = resolution.entities.names();
    return gather_evidence(record.entities, *deps.store, claim.text, selection, *deps.index);
  }

  // Without entity retrieval the claim, extended with any resolved answers,
  // queries the whole corpus.
  std::string query = claim.text;
  if (flags.ambiguity_elimination) {
    record.plan = generate_plan(claim, *deps.llm, config.disambiguation);
    auto answers = execute_plan(record.plan, *deps.llm, *deps.store, *deps.index, config.disambiguation);
    for (const auto& a : answers) {
      query += ' ';
      query += a;
    }
    record.entities = std::move(answers);
  }
  return retrieve_global(query, config.global_k, *deps.store, *deps.index);
}

}  // namespace

std::string_view to_string(Setting s) noexcept { return s == Setting::Gold ? "gold" : "open"; }

std::optional<Setting> parse_setting(std::string_view text) noexcept {
  if (text == "gold") return Setting::Gold;
  if (text == "open") return Setting::Open;
  return std::nullopt;
}

void check_dependencies(const RunConfig& config, const PipelineDeps& deps) {
  const auto& f = config.flags;
  if (!f.llm_reasoning && !f.slm_judge) {
    throw std::invalid_argument("pipeline: LLM reasoning and the judge cannot both be disabled");
  }
  if (deps.store == nullptr) throw std::invalid_argument("pipeline: missing dependency: corpus store");
  const bool open = config.setting == Setting::Open;
  if (open && deps.index == nullptr) throw std::invalid_argument("pipeline: missing dependency: bm25 index");
  const bool needs_llm = f.llm_reasoning || (open && (f.entity_retrieval || f.ambiguity_elimination));
  if (needs_llm && deps.llm == nullptr) throw std::invalid_argument("pipeline: missing dependency: language model");
  if (f.slm_judge) {
    if (deps.judge == nullptr) throw std::invalid_argument("pipeline: missing dependency: judge model");
    if (deps.provider == nullptr) throw std::invalid_argument("pipeline: missing dependency: embedding provider");
    if (deps.provider->dimension() != deps.judge->input_dim()) {
      throw std::invalid_argument("pipeline: embedding dimension does not match the judge model");
    }
  }
  if (config.selection.per_entity < config.selection.summary_paragraphs) {
    throw std::invalid_argument("pipeline: per-entity budget is smaller than the summary size");
  }
}

ClaimRecord verify_claim(const Claim& claim, std::span<const EvidenceRef> gold_evidence, const RunConfig& config,
                         const PipelineDeps& deps) {
  ClaimRecord record;
  record.claim = claim;
  record.gold_evidence.assign(gold_evidence.begin(), gold_evidence.end());

  const EvidenceSet evidence = config.setting == Setting::Gold ? gold_evidence_set(gold_evidence, *deps.store)
                                                               : open_evidence(claim, config, deps, record);
  record.evidence = evidence.refs();

  RationalePair pair;
  if (config.flags.llm_reasoning) {
    pair = reason(claim, evidence, *deps.llm, config.reasoning);
  } else {
    std::string raw(trim(prompts::format_evidence(evidence.paragraphs())));
    pair.r_true = Rationale{Stance::True, raw, claim.id};
    pair.r_false = Rationale{Stance::False, raw, claim.id};
    pair.y_llm = Stance::False;
  }

  if (config.flags.slm_judge) {
    record.verdict = predict(*deps.judge, claim, pair, *deps.provider, evidence.sources());
  } else {
    Probabilities one_hot{0.0, 0.0};
    one_hot[label_index(pair.y_llm)] = 1.0;
    record.verdict = make_verdict(one_hot, pair, evidence.sources());
  }
  record.rationales = std::move(pair);
  record.ok = true;
  return record;
}

RunSummary summarize(std::span<const ClaimRecord> records) {
  RunSummary s;
  s.claims = records.size();
  std::vector<std::vector<EvidenceRef>> retrieved;
  std::vector<std::vector<EvidenceRef>> gold;
  for (const auto& r : records) {
    if (!r.ok) ++s.failed;
    if (r.ok && r.gold && r.verdict.label == *r.gold) ++s.correct;
    retrieved.push_back(r.ok ? r.evidence : std::vector<EvidenceRef>{});
    gold.push_back(r.gold_evidence);
  }
  if (s.claims > 0) s.accuracy = static_cast<double>(s.correct) / static_cast<double>(s.claims);
  s.evidence = evidence_quality(retrieved, gold);
  return s;
}

RunReport run_pipeline(std::span<const LabeledClaim> claims, const RunConfig& config, const PipelineDeps& deps) {
  check_dependencies(config, deps);
  const auto start = std::chrono::steady_clock::now();

  RunReport report;
  report.setting = config.setting;
  report.flags = config.flags;
  report.records.resize(claims.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < claims.size(); i = next.fetch_add(1)) {
      const auto& item = claims[i];
      try {
        report.records[i] = verify_claim(item.claim, item.gold_evidence, config, deps);
      } catch (const std::exception& e) {
        spdlog::error("pipeline: claim '{}' failed: {}", item.claim.id, e.what());
        ClaimRecord failed;
        failed.claim = item.claim;
        failed.gold_evidence = item.gold_evidence;
        failed.error = e.what();
        report.records[i] = std::move(failed);
      }
      report.records[i].gold = item.gold;
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(config.concurrency, 1, std::max<std::size_t>(1, claims.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  report.summary = summarize(report.records);
  report.elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return report;
}

std::vector<JudgeExample> judge_examples(const RunReport& report) {
  std::vector<JudgeExample> out;
  for (const auto& r : report.records) {
    if (!r.ok || !r.gold || !r.rationales) continue;
    out.push_back(JudgeExample{r.claim, *r.rationales, *r.gold});
  }
  return out;
}

}  // namespace verity
