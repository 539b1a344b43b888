#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "verity/corpus.hpp"
#include "verity/llm.hpp"
#include "verity/retrieval.hpp"
#include "verity/types.hpp"

namespace verity {

/// One step of an ambiguity-elimination plan. `question` may reference the
/// answer of an earlier step i as `{A<i>}` (1-based).
struct PlanStep {
  std::string question;
  std::string resolved_question;      // question with earlier answers substituted
  std::optional<std::string> answer;  // set during execution; empty string on failure

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

/// Steps run strictly in list order.
struct DisambiguationPlan {
  std::vector<PlanStep> steps;

  bool empty() const noexcept { return steps.empty(); }
  friend bool operator==(const DisambiguationPlan&, const DisambiguationPlan&) = default;
};

/// Ordered entity names, unique under normalize_title. Insertion order is kept.
class EntitySet {
 public:
  EntitySet() = default;
  EntitySet(std::initializer_list<std::string> names);

  /// Returns false when the name is empty after normalization or already present.
  bool add(std::string_view name);

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }
  auto begin() const noexcept { return names_.begin(); }
  auto end() const noexcept { return names_.end(); }

  friend bool operator==(const EntitySet&, const EntitySet&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::string> keys_;
};

/// Parses a plan reply. Accepts either a NO_AMBIGUITY line (empty plan) or
/// `STEP <i>: <question>` lines numbered 1..n in order whose placeholders only
/// point backwards. Other lines are ignored as prose. Returns nullopt when the
/// reply does not fit the grammar.
std::optional<DisambiguationPlan> parse_plan(std::string_view reply);

/// Parses the first `ENTITIES:` line into deduplicated names.
std::optional<EntitySet> parse_entities(std::string_view reply);

/// First non-empty line, without an "Answer:" prefix or a trailing period.
std::string parse_answer(std::string_view reply);

/// Substitutes `{A<i>}` with the answers of earlier steps. Placeholders whose
/// answer is missing or empty are left as they are.
std::string materialize_question(std::string_view question, std::span<const PlanStep> earlier);

struct DisambiguationOptions {
  Decoding decoding;
  std::size_t context_paragraphs = 3;
};

/// Asks the model for a plan. One retry with a format reminder, then an empty
/// plan. Throws CacheMiss; BackendUnavailable degrades to an empty plan.
DisambiguationPlan generate_plan(const Claim& claim, LanguageModel& llm, const DisambiguationOptions& options = {});

/// Runs the steps in order and fills in their answers. Each step sees the
/// top-ranked corpus paragraphs for its resolved question. Returns the
/// non-empty answers in step order.
std::vector<std::string> execute_plan(DisambiguationPlan& plan, LanguageModel& llm, const CorpusStore& store,
                                      const Bm25Index& index, const DisambiguationOptions& options = {});

/// Entities named explicitly in the claim. One retry, then an empty set.
EntitySet extract_entities(const Claim& claim, LanguageModel& llm, const DisambiguationOptions& options = {});

/// Everything produced while resolving a claim's entities.
struct EntityResolution {
  DisambiguationPlan plan;
  EntitySet explicit_entities;
  std::vector<std::string> answers;
  EntitySet entities;  // explicit first, then resolved answers
};

/// Explicit entities merged with the answers of the ambiguity-elimination
/// plan. With `eliminate_ambiguity` false no plan is generated.
EntityResolution resolve_entities(const Claim& claim, LanguageModel& llm, const CorpusStore& store,
                                  const Bm25Index& index, bool eliminate_ambiguity = true,
                                  const DisambiguationOptions& options = {});

}  // namespace verity
