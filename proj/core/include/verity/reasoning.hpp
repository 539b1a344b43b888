#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "verity/llm.hpp"
#include "verity/prompts.hpp"
#include "verity/retrieval.hpp"
#include "verity/types.hpp"

namespace verity {

/// Text stored when a rationale could not be generated.
inline constexpr std::string_view kNoRationale = "(no rationale produced)";

struct Rationale {
  Stance stance = Stance::False;
  std::string text;
  std::string source_claim_id;

  friend bool operator==(const Rationale&, const Rationale&) = default;
};

/// Both rationales plus the model's preliminary label.
struct RationalePair {
  Rationale r_true{Stance::True, {}, {}};
  Rationale r_false{Stance::False, {}, {}};
  Stance y_llm = Stance::False;
  bool judgment_parse_failed = false;

  const Rationale& for_stance(Stance s) const noexcept { return s == Stance::True ? r_true : r_false; }

  friend bool operator==(const RationalePair&, const RationalePair&) = default;
};

struct ReasoningOptions {
  Decoding decoding;
  /// Aspect list written into the rationale prompt.
  std::vector<std::string> aspects{prompts::kDefaultAspects.begin(), prompts::kDefaultAspects.end()};
};

/// Rationale prompt for `stance`. Pure function of its inputs.
std::string build_rationale_prompt(const Claim& claim, Stance stance, const EvidenceSet& evidence,
                                   const ReasoningOptions& options = {});

std::string build_judgment_prompt(const Claim& claim, const Rationale& r_true, const Rationale& r_false);

/// Two independent calls, one per stance. A stance whose call fails twice (or
/// returns only whitespace) gets kNoRationale. CacheMiss propagates.
std::pair<Rationale, Rationale> generate_rationales(const Claim& claim, const EvidenceSet& evidence, LanguageModel& llm,
                                                    const ReasoningOptions& options = {});

/// First whole-word, case-insensitive "true" or "false" in the reply.
std::optional<Stance> parse_judgment(std::string_view reply);

struct Judgment {
  Stance stance = Stance::False;
  bool parse_failed = false;
};

/// Preliminary label from the two rationales. Falls back to false (flagged)
/// when neither attempt yields a stance word.
Judgment preliminary_judgment(const Claim& claim, const Rationale& r_true, const Rationale& r_false,
                              LanguageModel& llm, const ReasoningOptions& options = {});

/// generate_rationales followed by preliminary_judgment.
RationalePair reason(const Claim& claim, const EvidenceSet& evidence, LanguageModel& llm,
                     const ReasoningOptions& options = {});

}  // namespace verity
