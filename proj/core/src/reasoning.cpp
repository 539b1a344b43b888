#include "verity/reasoning.hpp"

#include <spdlog/spdlog.h>

#include "verity/text.hpp"

namespace verity {
namespace {

bool is_word_byte(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u == '_' || u >= 0x80;
}

Rationale generate_one(const Claim& claim, Stance stance, const EvidenceSet& evidence, LanguageModel& llm,
                       const ReasoningOptions& options) {
  const auto prompt = build_rationale_prompt(claim, stance, evidence, options);
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      auto reply = llm.complete(LlmRequest{std::string(prompts::kRationaleId), prompt, options.decoding});
      if (!trim(reply.text).empty()) return Rationale{stance, std::move(reply.text), claim.id};
      spdlog::warn("reasoning: empty {} rationale for '{}' (attempt {})", to_string(stance), claim.id, attempt + 1);
    } catch (const BackendUnavailable& e) {
      spdlog::warn("reasoning: {} rationale for '{}' failed (attempt {}): {}", to_string(stance), claim.id,
                   attempt + 1, e.what());
    }
  }
  return Rationale{stance, std::string(kNoRationale), claim.id};
}

}  // namespace

std::string build_rationale_prompt(const Claim& claim, Stance stance, const EvidenceSet& evidence,
                                   const ReasoningOptions& options) {
  const auto tmpl = prompts::rationale_template(options.aspects);
  const auto rendered = prompts::format_evidence(evidence.paragraphs());
  return prompts::fill(tmpl, {{"[C]", claim.text}, {"[y_p]", to_string(stance)}, {"[E]", rendered}});
}

std::string build_judgment_prompt(const Claim& claim, const Rationale& r_true, const Rationale& r_false) {
  return prompts::fill(prompts::kJudgmentTemplate,
                       {{"[C]", claim.text}, {"[r_true]", r_true.text}, {"[r_false]", r_false.text}});
}

std::pair<Rationale, Rationale> generate_rationales(const Claim& claim, const EvidenceSet& evidence, LanguageModel& llm,
                                                    const ReasoningOptions& options) {
  auto r_true = generate_one(claim, Stance::True, evidence, llm, options);
  auto r_false = generate_one(claim, Stance::False, evidence, llm, options);
  return {std::move(r_true), std::move(r_false)};
}

std::optional<Stance> parse_judgment(std::string_view reply) {
  const auto lowered = ascii_lower(reply);
  std::size_t pos = 0;
  while (pos < lowered.size()) {
    const auto t = lowered.find("true", pos);
    const auto f = lowered.find("false", pos);
    const auto at = std::min(t, f);
    if (at == std::string::npos) return std::nullopt;
    const std::size_t len = at == t ? 4 : 5;
    const bool left_ok = at == 0 || !is_word_byte(lowered[at - 1]);
    const bool right_ok = at + len >= lowered.size() || !is_word_byte(lowered[at + len]);
    if (left_ok && right_ok) return at == t ? Stance::True : Stance::False;
    pos = at + 1;
  }
  return std::nullopt;
}

Judgment preliminary_judgment(const Claim& claim, const Rationale& r_true, const Rationale& r_false,
                              LanguageModel& llm, const ReasoningOptions& options) {
  const auto prompt = build_judgment_prompt(claim, r_true, r_false);
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string text = attempt == 0 ? prompt : prompt + std::string(prompts::kFormatReminder);
    try {
      auto reply = llm.complete(LlmRequest{std::string(prompts::kJudgmentId), std::move(text), options.decoding});
      if (auto stance = parse_judgment(reply.text)) return Judgment{*stance, false};
      spdlog::warn("reasoning: judgment for '{}' has no stance word (attempt {})", claim.id, attempt + 1);
    } catch (const BackendUnavailable& e) {
      spdlog::warn("reasoning: judgment for '{}' failed (attempt {}): {}", claim.id, attempt + 1, e.what());
    }
  }
  return Judgment{Stance::False, true};
}

RationalePair reason(const Claim& claim, const EvidenceSet& evidence, LanguageModel& llm,
                     const ReasoningOptions& options) {
  auto [r_true, r_false] = generate_rationales(claim, evidence, llm, options);
  auto judgment = preliminary_judgment(claim, r_true, r_false, llm, options);
  return RationalePair{std::move(r_true), std::move(r_false), judgment.stance, judgment.parse_failed};
}

}  // namespace verity
