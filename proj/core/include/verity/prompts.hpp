#pragma once

#include <array>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "verity/retrieval.hpp"

/// Versioned prompt templates. Bracketed tokens are placeholders filled by
/// prompts::fill. docs/prompts.md documents every template and its expected
/// reply grammar; bump the template id whenever the text changes, since the
/// id is part of every replay-cache key.
namespace verity::prompts {

// Conflicting-perspective rationale for one stance.
inline constexpr std::string_view kRationaleId = "rationale.v1";
inline constexpr std::string_view kRationaleTemplate =
    "Analyze why the following claim [C] is [y_p] based on the given evidence [E]. Provide a clear and detailed "
    "explanation that focuses on: Direct evidence analysis; Semantic features and relationships; Linguistic patterns "
    "and connections; Logical reasoning strictly from the evidence.";
inline constexpr std::array<std::string_view, 4> kDefaultAspects = {
    "Direct evidence analysis", "Semantic features and relationships", "Linguistic patterns and connections",
    "Logical reasoning strictly from the evidence"};

// Preliminary judgment between the two rationales.
inline constexpr std::string_view kJudgmentId = "judgment.v1";
inline constexpr std::string_view kJudgmentTemplate =
    "Given claim [C] and the following two claim rationales: (1) true:[r_true];(2) false:[r_false], is this claim "
    "true or false?";

// Ambiguity-elimination plan. Reply grammar: NO_AMBIGUITY, or lines "STEP <i>: <question>".
inline constexpr std::string_view kPlanId = "plan.v1";
inline constexpr std::string_view kPlanTemplate =
    "You resolve indirect references in a claim before evidence retrieval.\n"
    "Claim: [C]\n"
    "If every entity in the claim is named explicitly, reply with the single line NO_AMBIGUITY.\n"
    "Otherwise reply with a plan of questions, one per line, in the form\n"
    "STEP <i>: <question>\n"
    "Number the steps 1, 2, 3 and so on. Each question must identify one entity that the claim only describes. "
    "A question may use the answer of an earlier step i by writing {A<i>}.";

// Answer for one plan step. Reply: the entity name on the first line.
inline constexpr std::string_view kAnswerId = "answer.v1";
inline constexpr std::string_view kAnswerTemplate =
    "Answer the question using the context. Reply with the name of the entity only, on a single line.\n"
    "Context: [E]\n"
    "Question: [Q]";

// Explicit entities. Reply grammar: "ENTITIES: e1 | e2 | ...".
inline constexpr std::string_view kEntitiesId = "entities.v1";
inline constexpr std::string_view kEntitiesTemplate =
    "List every entity that is named explicitly in the claim.\n"
    "Claim: [C]\n"
    "Reply with a single line of the form\n"
    "ENTITIES: <entity 1> | <entity 2> | ...";

/// Appended to a prompt when its first reply could not be parsed.
inline constexpr std::string_view kFormatReminder = "\nReply strictly in the required format.";

/// Placeholder shown for an empty evidence list.
inline constexpr std::string_view kNoEvidence = "(no evidence retrieved)";

/// Substitutes placeholders in one left-to-right pass. Substituted text is
/// never rescanned.
std::string fill(std::string_view tmpl, std::initializer_list<std::pair<std::string_view, std::string_view>> values);

/// "\n1. <text> (source: <title>)\n2. ...\n", or kNoEvidence when empty.
std::string format_evidence(std::span<const EvidenceParagraph> paragraphs);

/// The rationale template with its aspect list replaced by `aspects`, joined
/// with "; ". With the default aspects this returns kRationaleTemplate.
std::string rationale_template(std::span<const std::string> aspects);

}  // namespace verity::prompts
