#include "verity/disambiguation.hpp"

#include <charconv>

#include <spdlog/spdlog.h>

#include "verity/prompts.hpp"
#include "verity/text.hpp"

namespace verity {
namespace {

constexpr std::string_view kNoAmbiguity = "NO_AMBIGUITY";
constexpr std::string_view kStepPrefix = "STEP";
constexpr std::string_view kEntitiesPrefix = "ENTITIES:";

struct Placeholder {
  std::size_t begin;
  std::size_t end;    // one past the closing brace
  std::size_t step;   // 1-based
};

std::vector<Placeholder> find_placeholders(std::string_view text) {
  std::vector<Placeholder> found;
  std::size_t pos = 0;
  while ((pos = text.find("{A", pos)) != std::string_view::npos) {
    std::size_t digits = pos + 2;
    std::size_t end = digits;
    while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
    if (end > digits && end < text.size() && text[end] == '}') {
      std::size_t step = 0;
      std::from_chars(text.data() + digits, text.data() + end, step);
      found.push_back({pos, end + 1, step});
      pos = end + 1;
    } else {
      pos += 2;
    }
  }
  return found;
}

// Parses "STEP <i>: <question>". Returns false when the line is not a step.
bool parse_step_line(std::string_view line, std::size_t& number, std::string& question) {
  if (!line.starts_with(kStepPrefix)) return false;
  auto rest = line.substr(kStepPrefix.size());
  if (rest.empty() || (rest.front() != ' ' && rest.front() != '\t')) return false;
  rest = trim(rest);
  std::size_t digits = 0;
  while (digits < rest.size() && rest[digits] >= '0' && rest[digits] <= '9') ++digits;
  if (digits == 0) return false;
  auto [_, ec] = std::from_chars(rest.data(), rest.data() + digits, number);
  if (ec != std::errc{}) return false;
  rest = trim(rest.substr(digits));
  if (rest.empty() || rest.front() != ':') return false;
  question = std::string(trim(rest.substr(1)));
  return !question.empty();
}

LlmRequest make_request(std::string_view template_id, std::string prompt, const Decoding& decoding) {
  return LlmRequest{std::string(template_id), std::move(prompt), decoding};
}

// Calls the model, retrying once with a format reminder when `parse` rejects
// the reply. BackendUnavailable counts as a rejected reply.
template <typename Parse>
auto ask_with_retry(LanguageModel& llm, std::string_view template_id, const std::string& prompt,
                    const Decoding& decoding, Parse parse) -> decltype(parse(std::string_view{})) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string text = attempt == 0 ? prompt : prompt + std::string(prompts::kFormatReminder);
    try {
      auto reply = llm.complete(make_request(template_id, std::move(text), decoding));
      if (auto parsed = parse(reply.text)) return parsed;
      spdlog::warn("disambiguation: unparseable '{}' reply (attempt {})", template_id, attempt + 1);
    } catch (const BackendUnavailable& e) {
      spdlog::warn("disambiguation: '{}' failed (attempt {}): {}", template_id, attempt + 1, e.what());
    }
  }
  return std::nullopt;
}

}  // namespace

EntitySet::EntitySet(std::initializer_list<std::string> names) {
  for (const auto& n : names) add(n);
}

bool EntitySet::add(std::string_view name) {
  auto display = std::string(trim(name));
  auto key = normalize_title(display);
  if (key.empty()) return false;
  for (const auto& k : keys_) {
    if (k == key) return false;
  }
  keys_.push_back(std::move(key));
  names_.push_back(std::move(display));
  return true;
}

std::optional<DisambiguationPlan> parse_plan(std::string_view reply) {
  DisambiguationPlan plan;
  bool sentinel = false;
  for (auto raw : split_lines(reply)) {
    auto line = trim(raw);
    if (line == kNoAmbiguity) {
      sentinel = true;
      continue;
    }
    std::size_t number = 0;
    std::string question;
    if (!parse_step_line(line, number, question)) continue;
    if (number != plan.steps.size() + 1) return std::nullopt;
    for (const auto& ph : find_placeholders(question)) {
      if (ph.step == 0 || ph.step >= number) return std::nullopt;
    }
    plan.steps.push_back(PlanStep{std::move(question), {}, std::nullopt});
  }
  if (sentinel && plan.steps.empty()) return plan;
  if (!sentinel && !plan.steps.empty()) return plan;
  return std::nullopt;
}

std::optional<EntitySet> parse_entities(std::string_view reply) {
  for (auto raw : split_lines(reply)) {
    auto line = trim(raw);
    if (!line.starts_with(kEntitiesPrefix)) continue;
    EntitySet set;
    auto rest = line.substr(kEntitiesPrefix.size());
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto bar = rest.find('|', start);
      auto end = bar == std::string_view::npos ? rest.size() : bar;
      set.add(rest.substr(start, end - start));
      if (bar == std::string_view::npos) break;
      start = bar + 1;
    }
    return set;
  }
  return std::nullopt;
}

std::string parse_answer(std::string_view reply) {
  for (auto raw : split_lines(reply)) {
    auto line = trim(raw);
    if (line.empty()) continue;
    if (line.size() >= 7 && ascii_lower(line.substr(0, 7)) == "answer:") line = trim(line.substr(7));
    while (!line.empty() && line.back() == '.') line.remove_suffix(1);
    return std::string(trim(line));
  }
  return {};
}

std::string materialize_question(std::string_view question, std::span<const PlanStep> earlier) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& ph : find_placeholders(question)) {
    out.append(question.substr(pos, ph.begin - pos));
    const bool usable = ph.step >= 1 && ph.step <= earlier.size() && earlier[ph.step - 1].answer.has_value() &&
                        !earlier[ph.step - 1].answer->empty();
    if (usable) {
      out.append(*earlier[ph.step - 1].answer);
    } else {
      spdlog::warn("disambiguation: no answer for placeholder {{A{}}}; leaving it in place", ph.step);
      out.append(question.substr(ph.begin, ph.end - ph.begin));
    }
    pos = ph.end;
  }
  out.append(question.substr(pos));
  return out;
}

DisambiguationPlan generate_plan(const Claim& claim, LanguageModel& llm, const DisambiguationOptions& options) {
  const auto prompt = prompts::fill(prompts::kPlanTemplate, {{"[C]", claim.text}});
  auto plan = ask_with_retry(llm, prompts::kPlanId, prompt, options.decoding, parse_plan);
  if (!plan) {
    spdlog::warn("disambiguation: no usable plan for claim '{}'; using explicit entities only", claim.id);
    return {};
  }
  return std::move(*plan);
}

std::vector<std::string> execute_plan(DisambiguationPlan& plan, LanguageModel& llm, const CorpusStore& store,
                                      const Bm25Index& index, const DisambiguationOptions& options) {
  std::vector<std::string> answers;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    auto& step = plan.steps[i];
    step.resolved_question = materialize_question(step.question, std::span(plan.steps).first(i));

    std::vector<EvidenceParagraph> context;
    for (const auto& hit : index.top_k(step.resolved_question, options.context_paragraphs)) {
      const auto& ref = index.ref(hit.pid);
      const Page* page = store.find(ref.page_title);
      const Paragraph* paragraph = store.find(ref);
      if (page == nullptr || paragraph == nullptr) continue;
      context.push_back(EvidenceParagraph{ref, page->display_title, page->url, paragraph->text});
    }

    const auto prompt = prompts::fill(prompts::kAnswerTemplate,
                                      {{"[E]", prompts::format_evidence(context)}, {"[Q]", step.resolved_question}});
    std::string answer;
    try {
      answer = parse_answer(llm.complete(make_request(prompts::kAnswerId, prompt, options.decoding)).text);
    } catch (const BackendUnavailable& e) {
      spdlog::warn("disambiguation: step {} failed: {}", i + 1, e.what());
    }
    if (answer.empty()) spdlog::warn("disambiguation: step {} produced no answer", i + 1);
    step.answer = answer;
    if (!answer.empty()) answers.push_back(std::move(answer));
  }
  return answers;
}

EntitySet extract_entities(const Claim& claim, LanguageModel& llm, const DisambiguationOptions& options) {
  const auto prompt = prompts::fill(prompts::kEntitiesTemplate, {{"[C]", claim.text}});
  auto entities = ask_with_retry(llm, prompts::kEntitiesId, prompt, options.decoding, parse_entities);
  if (!entities) {
    spdlog::warn("disambiguation: no usable entity list for claim '{}'", claim.id);
    return {};
  }
  return std::move(*entities);
}

EntityResolution resolve_entities(const Claim& claim, LanguageModel& llm, const CorpusStore& store,
                                  const Bm25Index& index, bool eliminate_ambiguity,
                                  const DisambiguationOptions& options) {
  EntityResolution out;
  out.explicit_entities = extract_entities(claim, llm, options);
  if (eliminate_ambiguity) {
    out.plan = generate_plan(claim, llm, options);
    out.answers = execute_plan(out.plan, llm, store, index, options);
  }
  for (const auto& e : out.explicit_entities) out.entities.add(e);
  for (const auto& a : out.answers) out.entities.add(a);
  return out;
}

}  // namespace verity
