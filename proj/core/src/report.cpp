#include "verity/report.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "verity/error.hpp"

namespace verity {
namespace {

using nlohmann::json;

json stance_or_null(const std::optional<Stance>& s) {
  return s ? json(std::string(to_string(*s))) : json(nullptr);
}

json record_json(const ClaimRecord& r) {
  json j;
  j["id"] = r.claim.id;
  j["claim"] = r.claim.text;
  j["gold"] = stance_or_null(r.gold);
  j["status"] = r.ok ? "ok" : "failed";
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["entities"] = r.entities;
  json plan = json::array();
  for (const auto& step : r.plan.steps) {
    plan.push_back({{"question", step.question},
                    {"resolved", step.resolved_question},
                    {"answer", step.answer ? json(*step.answer) : json(nullptr)}});
  }
  j["plan"] = std::move(plan);
  json evidence = json::array();
  for (const auto& ref : r.evidence) evidence.push_back(json::array({ref.page_title, ref.paragraph_index}));
  j["evidence"] = std::move(evidence);
  if (r.rationales) {
    j["r_true"] = r.rationales->r_true.text;
    j["r_false"] = r.rationales->r_false.text;
    j["y_llm"] = to_string(r.rationales->y_llm);
    j["judgment_parse_failed"] = r.rationales->judgment_parse_failed;
  }
  j["label"] = to_string(r.verdict.label);
  j["p_ver"] = json::array({r.verdict.p_ver[kTrueLabel], r.verdict.p_ver[kFalseLabel]});
  j["explanation"] = r.verdict.explanation;
  json sources = json::array();
  for (const auto& s : r.verdict.sources) sources.push_back({{"title", s.title}, {"url", s.url}});
  j["sources"] = std::move(sources);
  if (r.gold) j["correct"] = r.verdict.label == *r.gold;
  return j;
}

json flags_json(const AblationFlags& f) {
  return {{"ambiguity_elimination", f.ambiguity_elimination},
          {"entity_retrieval", f.entity_retrieval},
          {"evidence_selection", f.evidence_selection},
          {"llm_reasoning", f.llm_reasoning},
          {"slm_judge", f.slm_judge}};
}

json summary_json(const RunReport& report) {
  const auto& s = report.summary;
  return {{"setting", to_string(report.setting)},
          {"flags", flags_json(report.flags)},
          {"claims", s.claims},
          {"failed", s.failed},
          {"correct", s.correct},
          {"accuracy", s.accuracy},
          {"evidence_ratio", s.evidence.evidence_ratio},
          {"claim_ratio", s.evidence.claim_ratio},
          {"evidence_claims", s.evidence.claims},
          {"gold_total", s.evidence.gold_total},
          {"gold_hits", s.evidence.gold_hits}};
}

std::string tsv_field(std::string s) {
  for (auto& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

void write_report_jsonl(std::ostream& out, const RunReport& report) {
  for (const auto& r : report.records) out << record_json(r).dump() << '\n';
  out << json{{"summary", summary_json(report)}}.dump() << '\n';
}

void write_report_tsv(std::ostream& out, const RunReport& report) {
  out << "id\tgold\tlabel\ty_llm\tp_true\tp_false\tstatus\tevidence\terror\n";
  for (const auto& r : report.records) {
    out << tsv_field(r.claim.id) << '\t' << (r.gold ? to_string(*r.gold) : "") << '\t';
    if (r.ok) {
      out << to_string(r.verdict.label) << '\t' << (r.rationales ? to_string(r.rationales->y_llm) : "") << '\t'
          << json(r.verdict.p_ver[kTrueLabel]).dump() << '\t' << json(r.verdict.p_ver[kFalseLabel]).dump() << '\t'
          << "ok\t" << r.evidence.size() << "\t\n";
    } else {
      out << "\t\t\t\tfailed\t0\t" << tsv_field(r.error) << '\n';
    }
  }
  const json summary = summary_json(report);
  for (const auto& [key, value] : summary.items()) {
    out << "#summary\t" << key << '\t' << value.dump() << '\n';
  }
}

void write_judge_examples(std::ostream& out, std::span<const JudgeExample> examples) {
  for (const auto& ex : examples) {
    json j{{"id", ex.claim.id},
           {"claim", ex.claim.text},
           {"r_true", ex.pair.r_true.text},
           {"r_false", ex.pair.r_false.text},
           {"y_llm", to_string(ex.pair.y_llm)},
           {"gold", to_string(ex.gold)}};
    out << j.dump() << '\n';
  }
}

std::vector<JudgeExample> read_judge_examples(std::istream& in) {
  std::vector<JudgeExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = "training data line " + std::to_string(line_no);
    json j = json::parse(line, nullptr, false);
    if (!j.is_object()) throw FormatError(where + ": invalid JSON");
    try {
      JudgeExample ex;
      ex.claim = Claim{j.at("id").get<std::string>(), j.at("claim").get<std::string>()};
      ex.pair.r_true = Rationale{Stance::True, j.at("r_true").get<std::string>(), ex.claim.id};
      ex.pair.r_false = Rationale{Stance::False, j.at("r_false").get<std::string>(), ex.claim.id};
      auto y = parse_stance(j.at("y_llm").get<std::string>());
      auto gold = parse_stance(j.at("gold").get<std::string>());
      if (!y || !gold) throw FormatError(where + ": labels must be true or false");
      ex.pair.y_llm = *y;
      ex.gold = *gold;
      out.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace verity
