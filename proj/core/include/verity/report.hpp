#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "verity/judge.hpp"
#include "verity/pipeline.hpp"

namespace verity {

/// One JSON object per claim followed by a {"summary": {...}} line.
void write_report_jsonl(std::ostream& out, const RunReport& report);

/// Header row, one row per claim, then "#summary" key/value rows.
void write_report_tsv(std::ostream& out, const RunReport& report);

/// Training data, one JSON object per line:
///   {"id", "claim", "r_true", "r_false", "y_llm", "gold"}
void write_judge_examples(std::ostream& out, std::span<const JudgeExample> examples);
std::vector<JudgeExample> read_judge_examples(std::istream& in);

}  // namespace verity
