#include "verity/dataset.hpp"

#include <fstream>
#include <istream>
#include <iterator>
#include <set>
#include <string>

#include <spdlog/spdlog.h>

#include "json.hpp"

#include "verity/corpus.hpp"
#include "verity/text.hpp"

namespace verity {
namespace {

using nlohmann::json;

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw FormatError("id must be a string or an integer");
}

void add_ref(LabeledClaim& c, std::set<EvidenceRef>& seen, std::string_view title, long long index) {
  if (index < 0) throw FormatError("negative evidence index");
  EvidenceRef ref{normalize_title(title), static_cast<std::uint32_t>(index)};
  if (ref.page_title.empty()) throw FormatError("empty evidence title");
  if (seen.insert(ref).second) c.gold_evidence.push_back(std::move(ref));
}

// Returns false when the row is skipped.
bool parse_hover(const json& row, LabeledClaim& out, DatasetLoad& load) {
  const auto label = row.at("label").get<std::string>();
  if (label == "SUPPORTED") {
    out.gold = Stance::True;
  } else if (label == "NOT_SUPPORTED") {
    out.gold = Stance::False;
  } else {
    ++load.skipped_label;
    return false;
  }
  out.claim.id = id_string(row.at("uid"));
  out.claim.text = row.at("claim").get<std::string>();
  std::set<EvidenceRef> seen;
  if (row.contains("supporting_facts")) {
    for (const auto& fact : row.at("supporting_facts")) {
      add_ref(out, seen, fact.at(0).get<std::string>(), fact.at(1).get<long long>());
    }
  }
  if (row.contains("num_hops") && row.at("num_hops").is_number_integer()) out.hops = row.at("num_hops").get<int>();
  return true;
}

bool parse_feverous(const json& row, LabeledClaim& out, DatasetLoad& load) {
  const auto label = row.value("label", std::string{});
  const auto claim = row.value("claim", std::string{});
  if (label.empty() && claim.empty()) return false;  // header row of the native files
  if (label == "SUPPORTS") {
    out.gold = Stance::True;
  } else if (label == "REFUTES") {
    out.gold = Stance::False;
  } else {
    ++load.skipped_label;
    return false;
  }
  out.claim.id = id_string(row.at("id"));
  out.claim.text = claim;
  std::set<EvidenceRef> seen;
  constexpr std::string_view kSentence = "_sentence_";
  for (const auto& set : row.at("evidence")) {
    for (const auto& item : set.at("content")) {
      const auto id = item.get<std::string>();
      const auto at = id.rfind(kSentence);
      if (at == std::string::npos) continue;
      const auto digits = id.substr(at + kSentence.size());
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) continue;
      add_ref(out, seen, std::string_view(id).substr(0, at), std::stoll(digits));
    }
  }
  if (out.gold_evidence.empty()) {
    ++load.skipped_no_text;
    return false;
  }
  return true;
}

void parse_row(const json& row, DatasetFormat format, DatasetLoad& load, const std::string& where) {
  try {
    if (!row.is_object()) throw FormatError("expected a JSON object");
    LabeledClaim c;
    const bool keep = format == DatasetFormat::Hover ? parse_hover(row, c, load) : parse_feverous(row, c, load);
    if (!keep) return;
    if (trim(c.claim.text).empty()) throw FormatError("empty claim text");
    load.claims.push_back(std::move(c));
  } catch (const json::exception& e) {
    throw FormatError("dataset: " + where + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError("dataset: " + where + ": " + e.what());
  }
}

}  // namespace

std::optional<DatasetFormat> parse_dataset_format(std::string_view text) noexcept {
  if (text == "hover") return DatasetFormat::Hover;
  if (text == "feverous") return DatasetFormat::Feverous;
  return std::nullopt;
}

DatasetLoad read_dataset(std::istream& in, DatasetFormat format) {
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  DatasetLoad load;
  const auto body = trim(content);
  if (body.empty()) return load;

  if (body.front() == '[') {
    json rows = json::parse(body, nullptr, false);
    if (!rows.is_array()) throw FormatError("dataset: top-level JSON array is malformed");
    for (std::size_t i = 0; i < rows.size(); ++i) parse_row(rows[i], format, load, "record " + std::to_string(i + 1));
  } else {
    std::size_t line_no = 0;
    for (auto line : split_lines(content)) {
      ++line_no;
      if (trim(line).empty()) continue;
      json row = json::parse(line, nullptr, false);
      if (row.is_discarded()) throw FormatError("dataset: line " + std::to_string(line_no) + ": invalid JSON");
      parse_row(row, format, load, "line " + std::to_string(line_no));
    }
  }
  if (load.skipped_label + load.skipped_no_text > 0) {
    spdlog::info("dataset: skipped {} rows with other labels and {} rows without text evidence", load.skipped_label,
                 load.skipped_no_text);
  }
  return load;
}

DatasetLoad load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("dataset: cannot open " + path.string());
  return read_dataset(in, format);
}

}  // namespace verity
