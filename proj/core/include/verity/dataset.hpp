#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "verity/error.hpp"
#include "verity/types.hpp"

namespace verity {

enum class DatasetFormat { Hover, Feverous };

std::optional<DatasetFormat> parse_dataset_format(std::string_view text) noexcept;

struct LabeledClaim {
  Claim claim;
  Stance gold = Stance::False;
  std::vector<EvidenceRef> gold_evidence;  // normalized titles, unique, in file order
  std::optional<int> hops;
};

struct DatasetLoad {
  std::vector<LabeledClaim> claims;
  std::size_t skipped_label = 0;     // label outside the two-way scheme
  std::size_t skipped_no_text = 0;   // FEVEROUS rows without sentence evidence
};

/// Reads a dataset in its native layout (see docs/datasets.md).
///
/// HOVER: a JSON array (or JSON Lines) of {"uid", "claim", "label",
/// "supporting_facts": [[title, sentence_id], ...], "num_hops"?}; SUPPORTED
/// maps to true and NOT_SUPPORTED to false.
/// FEVEROUS: JSON Lines of {"id", "claim", "label", "evidence": [{"content":
/// ["<title>_sentence_<n>", ...]}]}; SUPPORTS maps to true and REFUTES to
/// false. Only sentence evidence is kept; rows without any are skipped.
///
/// Evidence ids become paragraph indices, so the corpus must be segmented
/// at the dataset's evidence granularity. Throws FormatError naming the
/// offending line or record.
DatasetLoad read_dataset(std::istream& in, DatasetFormat format);
DatasetLoad load_dataset(const std::filesystem::path& path, DatasetFormat format);

}  // namespace verity
