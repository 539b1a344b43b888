#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace verity {

/// Verdict polarity. `False < True` gives a deterministic iteration order.
enum class Stance : std::uint8_t { False = 0, True = 1 };

constexpr std::string_view to_string(Stance s) noexcept {
  return s == Stance::True ? "true" : "false";
}

constexpr Stance opposite(Stance s) noexcept {
  return s == Stance::True ? Stance::False : Stance::True;
}

/// Parses "true"/"false" (ASCII case-insensitive). Returns nullopt otherwise.
std::optional<Stance> parse_stance(std::string_view word) noexcept;

/// A statement to verify.
struct Claim {
  std::string id;
  std::string text;
};

/// Location of one evidence unit: a paragraph of a corpus page. `page_title`
/// is always the normalized title.
struct EvidenceRef {
  std::string page_title;
  std::uint32_t paragraph_index = 0;

  friend bool operator==(const EvidenceRef&, const EvidenceRef&) = default;
  friend auto operator<=>(const EvidenceRef&, const EvidenceRef&) = default;
};

/// A page reference attached to a verdict.
struct SourceLink {
  std::string title;
  std::string url;

  friend bool operator==(const SourceLink&, const SourceLink&) = default;
};

}  // namespace verity
