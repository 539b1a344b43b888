#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "verity/types.hpp"

namespace verity {

/// Trims, folds underscores to spaces, collapses whitespace runs and
/// lowercases ASCII. Idempotent. An empty result marks an unusable title.
std::string normalize_title(std::string_view raw);

struct Paragraph {
  std::string page_title;  // normalized
  std::uint32_t index = 0;
  std::string text;

  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

struct Page {
  std::string title;          // normalized key
  std::string display_title;  // as ingested
  std::string url;
  std::vector<Paragraph> paragraphs;  // index i at position i

  friend bool operator==(const Page&, const Page&) = default;
};

struct IngestStats {
  std::size_t pages = 0;
  std::size_t paragraphs = 0;
  std::size_t malformed = 0;           // unparseable or missing required fields
  std::size_t duplicate_titles = 0;    // later records with an already-seen title
  std::size_t dropped_paragraphs = 0;  // paragraphs with no tokens

  friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

/// Paragraph-segmented knowledge source. Immutable once built, so concurrent
/// reads are safe.
///
/// Source format is one JSON object per line:
///   {"title": "...", "url": "...", "paragraphs": ["...", ...]}
/// Blank lines are ignored. Records missing a usable title, a string url or a
/// string array of paragraphs are skipped and counted as malformed. When two
/// records normalize to the same title the first wins.
class CorpusStore {
 public:
  CorpusStore() = default;

  static CorpusStore ingest(std::istream& source);
  static CorpusStore ingest_file(const std::filesystem::path& path);

  /// Snapshots hold the normalized store plus its statistics and reload to an
  /// identical store.
  void write_snapshot(std::ostream& out) const;
  void save_snapshot(const std::filesystem::path& path) const;
  static CorpusStore read_snapshot(std::istream& in);
  static CorpusStore load_snapshot(const std::filesystem::path& path);

  /// Page whose normalized title equals normalize_title(entity), or nullptr.
  const Page* find(std::string_view entity) const;
  const Paragraph* find(const EvidenceRef& ref) const;

  /// Pages keyed by normalized title, in lexicographic order.
  const std::map<std::string, Page, std::less<>>& pages() const noexcept { return pages_; }

  /// Every paragraph, ordered by (normalized title, index).
  std::vector<Paragraph> all_paragraphs() const;

  const IngestStats& stats() const noexcept { return stats_; }
  std::size_t page_count() const noexcept { return stats_.pages; }
  std::size_t paragraph_count() const noexcept { return stats_.paragraphs; }

  friend bool operator==(const CorpusStore&, const CorpusStore&) = default;

 private:
  std::map<std::string, Page, std::less<>> pages_;
  IngestStats stats_;
};

/// Free-function form of CorpusStore::find. Absence is a value, not an error.
inline const Page* lookup_page(const CorpusStore& store, std::string_view entity) {
  return store.find(entity);
}

}  // namespace verity
