#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "verity/corpus.hpp"
#include "verity/types.hpp"

namespace verity {

using ParagraphId = std::uint32_t;

/// Okapi BM25 parameters. Defaults follow the Anserini/Pyserini setup.
struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;

  friend bool operator==(const Bm25Params&, const Bm25Params&) = default;
};

struct Posting {
  ParagraphId pid = 0;
  std::uint32_t tf = 0;

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct ScoredParagraph {
  ParagraphId pid = 0;
  double score = 0.0;
};

/// Inverted index over corpus paragraphs with BM25 scoring.
///
///   score(q, d) = sum_{t in q} idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * |d| / avgdl))
///   idf(t)      = ln(1 + (N - df + 0.5) / (df + 0.5))
///
/// Query terms are summed with multiplicity. The index is immutable after
/// build; scoring and ranking are safe from many threads.
class Bm25Index {
 public:
  Bm25Index() = default;
  Bm25Index(const Bm25Index& other);
  Bm25Index& operator=(const Bm25Index& other);
  Bm25Index(Bm25Index&& other) noexcept;
  Bm25Index& operator=(Bm25Index&& other) noexcept;
  ~Bm25Index() = default;

  /// Paragraph i of the input gets id i. Throws std::invalid_argument when
  /// k1 < 0 or b is outside [0, 1].
  static Bm25Index build(std::span<const Paragraph> paragraphs, Bm25Params params = {});
  static Bm25Index build(const CorpusStore& store, Bm25Params params = {});

  /// Throws std::out_of_range for an unknown id.
  double score(std::span<const std::string> query_tokens, ParagraphId pid) const;

  /// Paragraphs with a positive score, best first; ties go to the lower id.
  std::vector<ScoredParagraph> top_k(std::string_view query, std::size_t k) const;
  std::vector<ScoredParagraph> top_k(std::string_view query, std::size_t k,
                                     std::span<const ParagraphId> restrict_to) const;

  std::optional<ParagraphId> id_of(const EvidenceRef& ref) const;
  const EvidenceRef& ref(ParagraphId pid) const { return refs_.at(pid); }

  std::size_t size() const noexcept { return lengths_.size(); }
  std::uint32_t length(ParagraphId pid) const { return lengths_.at(pid); }
  double average_length() const noexcept { return avgdl_; }
  const Bm25Params& params() const noexcept { return params_; }
  std::size_t vocabulary_size() const noexcept { return postings_.size(); }
  std::size_t document_frequency(std::string_view term) const;
  std::span<const Posting> postings(std::string_view term) const;

  /// Per-entity paragraph budget recorded alongside the index; callers use it
  /// when no budget is given explicitly.
  std::size_t default_per_entity() const noexcept { return per_entity_; }
  void set_default_per_entity(std::size_t m) noexcept { per_entity_ = m; }

  /// Number of score/top_k calls served so far. Instrumentation only.
  std::uint64_t query_count() const noexcept { return queries_.load(std::memory_order_relaxed); }

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static Bm25Index read(std::istream& in);
  static Bm25Index load(const std::filesystem::path& path);

  friend bool operator==(const Bm25Index& a, const Bm25Index& b);

 private:
  double idf(std::size_t df) const noexcept;
  double score_unchecked(std::span<const std::string> query_tokens, ParagraphId pid) const;
  void finalize();

  Bm25Params params_;
  std::map<std::string, std::vector<Posting>, std::less<>> postings_;
  std::vector<std::uint32_t> lengths_;
  std::vector<EvidenceRef> refs_;
  std::map<EvidenceRef, ParagraphId> ids_;
  double avgdl_ = 0.0;
  std::size_t per_entity_ = 5;
  mutable std::atomic<std::uint64_t> queries_{0};
};

/// One retrieved paragraph with enough context to cite it.
struct EvidenceParagraph {
  EvidenceRef ref;
  std::string title;  // display title
  std::string url;
  std::string text;

  friend bool operator==(const EvidenceParagraph&, const EvidenceParagraph&) = default;
};

/// Paragraphs retrieved for one entity.
struct EvidenceBlock {
  std::string entity;
  std::vector<EvidenceParagraph> paragraphs;
};

/// All evidence for a claim: per-entity blocks plus a flattened view with
/// duplicates removed (first occurrence kept).
class EvidenceSet {
 public:
  EvidenceSet() = default;
  explicit EvidenceSet(std::vector<EvidenceBlock> blocks);

  const std::vector<EvidenceBlock>& blocks() const noexcept { return blocks_; }
  const std::vector<EvidenceParagraph>& paragraphs() const noexcept { return flat_; }
  bool empty() const noexcept { return flat_.empty(); }

  std::vector<EvidenceRef> refs() const;
  /// Distinct pages in first-use order.
  std::vector<SourceLink> sources() const;

 private:
  std::vector<EvidenceBlock> blocks_;
  std::vector<EvidenceParagraph> flat_;
};

struct SelectionParams {
  std::size_t per_entity = 5;          // m
  std::size_t summary_paragraphs = 2;  // leading paragraphs always kept
};

/// The first `summary_paragraphs` paragraphs of the page, followed by the
/// BM25-best (per_entity - summary) of the remaining paragraphs ranked against
/// the claim text. Throws std::invalid_argument if per_entity < summary.
EvidenceBlock select_evidence(const Page& page, std::string_view claim_text, const SelectionParams& params,
                              const Bm25Index& index);

/// One block per entity that resolves to a page, in entity order.
EvidenceSet gather_evidence(std::span<const std::string> entities, const CorpusStore& store,
                            std::string_view claim_text, const SelectionParams& params, const Bm25Index& index);

/// Corpus-wide BM25 retrieval of the top `k` paragraphs for `query`, as a
/// single block with an empty entity.
EvidenceSet retrieve_global(std::string_view query, std::size_t k, const CorpusStore& store,
                            const Bm25Index& index);

}  // namespace verity
