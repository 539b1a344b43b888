#include "verity/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include <spdlog/spdlog.h>

#include "verity/error.hpp"
#include "verity/text.hpp"

namespace verity {
namespace {

using nlohmann::json;

constexpr std::string_view kIndexFormat = "verity-bm25-index";
constexpr int kIndexVersion = 1;

void sort_ranked(std::vector<ScoredParagraph>& ranked) {
  std::sort(ranked.begin(), ranked.end(), [](const ScoredParagraph& a, const ScoredParagraph& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.pid < b.pid;
  });
}

}  // namespace

Bm25Index::Bm25Index(const Bm25Index& other)
    : params_(other.params_),
      postings_(other.postings_),
      lengths_(other.lengths_),
      refs_(other.refs_),
      ids_(other.ids_),
      avgdl_(other.avgdl_),
      per_entity_(other.per_entity_),
      queries_(other.query_count()) {}

Bm25Index& Bm25Index::operator=(const Bm25Index& other) {
  if (this != &other) {
    params_ = other.params_;
    postings_ = other.postings_;
    lengths_ = other.lengths_;
    refs_ = other.refs_;
    ids_ = other.ids_;
    avgdl_ = other.avgdl_;
    per_entity_ = other.per_entity_;
    queries_.store(other.query_count(), std::memory_order_relaxed);
  }
  return *this;
}

Bm25Index::Bm25Index(Bm25Index&& other) noexcept
    : params_(other.params_),
      postings_(std::move(other.postings_)),
      lengths_(std::move(other.lengths_)),
      refs_(std::move(other.refs_)),
      ids_(std::move(other.ids_)),
      avgdl_(other.avgdl_),
      per_entity_(other.per_entity_),
      queries_(other.query_count()) {}

Bm25Index& Bm25Index::operator=(Bm25Index&& other) noexcept {
  if (this != &other) {
    params_ = other.params_;
    postings_ = std::move(other.postings_);
    lengths_ = std::move(other.lengths_);
    refs_ = std::move(other.refs_);
    ids_ = std::move(other.ids_);
    avgdl_ = other.avgdl_;
    per_entity_ = other.per_entity_;
    queries_.store(other.query_count(), std::memory_order_relaxed);
  }
  return *this;
}

bool operator==(const Bm25Index& a, const Bm25Index& b) {
  return a.params_ == b.params_ && a.postings_ == b.postings_ && a.lengths_ == b.lengths_ && a.refs_ == b.refs_ &&
         a.per_entity_ == b.per_entity_;
}

Bm25Index Bm25Index::build(std::span<const Paragraph> paragraphs, Bm25Params params) {
  if (!(params.k1 >= 0.0) || !(params.b >= 0.0 && params.b <= 1.0)) {
    throw std::invalid_argument("bm25: require k1 >= 0 and 0 <= b <= 1");
  }
  Bm25Index index;
  index.params_ = params;
  index.lengths_.reserve(paragraphs.size());
  index.refs_.reserve(paragraphs.size());

  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    const auto pid = static_cast<ParagraphId>(i);
    const auto& paragraph = paragraphs[i];
    auto tokens = tokenize(paragraph.text);
    std::map<std::string_view, std::uint32_t> counts;
    for (const auto& t : tokens) ++counts[t];
    for (const auto& [term, tf] : counts) {
      auto it = index.postings_.find(term);
      if (it == index.postings_.end()) it = index.postings_.emplace(std::string(term), std::vector<Posting>{}).first;
      it->second.push_back(Posting{pid, tf});
    }
    index.lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    index.refs_.push_back(EvidenceRef{paragraph.page_title, paragraph.index});
  }
  index.finalize();
  return index;
}

Bm25Index Bm25Index::build(const CorpusStore& store, Bm25Params params) {
  auto paragraphs = store.all_paragraphs();
  return build(paragraphs, params);
}

void Bm25Index::finalize() {
  std::uint64_t total = 0;
  for (auto len : lengths_) total += len;
  avgdl_ = lengths_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(lengths_.size());
  ids_.clear();
  for (std::size_t i = 0; i < refs_.size(); ++i) ids_.emplace(refs_[i], static_cast<ParagraphId>(i));
}

double Bm25Index::idf(std::size_t df) const noexcept {
  const auto n = static_cast<double>(lengths_.size());
  const auto d = static_cast<double>(df);
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::size_t Bm25Index::document_frequency(std::string_view term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

std::span<const Posting> Bm25Index::postings(std::string_view term) const {
  auto it = postings_.find(term);
  if (it == postings_.end()) return {};
  return it->second;
}

double Bm25Index::score_unchecked(std::span<const std::string> query_tokens, ParagraphId pid) const {
  const double len_ratio = avgdl_ > 0.0 ? static_cast<double>(lengths_[pid]) / avgdl_ : 0.0;
  const double norm = params_.k1 * (1.0 - params_.b + params_.b * len_ratio);
  double total = 0.0;
  for (const auto& term : query_tokens) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto& list = it->second;
    auto hit = std::lower_bound(list.begin(), list.end(), pid,
                                [](const Posting& p, ParagraphId id) { return p.pid < id; });
    if (hit == list.end() || hit->pid != pid) continue;
    const double tf = hit->tf;
    total += idf(list.size()) * tf * (params_.k1 + 1.0) / (tf + norm);
  }
  return total;
}

double Bm25Index::score(std::span<const std::string> query_tokens, ParagraphId pid) const {
  if (pid >= lengths_.size()) throw std::out_of_range("bm25: unknown paragraph id " + std::to_string(pid));
  queries_.fetch_add(1, std::memory_order_relaxed);
  return score_unchecked(query_tokens, pid);
}

std::vector<ScoredParagraph> Bm25Index::top_k(std::string_view query, std::size_t k) const {
  queries_.fetch_add(1, std::memory_order_relaxed);
  if (k == 0) return {};
  const auto tokens = tokenize(query);
  std::set<ParagraphId> candidates;
  for (const auto& term : tokens) {
    for (const auto& p : postings(term)) candidates.insert(p.pid);
  }
  std::vector<ScoredParagraph> ranked;
  ranked.reserve(candidates.size());
  for (auto pid : candidates) {
    const double s = score_unchecked(tokens, pid);
    if (s > 0.0) ranked.push_back({pid, s});
  }
  sort_ranked(ranked);
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::vector<ScoredParagraph> Bm25Index::top_k(std::string_view query, std::size_t k,
                                              std::span<const ParagraphId> restrict_to) const {
  queries_.fetch_add(1, std::memory_order_relaxed);
  if (k == 0) return {};
  const auto tokens = tokenize(query);
  std::set<ParagraphId> candidates(restrict_to.begin(), restrict_to.end());
  std::vector<ScoredParagraph> ranked;
  for (auto pid : candidates) {
    if (pid >= lengths_.size()) continue;
    const double s = score_unchecked(tokens, pid);
    if (s > 0.0) ranked.push_back({pid, s});
  }
  sort_ranked(ranked);
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::optional<ParagraphId> Bm25Index::id_of(const EvidenceRef& ref) const {
  auto it = ids_.find(ref);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void Bm25Index::write(std::ostream& out) const {
  json refs = json::array();
  for (const auto& r : refs_) refs.push_back(json::array({r.page_title, r.paragraph_index}));
  json postings = json::object();
  for (const auto& [term, list] : postings_) {
    json entries = json::array();
    for (const auto& p : list) entries.push_back(json::array({p.pid, p.tf}));
    postings[term] = std::move(entries);
  }
  json doc{{"format", kIndexFormat},
           {"version", kIndexVersion},
           {"k1", params_.k1},
           {"b", params_.b},
           {"per_entity", per_entity_},
           {"refs", std::move(refs)},
           {"lengths", lengths_},
           {"postings", std::move(postings)}};
  out << doc.dump() << '\n';
}

void Bm25Index::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("bm25: cannot write " + path.string());
  write(out);
  if (!out) throw IoError("bm25: write failure on " + path.string());
}

Bm25Index Bm25Index::read(std::istream& in) {
  json doc = json::parse(in, nullptr, false);
  if (!doc.is_object() || doc.value("format", "") != kIndexFormat) throw FormatError("bm25 index: bad header");
  if (doc.value("version", 0) != kIndexVersion) throw FormatError("bm25 index: unsupported version");
  Bm25Index index;
  try {
    index.params_ = Bm25Params{doc.at("k1").get<double>(), doc.at("b").get<double>()};
    index.per_entity_ = doc.value("per_entity", std::size_t{5});
    for (const auto& r : doc.at("refs")) {
      index.refs_.push_back(EvidenceRef{r.at(0).get<std::string>(), r.at(1).get<std::uint32_t>()});
    }
    index.lengths_ = doc.at("lengths").get<std::vector<std::uint32_t>>();
    for (const auto& [term, entries] : doc.at("postings").items()) {
      std::vector<Posting> list;
      for (const auto& e : entries) list.push_back(Posting{e.at(0).get<ParagraphId>(), e.at(1).get<std::uint32_t>()});
      index.postings_.emplace(term, std::move(list));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bm25 index: ") + e.what());
  }
  if (index.refs_.size() != index.lengths_.size()) throw FormatError("bm25 index: refs/lengths size mismatch");
  for (const auto& [term, list] : index.postings_) {
    for (const auto& p : list) {
      if (p.pid >= index.lengths_.size()) throw FormatError("bm25 index: posting for unknown paragraph");
    }
  }
  index.finalize();
  return index;
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("bm25: cannot open " + path.string());
  return read(in);
}

EvidenceSet::EvidenceSet(std::vector<EvidenceBlock> blocks) : blocks_(std::move(blocks)) {
  std::set<EvidenceRef> seen;
  for (const auto& block : blocks_) {
    for (const auto& p : block.paragraphs) {
      if (seen.insert(p.ref).second) flat_.push_back(p);
    }
  }
}

std::vector<EvidenceRef> EvidenceSet::refs() const {
  std::vector<EvidenceRef> out;
  out.reserve(flat_.size());
  for (const auto& p : flat_) out.push_back(p.ref);
  return out;
}

std::vector<SourceLink> EvidenceSet::sources() const {
  std::vector<SourceLink> out;
  std::set<std::string> seen;
  for (const auto& p : flat_) {
    if (seen.insert(p.ref.page_title).second) out.push_back(SourceLink{p.title, p.url});
  }
  return out;
}

namespace {

EvidenceParagraph cite(const Page& page, const Paragraph& paragraph) {
  return EvidenceParagraph{EvidenceRef{page.title, paragraph.index}, page.display_title, page.url, paragraph.text};
}

}  // namespace

EvidenceBlock select_evidence(const Page& page, std::string_view claim_text, const SelectionParams& params,
                              const Bm25Index& index) {
  if (params.per_entity < params.summary_paragraphs) {
    throw std::invalid_argument("select_evidence: per_entity must be >= summary_paragraphs");
  }
  EvidenceBlock block;
  block.entity = page.display_title;
  if (page.paragraphs.empty()) {
    spdlog::info("retrieval: page '{}' has no paragraphs", page.title);
    return block;
  }

  const std::size_t summary = std::min(params.summary_paragraphs, page.paragraphs.size());
  for (std::size_t i = 0; i < summary; ++i) block.paragraphs.push_back(cite(page, page.paragraphs[i]));

  const std::size_t budget = params.per_entity - params.summary_paragraphs;
  if (budget == 0 || summary == page.paragraphs.size()) return block;

  std::vector<ParagraphId> remaining;
  for (std::size_t i = summary; i < page.paragraphs.size(); ++i) {
    if (auto pid = index.id_of(EvidenceRef{page.title, static_cast<std::uint32_t>(i)})) {
      remaining.push_back(*pid);
    } else {
      spdlog::warn("retrieval: paragraph {} of '{}' is not indexed", i, page.title);
    }
  }
  for (const auto& hit : index.top_k(claim_text, budget, remaining)) {
    const auto& ref = index.ref(hit.pid);
    block.paragraphs.push_back(cite(page, page.paragraphs.at(ref.paragraph_index)));
  }
  return block;
}

EvidenceSet gather_evidence(std::span<const std::string> entities, const CorpusStore& store,
                            std::string_view claim_text, const SelectionParams& params, const Bm25Index& index) {
  std::vector<EvidenceBlock> blocks;
  for (const auto& entity : entities) {
    const Page* page = store.find(entity);
    if (page == nullptr) {
      spdlog::debug("retrieval: no page for entity '{}'", entity);
      continue;
    }
    auto block = select_evidence(*page, claim_text, params, index);
    block.entity = entity;
    blocks.push_back(std::move(block));
  }
  return EvidenceSet(std::move(blocks));
}

EvidenceSet retrieve_global(std::string_view query, std::size_t k, const CorpusStore& store,
                            const Bm25Index& index) {
  EvidenceBlock block;
  for (const auto& hit : index.top_k(query, k)) {
    const auto& ref = index.ref(hit.pid);
    const Page* page = store.find(ref.page_title);
    if (page == nullptr || ref.paragraph_index >= page->paragraphs.size()) {
      spdlog::warn("retrieval: index entry {} missing from corpus", hit.pid);
      continue;
    }
    block.paragraphs.push_back(cite(*page, page->paragraphs[ref.paragraph_index]));
  }
  std::vector<EvidenceBlock> blocks;
  blocks.push_back(std::move(block));
  return EvidenceSet(std::move(blocks));
}

}  // namespace verity
