#include "verity/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include <spdlog/spdlog.h>

#include "verity/error.hpp"
#include "verity/text.hpp"

namespace verity {
namespace {

using nlohmann::json;

constexpr std::string_view kSnapshotFormat = "verity-corpus-snapshot";
constexpr int kSnapshotVersion = 1;

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Parses one source record into a page. Returns false for malformed records.
bool parse_record(std::string_view line, Page& page, std::size_t& dropped) {
  json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!record.is_object()) return false;

  auto title = record.find("title");
  auto url = record.find("url");
  auto paragraphs = record.find("paragraphs");
  if (title == record.end() || !title->is_string()) return false;
  if (url == record.end() || !url->is_string()) return false;
  if (paragraphs == record.end() || !paragraphs->is_array()) return false;
  for (const auto& p : *paragraphs) {
    if (!p.is_string()) return false;
  }

  page.display_title = std::string(trim(title->get_ref<const std::string&>()));
  page.title = normalize_title(page.display_title);
  if (page.title.empty()) return false;
  page.url = url->get<std::string>();
  page.paragraphs.clear();
  for (const auto& p : *paragraphs) {
    const auto& text = p.get_ref<const std::string&>();
    if (tokenize(text).empty()) {
      ++dropped;
      continue;
    }
    page.paragraphs.push_back(Paragraph{page.title, static_cast<std::uint32_t>(page.paragraphs.size()), text});
  }
  return true;
}

json page_to_json(const Page& page) {
  json paragraphs = json::array();
  for (const auto& p : page.paragraphs) paragraphs.push_back(p.text);
  return json{{"title", page.title},
              {"display_title", page.display_title},
              {"url", page.url},
              {"paragraphs", std::move(paragraphs)}};
}

}  // namespace

std::string normalize_title(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (c == '_' || is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

CorpusStore CorpusStore::ingest(std::istream& source) {
  CorpusStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    Page page;
    if (!parse_record(line, page, store.stats_.dropped_paragraphs)) {
      ++store.stats_.malformed;
      spdlog::debug("corpus: skipping malformed record on line {}", line_no);
      continue;
    }
    if (store.pages_.contains(page.title)) {
      ++store.stats_.duplicate_titles;
      spdlog::debug("corpus: duplicate title '{}' on line {}", page.title, line_no);
      continue;
    }
    store.stats_.paragraphs += page.paragraphs.size();
    auto key = page.title;
    store.pages_.emplace(std::move(key), std::move(page));
  }
  if (source.bad()) throw IoError("corpus: read failure");
  store.stats_.pages = store.pages_.size();
  return store;
}

CorpusStore CorpusStore::ingest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("corpus: cannot open " + path.string());
  return ingest(in);
}

void CorpusStore::write_snapshot(std::ostream& out) const {
  json header{{"format", kSnapshotFormat},
              {"version", kSnapshotVersion},
              {"pages", stats_.pages},
              {"paragraphs", stats_.paragraphs},
              {"malformed", stats_.malformed},
              {"duplicate_titles", stats_.duplicate_titles},
              {"dropped_paragraphs", stats_.dropped_paragraphs}};
  out << header.dump() << '\n';
  for (const auto& [_, page] : pages_) out << page_to_json(page).dump() << '\n';
}

void CorpusStore::save_snapshot(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("corpus: cannot write " + path.string());
  write_snapshot(out);
  if (!out) throw IoError("corpus: write failure on " + path.string());
}

CorpusStore CorpusStore::read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("corpus snapshot: missing header");
  json header = json::parse(line, nullptr, false);
  if (!header.is_object() || header.value("format", "") != kSnapshotFormat) {
    throw FormatError("corpus snapshot: bad header");
  }
  if (header.value("version", 0) != kSnapshotVersion) {
    throw FormatError("corpus snapshot: unsupported version");
  }

  CorpusStore store;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (!record.is_object()) {
      throw FormatError("corpus snapshot: bad record on line " + std::to_string(line_no));
    }
    try {
      Page page;
      page.title = record.at("title").get<std::string>();
      page.display_title = record.at("display_title").get<std::string>();
      page.url = record.at("url").get<std::string>();
      for (const auto& text : record.at("paragraphs")) {
        page.paragraphs.push_back(
            Paragraph{page.title, static_cast<std::uint32_t>(page.paragraphs.size()), text.get<std::string>()});
      }
      auto key = page.title;
      store.pages_.emplace(std::move(key), std::move(page));
    } catch (const json::exception& e) {
      throw FormatError("corpus snapshot: line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  store.stats_.pages = header.at("pages").get<std::size_t>();
  store.stats_.paragraphs = header.at("paragraphs").get<std::size_t>();
  store.stats_.malformed = header.at("malformed").get<std::size_t>();
  store.stats_.duplicate_titles = header.at("duplicate_titles").get<std::size_t>();
  store.stats_.dropped_paragraphs = header.at("dropped_paragraphs").get<std::size_t>();

  std::size_t paragraphs = 0;
  for (const auto& [_, page] : store.pages_) paragraphs += page.paragraphs.size();
  if (store.pages_.size() != store.stats_.pages || paragraphs != store.stats_.paragraphs) {
    throw FormatError("corpus snapshot: counts do not match header");
  }
  return store;
}

CorpusStore CorpusStore::load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("corpus: cannot open snapshot " + path.string());
  return read_snapshot(in);
}

const Page* CorpusStore::find(std::string_view entity) const {
  auto it = pages_.find(normalize_title(entity));
  return it == pages_.end() ? nullptr : &it->second;
}

const Paragraph* CorpusStore::find(const EvidenceRef& ref) const {
  auto it = pages_.find(ref.page_title);
  if (it == pages_.end() || ref.paragraph_index >= it->second.paragraphs.size()) return nullptr;
  return &it->second.paragraphs[ref.paragraph_index];
}

std::vector<Paragraph> CorpusStore::all_paragraphs() const {
  std::vector<Paragraph> out;
  out.reserve(stats_.paragraphs);
  for (const auto& [_, page] : pages_) {
    out.insert(out.end(), page.paragraphs.begin(), page.paragraphs.end());
  }
  return out;
}

}  // namespace verity
