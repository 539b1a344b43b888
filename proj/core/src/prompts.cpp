#include "verity/prompts.hpp"

#include <string>

namespace verity::prompts {

std::string fill(std::string_view tmpl, std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    bool replaced = false;
    for (const auto& [key, value] : values) {
      if (!key.empty() && tmpl.substr(pos, key.size()) == key) {
        out.append(value);
        pos += key.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(tmpl[pos++]);
  }
  return out;
}

std::string format_evidence(std::span<const EvidenceParagraph> paragraphs) {
  if (paragraphs.empty()) return std::string(kNoEvidence);
  std::string out = "\n";
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    out += std::to_string(i + 1);
    out += ". ";
    out += paragraphs[i].text;
    out += " (source: ";
    out += paragraphs[i].title;
    out += ")\n";
  }
  return out;
}

std::string rationale_template(std::span<const std::string> aspects) {
  std::string defaults;
  for (std::size_t i = 0; i < kDefaultAspects.size(); ++i) {
    if (i > 0) defaults += "; ";
    defaults += kDefaultAspects[i];
  }
  std::string custom;
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    if (i > 0) custom += "; ";
    custom += aspects[i];
  }
  std::string tmpl(kRationaleTemplate);
  auto at = tmpl.find(defaults);
  tmpl.replace(at, defaults.size(), custom);
  return tmpl;
}

}  // namespace verity::prompts
