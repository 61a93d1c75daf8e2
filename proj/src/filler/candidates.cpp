#include "artdesc/filler/candidates.hpp"

#include <algorithm>
#include <stdexcept>

#include "artdesc/corpus/masking.hpp"
#include "artdesc/corpus/text.hpp"

namespace artdesc::filler {

using corpus::EntityType;

bool CandidateSet::add(Candidate c) {
  if (c.surface.find_first_not_of(" \t\r\n") == std::string::npos) return false;
  if (contains(c.surface, c.type)) return false;
  entries_.push_back(std::move(c));
  return true;
}

bool CandidateSet::contains(const std::string& surface, EntityType type) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Candidate& e) { return e.surface == surface && e.type == type; });
}

EntityType attribute_entity_type(const std::string& key) {
  if (key == "artist") return EntityType::person;
  if (key == "school") return EntityType::location;
  if (key == "timeframe") return EntityType::date;
  if (key == "type") return EntityType::misc;
  throw std::invalid_argument("unknown attribute '" + key + "'");
}

CandidateSet extract_candidates(const std::vector<std::string>& articles,
                                const std::map<std::string, std::string>& attributes, const corpus::Tagger& tagger) {
  CandidateSet set;
  for (const char* key : corpus::kAttributeKeys) {
    auto it = attributes.find(key);
    if (it != attributes.end()) set.add({it->second, attribute_entity_type(key), CandidateSource::attribute});
  }
  for (const auto& text : articles) {
    for (const auto& sentence : corpus::split_sentences(text, corpus::default_abbreviations())) {
      const auto tokens = corpus::tokenize(sentence);
      for (const auto& span : tagger.tag(tokens)) {
        std::vector<std::string> words(tokens.begin() + static_cast<std::ptrdiff_t>(span.begin),
                                       tokens.begin() + static_cast<std::ptrdiff_t>(span.end));
        set.add({corpus::join(words, " "), span.type, CandidateSource::article});
      }
    }
  }
  return set;
}

}  // namespace artdesc::filler
