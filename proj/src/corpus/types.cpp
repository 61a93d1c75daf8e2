#include "artdesc/corpus/types.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace artdesc::corpus {

namespace {
constexpr std::array<std::string_view, kEntityTypeCount> kEntityNames{"person", "location", "organization", "ordinal",
                                                                      "number", "date",     "misc"};
constexpr std::array<std::string_view, kTopicCount> kTopicNames{"content", "form", "context"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}
}  // namespace

std::string_view to_string(EntityType t) { return kEntityNames[static_cast<std::size_t>(t)]; }

std::optional<EntityType> parse_entity_type(std::string_view s) {
  const std::string l = lower(s);
  for (std::size_t i = 0; i < kEntityNames.size(); ++i)
    if (l == kEntityNames[i]) return static_cast<EntityType>(i);
  return std::nullopt;
}

std::string slot_text(EntityType t) { return "[" + std::string(to_string(t)) + "]"; }

std::optional<EntityType> parse_slot_text(std::string_view s) {
  if (s.size() < 3 || s.front() != '[' || s.back() != ']') return std::nullopt;
  for (std::size_t i = 0; i < kEntityNames.size(); ++i)
    if (s.substr(1, s.size() - 2) == kEntityNames[i]) return static_cast<EntityType>(i);
  return std::nullopt;
}

std::string_view to_string(TopicLabel t) { return kTopicNames[static_cast<std::size_t>(t)]; }

std::optional<TopicLabel> parse_topic(std::string_view s) {
  const std::string l = lower(s);
  for (std::size_t i = 0; i < kTopicNames.size(); ++i)
    if (l == kTopicNames[i]) return static_cast<TopicLabel>(i);
  return std::nullopt;
}

TopicLabel topic_from_index(int code) {
  if (code < 0 || code >= kTopicCount) throw std::invalid_argument("unknown topic code " + std::to_string(code));
  return static_cast<TopicLabel>(code);
}

std::size_t MaskedSentence::slot_count() const {
  return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_slot(); }));
}

std::vector<std::string> MaskedSentence::texts() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.text());
  return out;
}

std::string MaskedSentence::render() const {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.text();
  }
  return out;
}

void MaskedSentence::validate() const {
  if (tokens.empty()) throw std::invalid_argument("masked sentence has no tokens");
  for (const Token& t : tokens) {
    if (t.is_slot()) continue;
    if (t.word.empty()) throw std::invalid_argument("masked sentence contains an empty word");
    for (char c : t.word) {
      if (c == '[' || c == ']') throw std::invalid_argument("word '" + t.word + "' contains a slot marker character");
      if (std::isupper(static_cast<unsigned char>(c))) throw std::invalid_argument("word '" + t.word + "' is not lowercase");
    }
  }
}

std::size_t PaintingRecord::slot_total() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.masked.slot_count();
  return n;
}

std::size_t PaintingRecord::value_total() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.values.size();
  return n;
}

}  // namespace artdesc::corpus
