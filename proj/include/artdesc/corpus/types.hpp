#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "artdesc/numcore/functional.hpp"

namespace artdesc::corpus {

/// Closed set of entity types. The integer codes are serialized; do not reorder.
enum class EntityType : std::uint8_t { person = 0, location, organization, ordinal, number, date, misc };
inline constexpr int kEntityTypeCount = 7;
inline constexpr std::array<EntityType, kEntityTypeCount> kAllEntityTypes{
    EntityType::person, EntityType::location, EntityType::organization, EntityType::ordinal,
    EntityType::number, EntityType::date,     EntityType::misc};

std::string_view to_string(EntityType t);
/// Accepts the lowercase names; also CoreNLP-style uppercase tags (PERSON, LOCATION, ...).
std::optional<EntityType> parse_entity_type(std::string_view s);
/// "[person]", "[date]", ...
std::string slot_text(EntityType t);
std::optional<EntityType> parse_slot_text(std::string_view s);

enum class TopicLabel : std::uint8_t { content = 0, form = 1, context = 2 };
inline constexpr int kTopicCount = 3;
inline constexpr std::array<TopicLabel, kTopicCount> kAllTopics{TopicLabel::content, TopicLabel::form,
                                                                TopicLabel::context};

std::string_view to_string(TopicLabel t);
std::optional<TopicLabel> parse_topic(std::string_view s);
/// Throws std::invalid_argument for codes outside [0, 3).
TopicLabel topic_from_index(int code);

/// A word or a typed slot.
struct Token {
  std::string word;
  std::optional<EntityType> slot;

  static Token make_word(std::string w) { return Token{std::move(w), std::nullopt}; }
  static Token make_slot(EntityType t) { return Token{{}, t}; }

  bool is_slot() const { return slot.has_value(); }
  /// Word text, or the slot marker for slots.
  std::string text() const { return slot ? slot_text(*slot) : word; }

  friend bool operator==(const Token&, const Token&) = default;
};

struct MaskedSentence {
  std::vector<Token> tokens;
  TopicLabel topic = TopicLabel::context;

  std::size_t slot_count() const;
  std::vector<std::string> texts() const;
  /// Tokens joined by single spaces.
  std::string render() const;
  /// Throws std::invalid_argument when a class invariant does not hold.
  void validate() const;

  friend bool operator==(const MaskedSentence&, const MaskedSentence&) = default;
};

/// L x D grid of visual features; row i is the vector for location i.
struct FeatureGrid {
  nc::Matrix values;

  Eigen::Index locations() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
};

inline constexpr std::array<const char*, 4> kAttributeKeys{"artist", "type", "timeframe", "school"};

struct SentenceEntry {
  std::string raw;
  MaskedSentence masked;
  std::vector<std::string> values;  // one per slot, in order
  bool has_topic = true;            // false: topic was absent, kept as context for statistics only
};

struct PaintingRecord {
  std::string id;
  std::optional<FeatureGrid> features;
  std::vector<SentenceEntry> sentences;
  std::map<std::string, std::string> attributes;  // exactly the four attribute keys
  std::vector<std::string> objects;
  std::string reference;

  std::size_t slot_total() const;
  std::size_t value_total() const;
};

}  // namespace artdesc::corpus
