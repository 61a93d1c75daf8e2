#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "artdesc/corpus/types.hpp"

namespace artdesc::corpus {

/// Half-open token range [begin, end) over tokenize(sentence).
struct EntitySpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  EntityType type = EntityType::misc;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

class Tagger {
 public:
  virtual ~Tagger() = default;
  /// Non-overlapping spans sorted left to right.
  virtual std::vector<EntitySpan> tag(const std::vector<std::string>& tokens) const = 0;

  std::vector<EntitySpan> tag(std::string_view sentence) const;
};

/// Dictionary + pattern tagger. Names come from longest-match lookup of
/// case-sensitive surface forms; dates, ordinals and numbers from fixed
/// patterns. Dictionary matches take precedence at a given position.
class GazetteerTagger final : public Tagger {
 public:
  GazetteerTagger() = default;

  void add(std::string_view surface, EntityType type);
  /// Reads "surface<TAB>type" lines; blank lines and '#' comments are skipped.
  void load(const std::filesystem::path& path);
  void load(std::istream& in, const std::string& source = "<stream>");

  std::size_t size() const { return entries_.size(); }

  using Tagger::tag;
  std::vector<EntitySpan> tag(const std::vector<std::string>& tokens) const override;

 private:
  std::size_t match_pattern(const std::vector<std::string>& tokens, std::size_t at, EntityType& type) const;

  // Keyed by the first token of the surface form.
  std::map<std::string, std::vector<std::pair<std::vector<std::string>, EntityType>>> entries_by_head_;
  std::map<std::vector<std::string>, EntityType> entries_;
};

/// Convenience wrapper: tag `sentence` with `tagger`.
std::vector<EntitySpan> tag_entities(std::string_view sentence, const Tagger& tagger);

}  // namespace artdesc::corpus
