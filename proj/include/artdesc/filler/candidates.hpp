#pragma once

#include <map>
#include <string>
#include <vector>

#include "artdesc/corpus/tagger.hpp"
#include "artdesc/corpus/types.hpp"

namespace artdesc::filler {

enum class CandidateSource { attribute, article };

struct Candidate {
  std::string surface;
  corpus::EntityType type = corpus::EntityType::misc;
  CandidateSource source = CandidateSource::article;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Typed entity strings, unique by (surface, type), in insertion order.
class CandidateSet {
 public:
  /// Returns false when (surface, type) is already present or surface is blank.
  bool add(Candidate c);
  const std::vector<Candidate>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(const std::string& surface, corpus::EntityType type) const;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;

 private:
  std::vector<Candidate> entries_;
};

/// artist -> person, school -> location, timeframe -> date, type -> misc.
corpus::EntityType attribute_entity_type(const std::string& key);

/// Attribute values first (artist, type, timeframe, school), then the tagged
/// entities of each article in rank order and text order.
CandidateSet extract_candidates(const std::vector<std::string>& articles,
                                const std::map<std::string, std::string>& attributes, const corpus::Tagger& tagger);

}  // namespace artdesc::filler
