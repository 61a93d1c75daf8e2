#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "artdesc/corpus/types.hpp"

namespace artdesc::corpus {

/// Token <-> index map with fixed reserved indices:
///   0 <pad>, 1 <start>, 2 <end>, 3 <unk>, 4..10 the slot tokens in EntityType order.
/// Words follow, ordered by descending frequency then lexicographically.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kStart = 1;
  static constexpr int kEnd = 2;
  static constexpr int kUnknown = 3;
  static constexpr int kFirstSlot = 4;
  static constexpr int kFirstWord = kFirstSlot + kEntityTypeCount;

  /// Only the reserved tokens.
  Vocab();
  /// Reserved tokens followed by `words` in the given order.
  explicit Vocab(const std::vector<std::string>& words);

  int size() const { return static_cast<int>(tokens_.size()); }
  /// Index of `token`, or kUnknown.
  int index(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  const std::string& token(int index) const;
  static int slot_index(EntityType t) { return kFirstSlot + static_cast<int>(t); }

  std::vector<int> encode(const MaskedSentence& s) const;
  /// Special tokens are skipped; unknown indices decode to "<unk>".
  MaskedSentence decode(const std::vector<int>& ids, TopicLabel topic = TopicLabel::context) const;

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::uint64_t digest() const;

  /// One token per line, reserved tokens included.
  void write(std::ostream& out) const;
  static Vocab read(std::istream& in);

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Word frequencies over every non-slot token.
std::map<std::string, std::size_t> word_counts(const std::vector<MaskedSentence>& corpus);

/// Throws std::invalid_argument for an empty corpus or min_freq < 1.
Vocab build_vocab(const std::vector<MaskedSentence>& corpus, std::size_t min_freq);

}  // namespace artdesc::corpus
