#include "artdesc/corpus/vocab.hpp"

#include <algorithm>
#include <stdexcept>

#include "artdesc/digest.hpp"
#include "artdesc/errors.hpp"

namespace artdesc::corpus {

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(const std::vector<std::string>& words) {
  tokens_ = {"<pad>", "<start>", "<end>", "<unk>"};
  for (EntityType t : kAllEntityTypes) tokens_.push_back(slot_text(t));
  for (const auto& w : words) tokens_.push_back(w);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("vocabulary token '" + tokens_[i] + "' appears twice");
    }
  }
}

int Vocab::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

const std::string& Vocab::token(int index) const {
  if (index < 0 || index >= size()) throw std::out_of_range("vocabulary index " + std::to_string(index));
  return tokens_[static_cast<std::size_t>(index)];
}

std::vector<int> Vocab::encode(const MaskedSentence& s) const {
  std::vector<int> ids;
  ids.reserve(s.tokens.size());
  for (const Token& t : s.tokens) ids.push_back(t.is_slot() ? slot_index(*t.slot) : index(t.word));
  return ids;
}

MaskedSentence Vocab::decode(const std::vector<int>& ids, TopicLabel topic) const {
  MaskedSentence s;
  s.topic = topic;
  for (int id : ids) {
    if (id == kPad || id == kStart || id == kEnd) continue;
    if (id >= kFirstSlot && id < kFirstWord) {
      s.tokens.push_back(Token::make_slot(static_cast<EntityType>(id - kFirstSlot)));
    } else {
      s.tokens.push_back(Token::make_word(token(id)));
    }
  }
  return s;
}

std::uint64_t Vocab::digest() const {
  std::uint64_t h = fnv1a64("");
  for (const auto& t : tokens_) {
    h = fnv1a64(t, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

void Vocab::write(std::ostream& out) const {
  for (const auto& t : tokens_) out << t << '\n';
}

Vocab Vocab::read(std::istream& in) {
  std::vector<std::string> all;
  std::string line;
  while (std::getline(in, line)) all.push_back(line);
  const Vocab reserved;
  if (all.size() < reserved.tokens_.size() ||
      !std::equal(reserved.tokens_.begin(), reserved.tokens_.end(), all.begin())) {
    throw FormatError("vocabulary does not start with the reserved tokens");
  }
  return Vocab(std::vector<std::string>(all.begin() + static_cast<std::ptrdiff_t>(reserved.tokens_.size()), all.end()));
}

std::map<std::string, std::size_t> word_counts(const std::vector<MaskedSentence>& corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : corpus)
    for (const auto& t : s.tokens)
      if (!t.is_slot()) ++counts[t.word];
  return counts;
}

Vocab build_vocab(const std::vector<MaskedSentence>& corpus, std::size_t min_freq) {
  if (corpus.empty()) throw std::invalid_argument("build_vocab: empty corpus");
  if (min_freq < 1) throw std::invalid_argument("build_vocab: min_freq must be at least 1");
  const auto counts = word_counts(corpus);
  std::vector<std::pair<std::string, std::size_t>> kept;
  const Vocab reserved;
  for (const auto& [w, n] : counts)
    if (n >= min_freq && !reserved.contains(w)) kept.emplace_back(w, n);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words;
  words.reserve(kept.size());
  for (auto& [w, _] : kept) words.push_back(w);
  return Vocab(words);
}

}  // namespace artdesc::corpus
