#include "artdesc/corpus/masking.hpp"

#include <algorithm>
#include <stdexcept>

#include "artdesc/corpus/text.hpp"
#include "artdesc/errors.hpp"

namespace artdesc::corpus {

namespace {

void check_spans(std::vector<EntitySpan>& spans, std::size_t n_tokens) {
  std::sort(spans.begin(), spans.end(), [](const EntitySpan& a, const EntitySpan& b) { return a.begin < b.begin; });
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].begin >= spans[i].end || spans[i].end > n_tokens) {
      throw std::invalid_argument("entity span [" + std::to_string(spans[i].begin) + ", " +
                                  std::to_string(spans[i].end) + ") is empty or outside the sentence");
    }
    if (i > 0 && spans[i].begin < spans[i - 1].end) throw std::invalid_argument("entity spans overlap");
  }
}

std::string span_value(const std::vector<std::string>& tokens, const EntitySpan& s) {
  std::string v;
  for (std::size_t k = s.begin; k < s.end; ++k) {
    if (k > s.begin) v += ' ';
    v += tokens[k];
  }
  return v;
}

}  // namespace

MaskResult mask_tokens(const std::vector<std::string>& tokens, std::vector<EntitySpan> spans, TopicLabel topic) {
  check_spans(spans, tokens.size());
  MaskResult out;
  out.masked.topic = topic;
  std::size_t next = 0;
  for (std::size_t i = 0; i < tokens.size();) {
    if (next < spans.size() && spans[next].begin == i) {
      out.masked.tokens.push_back(Token::make_slot(spans[next].type));
      out.values.push_back(span_value(tokens, spans[next]));
      i = spans[next].end;
      ++next;
    } else {
      out.masked.tokens.push_back(Token::make_word(to_lower(tokens[i])));
      ++i;
    }
  }
  return out;
}

MaskResult mask_sentence(std::string_view sentence, const std::vector<EntitySpan>& spans, TopicLabel topic) {
  return mask_tokens(tokenize(sentence), spans, topic);
}

std::vector<std::string> unmask(const MaskedSentence& masked, const std::vector<std::string>& values) {
  if (masked.slot_count() != values.size()) {
    throw std::invalid_argument("unmask: " + std::to_string(masked.slot_count()) + " slots but " +
                                std::to_string(values.size()) + " values");
  }
  std::vector<std::string> out;
  out.reserve(masked.tokens.size());
  std::size_t v = 0;
  for (const Token& t : masked.tokens) out.push_back(t.is_slot() ? values[v++] : t.word);
  return out;
}

std::vector<std::string> masked_view(const std::vector<std::string>& tokens, const std::vector<EntitySpan>& spans) {
  std::vector<EntitySpan> sorted = spans;
  check_spans(sorted, tokens.size());
  std::vector<std::string> out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < tokens.size();) {
    if (next < sorted.size() && sorted[next].begin == i) {
      out.push_back(span_value(tokens, sorted[next]));
      i = sorted[next].end;
      ++next;
    } else {
      out.push_back(to_lower(tokens[i]));
      ++i;
    }
  }
  return out;
}

std::vector<EntitySpan> locate_entities(const std::vector<std::string>& tokens,
                                        const std::vector<std::pair<std::string, EntityType>>& entities) {
  std::vector<EntitySpan> spans;
  std::size_t from = 0;
  for (const auto& [value, type] : entities) {
    const std::vector<std::string> needle = tokenize(value);
    if (needle.empty()) throw DataError("entity value '" + value + "' has no tokens");
    auto it = std::search(tokens.begin() + static_cast<std::ptrdiff_t>(from), tokens.end(), needle.begin(), needle.end());
    if (it == tokens.end()) throw DataError("entity value '" + value + "' not found in sentence");
    const auto begin = static_cast<std::size_t>(it - tokens.begin());
    spans.push_back({begin, begin + needle.size(), type});
    from = begin + needle.size();
  }
  return spans;
}

}  // namespace artdesc::corpus
