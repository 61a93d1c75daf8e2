#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "artdesc/corpus/tagger.hpp"
#include "artdesc/corpus/types.hpp"

namespace artdesc::corpus {

struct MaskResult {
  MaskedSentence masked;
  std::vector<std::string> values;  // original surface of each slot, in order
};

/// Replaces each span with a slot of its type. Words are lowercased; entity
/// values keep their original case, multi-token values joined by one space.
/// Throws std::invalid_argument for overlapping or out-of-range spans.
MaskResult mask_tokens(const std::vector<std::string>& tokens, std::vector<EntitySpan> spans,
                       TopicLabel topic = TopicLabel::context);
MaskResult mask_sentence(std::string_view sentence, const std::vector<EntitySpan>& spans,
                         TopicLabel topic = TopicLabel::context);

/// Inverse of masking: words as-is, each slot replaced by its value.
/// Throws std::invalid_argument if the value count differs from the slot count.
std::vector<std::string> unmask(const MaskedSentence& masked, const std::vector<std::string>& values);

/// The token list unmask(mask_tokens(tokens, spans)) must reproduce: tokens
/// outside spans lowercased, each span collapsed into one original-case unit.
std::vector<std::string> masked_view(const std::vector<std::string>& tokens, const std::vector<EntitySpan>& spans);

/// Finds each value (tokenized, case-sensitive) in order of appearance, each
/// search starting after the previous match. Throws DataError if a value
/// cannot be located.
std::vector<EntitySpan> locate_entities(const std::vector<std::string>& tokens,
                                        const std::vector<std::pair<std::string, EntityType>>& entities);

}  // namespace artdesc::corpus
