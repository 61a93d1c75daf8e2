#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "artdesc/corpus/types.hpp"
#include "artdesc/corpus/vocab.hpp"
#include "artdesc/decoder/model.hpp"

namespace artdesc::decoder {

/// A decoded token sequence. `tokens` excludes <start> and includes the
/// terminating <end> when one was emitted.
struct Hypothesis {
  std::vector<int> tokens;
  double log_prob = 0.0;

  bool ended() const { return !tokens.empty() && tokens.back() == corpus::Vocab::kEnd; }
};

/// Ranking used by beam search everywhere: higher log-probability first; on a
/// tie the shorter (earlier completed) sequence, then lexicographically
/// smaller token indices.
bool better_hypothesis(const Hypothesis& a, const Hypothesis& b);

/// Argmax at every step (lowest index on ties) until <end> or max_len tokens.
Hypothesis greedy_decode(const TopicDecoder& decoder, const corpus::FeatureGrid& grid,
                         std::optional<corpus::TopicLabel> topic, int max_len);

/// Beam search keeping the `beam_size` best expansions per step. The greedy
/// hypothesis also competes in the final selection, so the result never
/// scores below greedy decoding. Throws std::invalid_argument if beam_size < 1.
Hypothesis beam_decode(const TopicDecoder& decoder, const corpus::FeatureGrid& grid,
                       std::optional<corpus::TopicLabel> topic, int beam_size, int max_len);

/// Total log-probability the model assigns to `tokens` (teacher-forced).
double sequence_log_prob(const TopicDecoder& decoder, const corpus::FeatureGrid& grid,
                         std::optional<corpus::TopicLabel> topic, const std::vector<int>& tokens);

enum class SearchMode { greedy, beam };

struct GenerateOptions {
  SearchMode mode = SearchMode::beam;
  int beam_size = 5;
  int max_len = 0;  // 0: use the decoder's configured max_len
};

/// Decodes one masked sentence for `topic`. The result excludes <end>.
corpus::MaskedSentence generate(const TopicDecoder& decoder, const corpus::Vocab& vocab,
                                const corpus::FeatureGrid& grid, corpus::TopicLabel topic,
                                const GenerateOptions& opts = {});

struct ComposedDescription {
  std::vector<corpus::MaskedSentence> sentences;  // content, form, context order
  std::vector<std::string> warnings;
};

/// Orders per-topic sentences as content, form, context; a missing topic is
/// skipped with a warning.
ComposedDescription compose_description(const std::map<corpus::TopicLabel, corpus::MaskedSentence>& sentences);

}  // namespace artdesc::decoder
