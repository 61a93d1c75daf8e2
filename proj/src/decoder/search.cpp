#include "artdesc/decoder/search.hpp"

#include <algorithm>
#include <stdexcept>

namespace artdesc::decoder {

using corpus::Vocab;

bool better_hypothesis(const Hypothesis& a, const Hypothesis& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  if (a.tokens.size() != b.tokens.size()) return a.tokens.size() < b.tokens.size();
  return a.tokens < b.tokens;
}

namespace {

struct Live {
  Hypothesis hyp;
  DecoderState state;
};

nc::Vector step_log_probs(const TopicDecoder& decoder, nc::Tape& tape, const SequenceContext& ctx,
                          const DecoderState& state, int prev, DecoderState& next) {
  StepOutput out = decoder.step(tape, ctx, state, prev);
  next = out.state;
  return nc::log_softmax(out.logits.value());
}

int resolve_max_len(const TopicDecoder& decoder, int max_len) {
  const int m = max_len > 0 ? max_len : decoder.config().max_len;
  if (m < 1) throw std::invalid_argument("max_len must be >= 1");
  return m;
}

}  // namespace

Hypothesis greedy_decode(const TopicDecoder& decoder, const corpus::FeatureGrid& grid,
                         std::optional<corpus::TopicLabel> topic, int max_len) {
  max_len = resolve_max_len(decoder, max_len);
  nc::Tape tape(&decoder.params(), false);
  const SequenceContext ctx = decoder.bind(tape, grid, topic);
  DecoderState state = decoder.init_state(tape, ctx);
  Hypothesis hyp;
  int prev = Vocab::kStart;
  for (int t = 0; t < max_len; ++t) {
    DecoderState next;
    const nc::Vector lp = step_log_probs(decoder, tape, ctx, state, prev, next);
    Eigen::Index best = 0;
    lp.maxCoeff(&best);  // first maximal index
    hyp.tokens.push_back(static_cast<int>(best));
    hyp.log_prob += lp(best);
    if (best == Vocab::kEnd) break;
    state = next;
    prev = static_cast<int>(best);
  }
  return hyp;
}

Hypothesis beam_decode(const TopicDecoder& decoder, const corpus::FeatureGrid& grid,
                       std::optional<corpus::TopicLabel> topic, int beam_size, int max_len) {
  if (beam_size < 1) throw std::invalid_argument("beam_size must be >= 1");
  max_len = resolve_max_len(decoder, max_len);
  nc::Tape tape(&decoder.params(), false);
  const SequenceContext ctx = decoder.bind(tape, grid, topic);

  std::vector<Live> live{{Hypothesis{}, decoder.init_state(tape, ctx)}};
  std::vector<Hypothesis> completed;
  for (int t = 0; t < max_len && !live.empty(); ++t) {
    struct Expansion {
      Hypothesis hyp;
      std::size_t parent;
    };
    std::vector<Expansion> expansions;
    std::vector<DecoderState> next_states(live.size());
    for (std::size_t k = 0; k < live.size(); ++k) {
      const int prev = live[k].hyp.tokens.empty() ? Vocab::kStart : live[k].hyp.tokens.back();
      const nc::Vector lp = step_log_probs(decoder, tape, ctx, live[k].state, prev, next_states[k]);
      for (Eigen::Index w = 0; w < lp.size(); ++w) {
        Hypothesis h = live[k].hyp;
        h.tokens.push_back(static_cast<int>(w));
        h.log_prob += lp(w);
        expansions.push_back({std::move(h), k});
      }
    }
    const std::size_t keep = std::min(expansions.size(), static_cast<std::size_t>(beam_size));
    std::partial_sort(expansions.begin(), expansions.begin() + static_cast<std::ptrdiff_t>(keep), expansions.end(),
                      [](const Expansion& a, const Expansion& b) { return better_hypothesis(a.hyp, b.hyp); });
    std::vector<Live> survivors;
    for (std::size_t k = 0; k < keep; ++k) {
      Expansion& e = expansions[k];
      if (e.hyp.ended() || static_cast<int>(e.hyp.tokens.size()) == max_len) {
        completed.push_back(std::move(e.hyp));
      } else {
        survivors.push_back({std::move(e.hyp), next_states[e.parent]});
      }
    }
    live = std::move(survivors);
  }

  completed.push_back(greedy_decode(decoder, grid, topic, max_len));
  return *std::min_element(completed.begin(), completed.end(), better_hypothesis);
}

double sequence_log_prob(const TopicDecoder& decoder, const corpus::FeatureGrid& grid,
                         std::optional<corpus::TopicLabel> topic, const std::vector<int>& tokens) {
  nc::Tape tape(&decoder.params(), false);
  const SequenceContext ctx = decoder.bind(tape, grid, topic);
  DecoderState state = decoder.init_state(tape, ctx);
  double total = 0.0;
  int prev = Vocab::kStart;
  for (int tok : tokens) {
    DecoderState next;
    total += step_log_probs(decoder, tape, ctx, state, prev, next)(tok);
    state = next;
    prev = tok;
  }
  return total;
}

corpus::MaskedSentence generate(const TopicDecoder& decoder, const Vocab& vocab, const corpus::FeatureGrid& grid,
                                corpus::TopicLabel topic, const GenerateOptions& opts) {
  if (vocab.size() != decoder.config().vocab_size) {
    throw std::invalid_argument("vocabulary size does not match the decoder");
  }
  const Hypothesis h = opts.mode == SearchMode::greedy
                           ? greedy_decode(decoder, grid, topic, opts.max_len)
                           : beam_decode(decoder, grid, topic, opts.beam_size, opts.max_len);
  return vocab.decode(h.tokens, topic);
}

ComposedDescription compose_description(const std::map<corpus::TopicLabel, corpus::MaskedSentence>& sentences) {
  ComposedDescription out;
  for (corpus::TopicLabel t : corpus::kAllTopics) {
    auto it = sentences.find(t);
    if (it == sentences.end()) {
      out.warnings.push_back("no sentence for topic '" + std::string(corpus::to_string(t)) + "'; omitted");
      continue;
    }
    out.sentences.push_back(it->second);
  }
  return out;
}

}  // namespace artdesc::decoder
