#pragma once

#include <optional>
#include <string>
#include <vector>

#include "artdesc/corpus/types.hpp"
#include "artdesc/decoder/config.hpp"
#include "artdesc/numcore/param_store.hpp"
#include "artdesc/numcore/random.hpp"
#include "artdesc/numcore/tape.hpp"

namespace artdesc::decoder {

/// Values bound once per decoded sequence.
struct SequenceContext {
  std::string prefix;  // sub-decoder parameter prefix
  nc::Var grid;        // L x D visual features
  nc::Var projected;   // L x A, the image half of the attention MLP
  std::optional<nc::Var> topic;  // topic embedding row (conditional variant)
};

struct DecoderState {
  nc::Var h;
  nc::Var c;
};

struct Attention {
  nc::Var context;  // z, D x 1
  nc::Var alpha;    // L x 1, sums to one
};

struct StepOutput {
  DecoderState state;
  Attention attention;
  nc::Var logits;  // vocab_size x 1
};

/// Soft-attention LSTM decoder. One instance covers all three variants:
///   baseline     - one decoder, topic ignored
///   parallel     - three disjoint sub-decoders selected by topic
///   conditional  - one decoder whose LSTM input also carries a topic embedding,
///                  plus the TextCNN topic classifier used in joint training
///
/// Per step t (all inside one sub-decoder):
///   g_i   = w^T tanh(Wv v_i + Wh h_{t-1} + b)
///   alpha = softmax(g),   z = sum_i alpha_i v_i
///   h, c  = LSTM([z, E y_{t-1} (, E_topic d)], h_{t-1}, c_{t-1})
///   p     = softmax(Wy [h, z] + by)
/// and h_0 = tanh(W_h0 mean(v) + b_h0), c_0 = tanh(W_c0 mean(v) + b_c0).
class TopicDecoder {
 public:
  /// Fresh model: weights uniform in [-init_scale, init_scale], biases zero.
  TopicDecoder(const DecoderConfig& config, nc::Rng& rng);
  /// Restores a model; every expected parameter must be present with the right shape.
  TopicDecoder(const DecoderConfig& config, nc::ParamStore params);

  const DecoderConfig& config() const { return config_; }
  const nc::ParamStore& params() const { return params_; }
  nc::ParamStore& params() { return params_; }

  /// Throws std::invalid_argument when the variant needs a topic and none is
  /// given, and ShapeError when the grid width differs from feature_dim.
  SequenceContext bind(nc::Tape& tape, const corpus::FeatureGrid& grid,
                       std::optional<corpus::TopicLabel> topic) const;
  DecoderState init_state(nc::Tape& tape, const SequenceContext& ctx) const;
  Attention attend(nc::Tape& tape, const SequenceContext& ctx, nc::Var h_prev) const;
  StepOutput step(nc::Tape& tape, const SequenceContext& ctx, const DecoderState& prev, int prev_token) const;

  struct Forced {
    nc::Var nll;                       // summed over target tokens
    std::vector<nc::Var> logits;       // one per target token
  };
  /// Teacher-forced pass. `target` holds the tokens after <start>, normally
  /// ending with <end>.
  Forced teacher_forced(nc::Tape& tape, const corpus::FeatureGrid& grid, std::optional<corpus::TopicLabel> topic,
                        const std::vector<int>& target) const;

  /// Names of the parameters this configuration owns.
  static std::vector<std::pair<std::string, std::pair<int, int>>> parameter_shapes(const DecoderConfig& config);

 private:
  DecoderConfig config_;
  nc::ParamStore params_;
};

/// TextCNN over a T x E matrix of (expected) word embeddings: windows of width
/// 2 and 3 with `filters` maps each, tanh, max over time, then a linear layer to
/// three topic logits. Sequences shorter than 3 are zero-padded.
/// Parameters live under "tc." in the conditional decoder's store.
namespace classifier {

nc::Var logits(nc::Tape& tape, nc::Var embedded);
/// Embeds hard tokens.
nc::Var embed_tokens(nc::Tape& tape, const std::vector<int>& tokens);
/// Continuous approximation: row t is sum_w p_t(w) E[w] with p_t = softmax(logits_t).
nc::Var embed_distributions(nc::Tape& tape, const std::vector<nc::Var>& step_logits);
/// Predicted topic of a token sequence.
corpus::TopicLabel predict(const nc::ParamStore& params, const std::vector<int>& tokens);

}  // namespace classifier

}  // namespace artdesc::decoder
