#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "artdesc/corpus/types.hpp"
#include "artdesc/corpus/vocab.hpp"
#include "artdesc/decoder/model.hpp"
#include "artdesc/numcore/adam.hpp"

namespace artdesc::decoder {

/// One teacher-forcing target: the tokens after <start>, ending with <end>.
struct TrainingExample {
  const corpus::FeatureGrid* grid = nullptr;
  std::optional<corpus::TopicLabel> topic;
  std::vector<int> target;
};

/// Ground truth per variant:
///   baseline - one example per painting, all sentences appended in order;
///   parallel / conditional - one example per painting and topic, that topic's
///     sentences appended in order. A painting without sentences of a topic
///     contributes nothing for that topic. Sentences without a topic
///     annotation are never used.
/// Records must have features loaded (DataError otherwise).
std::vector<TrainingExample> make_examples(const std::vector<corpus::PaintingRecord>& records,
                                           const corpus::Vocab& vocab, Variant variant);

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double token_nll = 0.0;        // mean negative log-likelihood per target token
  double classifier_loss = 0.0;  // mean topic cross-entropy per example (conditional only)
  double joint_loss = 0.0;       // mean per example of nll + weight * classifier loss
};

struct TrainOptions {
  int epochs = 1;
  int batch_size = 32;
  nc::LrSchedule schedule{};
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  /// Weight of the classifier term in the conditional objective.
  double classifier_weight = 1.0;
  std::function<void(const EpochStats&)> on_epoch;
};

struct LossParts {
  double nll = 0.0;
  double classifier = 0.0;
  std::size_t tokens = 0;
};

/// Per-example objective. With weight > 0 (conditional variant only) adds
///   weight * [CE(TC(expected embeddings of the teacher-forced distributions), d)
///           + CE(TC(embeddings of the ground-truth tokens), d)].
nc::Var example_loss(nc::Tape& tape, const TopicDecoder& decoder, const TrainingExample& ex,
                     double classifier_weight, LossParts* parts = nullptr);

/// Mean teacher-forced NLL per target token under the current parameters.
double evaluate_token_nll(const TopicDecoder& decoder, const std::vector<TrainingExample>& examples);

/// Teacher-forced maximum likelihood. Parallel sub-decoders are optimized
/// separately, each with its own Adam state. Throws ConfigError when an
/// example token falls outside the decoder vocabulary.
std::vector<EpochStats> train_decoder(TopicDecoder& decoder, const std::vector<TrainingExample>& examples,
                                      const TrainOptions& opts);

/// Joint objective L_mle + weight * L_ce for the conditional variant.
std::vector<EpochStats> train_conditional(TopicDecoder& decoder, const std::vector<TrainingExample>& examples,
                                          const TrainOptions& opts);

}  // namespace artdesc::decoder
