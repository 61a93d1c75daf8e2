#include "artdesc/decoder/train.hpp"

#include <map>

#include "artdesc/errors.hpp"

namespace artdesc::decoder {

using corpus::TopicLabel;
using corpus::Vocab;

std::vector<TrainingExample> make_examples(const std::vector<corpus::PaintingRecord>& records, const Vocab& vocab,
                                           Variant variant) {
  std::vector<TrainingExample> out;
  for (const auto& rec : records) {
    if (!rec.features) throw DataError("record '" + rec.id + "' has no feature grid loaded");
    if (variant == Variant::baseline) {
      TrainingExample ex{&*rec.features, std::nullopt, {}};
      for (const auto& s : rec.sentences) {
        if (!s.has_topic) continue;
        for (int id : vocab.encode(s.masked)) ex.target.push_back(id);
      }
      if (ex.target.empty()) continue;
      ex.target.push_back(Vocab::kEnd);
      out.push_back(std::move(ex));
      continue;
    }
    for (TopicLabel topic : corpus::kAllTopics) {
      TrainingExample ex{&*rec.features, topic, {}};
      for (const auto& s : rec.sentences) {
        if (!s.has_topic || s.masked.topic != topic) continue;
        for (int id : vocab.encode(s.masked)) ex.target.push_back(id);
      }
      if (ex.target.empty()) continue;
      ex.target.push_back(Vocab::kEnd);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

nc::Var example_loss(nc::Tape& tape, const TopicDecoder& decoder, const TrainingExample& ex, double classifier_weight,
                     LossParts* parts) {
  const auto forced = decoder.teacher_forced(tape, *ex.grid, ex.topic, ex.target);
  nc::Var loss = forced.nll;
  double ce_value = 0.0;
  if (classifier_weight != 0.0) {
    if (decoder.config().variant != Variant::conditional) {
      throw ConfigError("the topic classifier exists only in the conditional decoder");
    }
    if (!ex.topic) throw std::invalid_argument("conditional training example without a topic");
    const int d = static_cast<int>(*ex.topic);
    nc::Var soft = nc::cross_entropy(classifier::logits(tape, classifier::embed_distributions(tape, forced.logits)), d);
    nc::Var hard = nc::cross_entropy(classifier::logits(tape, classifier::embed_tokens(tape, ex.target)), d);
    nc::Var ce = soft + hard;
    ce_value = ce.scalar();
    loss = loss + classifier_weight * ce;
  }
  if (parts) {
    parts->nll = forced.nll.scalar();
    parts->classifier = ce_value;
    parts->tokens = ex.target.size();
  }
  return loss;
}

namespace {

void check_examples(const TopicDecoder& decoder, const std::vector<TrainingExample>& examples) {
  if (examples.empty()) throw DataError("no training examples");
  for (const auto& ex : examples) {
    if (ex.grid == nullptr) throw DataError("training example without features");
    for (int t : ex.target) {
      if (t < 0 || t >= decoder.config().vocab_size) {
        throw ConfigError("training token " + std::to_string(t) + " is outside the decoder vocabulary of size " +
                          std::to_string(decoder.config().vocab_size) + "; corpus and vocabulary do not match");
      }
    }
  }
}

struct EpochSums {
  double nll = 0, classifier = 0, joint = 0;
  std::size_t tokens = 0, examples = 0;
};

/// Runs `epochs` of minibatch Adam on `store` over `examples`; returns per-epoch sums.
std::vector<EpochSums> run(const TopicDecoder& decoder, nc::ParamStore& store,
                           const std::vector<const TrainingExample*>& examples, const TrainOptions& opts,
                           double classifier_weight, nc::Rng& rng) {
  if (opts.batch_size < 1) throw ConfigError("batch size must be >= 1");
  std::vector<EpochSums> sums;
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(order);
    const double lr = opts.schedule.at(epoch);
    EpochSums s;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(opts.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(opts.batch_size));
      const double scale = 1.0 / static_cast<double>(end - start);
      store.zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        const TrainingExample& ex = *examples[order[k]];
        nc::Tape tape(&store);
        LossParts parts;
        nc::Var loss = example_loss(tape, decoder, ex, classifier_weight, &parts);
        s.nll += parts.nll;
        s.classifier += parts.classifier;
        s.joint += loss.scalar();
        s.tokens += parts.tokens;
        ++s.examples;
        tape.backward(scale * loss, store);
      }
      nc::adam_step(store, {lr, opts.beta1, opts.beta2, opts.eps});
    }
    sums.push_back(s);
  }
  return sums;
}

std::vector<EpochStats> to_stats(const std::vector<EpochSums>& sums, const TrainOptions& opts) {
  std::vector<EpochStats> out;
  for (std::size_t e = 0; e < sums.size(); ++e) {
    const EpochSums& s = sums[e];
    EpochStats st;
    st.epoch = static_cast<int>(e);
    st.lr = opts.schedule.at(st.epoch);
    st.token_nll = s.tokens ? s.nll / static_cast<double>(s.tokens) : 0.0;
    st.classifier_loss = s.examples ? s.classifier / static_cast<double>(s.examples) : 0.0;
    st.joint_loss = s.examples ? s.joint / static_cast<double>(s.examples) : 0.0;
    out.push_back(st);
    if (opts.on_epoch) opts.on_epoch(st);
  }
  return out;
}

std::vector<EpochStats> train_impl(TopicDecoder& decoder, const std::vector<TrainingExample>& examples,
                                   const TrainOptions& opts, double classifier_weight) {
  check_examples(decoder, examples);
  const Variant variant = decoder.config().variant;

  if (variant != Variant::parallel) {
    std::vector<const TrainingExample*> ptrs;
    for (const auto& ex : examples) {
      if (variant == Variant::conditional && !ex.topic) throw DataError("conditional decoder example without a topic");
      ptrs.push_back(&ex);
    }
    nc::Rng rng(opts.seed);
    return to_stats(run(decoder, decoder.params(), ptrs, opts, classifier_weight, rng), opts);
  }

  // Parallel: each sub-decoder sees only its topic's examples and its own parameters.
  std::vector<EpochSums> merged(static_cast<std::size_t>(std::max(opts.epochs, 0)));
  for (TopicLabel topic : corpus::kAllTopics) {
    std::vector<const TrainingExample*> ptrs;
    for (const auto& ex : examples) {
      if (!ex.topic) throw DataError("parallel decoder example without a topic");
      if (*ex.topic == topic) ptrs.push_back(&ex);
    }
    if (ptrs.empty()) continue;
    nc::ParamStore sub = decoder.params().subset(sub_decoder_prefix(variant, topic));
    nc::Rng rng(opts.seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(topic) + 1));
    const auto sums = run(decoder, sub, ptrs, opts, 0.0, rng);
    decoder.params().assign_values(sub);
    for (std::size_t e = 0; e < sums.size(); ++e) {
      merged[e].nll += sums[e].nll;
      merged[e].joint += sums[e].joint;
      merged[e].tokens += sums[e].tokens;
      merged[e].examples += sums[e].examples;
    }
  }
  return to_stats(merged, opts);
}

}  // namespace

std::vector<EpochStats> train_decoder(TopicDecoder& decoder, const std::vector<TrainingExample>& examples,
                                      const TrainOptions& opts) {
  return train_impl(decoder, examples, opts, 0.0);
}

std::vector<EpochStats> train_conditional(TopicDecoder& decoder, const std::vector<TrainingExample>& examples,
                                          const TrainOptions& opts) {
  if (decoder.config().variant != Variant::conditional) {
    throw ConfigError("train_conditional needs a conditional decoder, got " +
                      std::string(to_string(decoder.config().variant)));
  }
  return train_impl(decoder, examples, opts, opts.classifier_weight);
}

double evaluate_token_nll(const TopicDecoder& decoder, const std::vector<TrainingExample>& examples) {
  double nll = 0.0;
  std::size_t tokens = 0;
  for (const auto& ex : examples) {
    nc::Tape tape(&decoder.params(), false);
    LossParts parts;
    example_loss(tape, decoder, ex, 0.0, &parts);
    nll += parts.nll;
    tokens += parts.tokens;
  }
  return tokens ? nll / static_cast<double>(tokens) : 0.0;
}

}  // namespace artdesc::decoder
