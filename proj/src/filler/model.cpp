#include "artdesc/filler/model.hpp"

#include <algorithm>
#include <cmath>

#include "artdesc/corpus/text.hpp"
#include "artdesc/digest.hpp"
#include "artdesc/errors.hpp"

namespace artdesc::filler {

using corpus::EntityType;
using corpus::Vocab;
using nc::Tape;
using nc::Var;

void FillerConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("filler config: ") + what);
  };
  need(vocab_size >= 1, "vocab_size must be >= 1");
  need(embed >= 1, "embed must be >= 1");
  need(hidden >= 1, "hidden must be >= 1");
  need(type_embed >= 1, "type_embed must be >= 1");
  need(candidate >= 1, "candidate must be >= 1");
  need(max_input_len >= 3, "max_input_len must be >= 3");
  need(init_scale > 0, "init_scale must be positive");
}

nlohmann::json FillerConfig::to_json() const {
  return {{"vocab_size", vocab_size}, {"embed", embed},
          {"hidden", hidden},         {"type_embed", type_embed},
          {"candidate", candidate},   {"max_input_len", max_input_len},
          {"init_scale", init_scale}};
}

FillerConfig FillerConfig::from_json(const nlohmann::json& j) {
  FillerConfig c;
  c.vocab_size = j.at("vocab_size").get<int>();
  c.embed = j.value("embed", c.embed);
  c.hidden = j.value("hidden", c.hidden);
  c.type_embed = j.value("type_embed", c.type_embed);
  c.candidate = j.value("candidate", c.candidate);
  c.max_input_len = j.value("max_input_len", c.max_input_len);
  c.init_scale = j.value("init_scale", c.init_scale);
  c.validate();
  return c;
}

std::vector<std::pair<std::string, std::pair<int, int>>> SlotFiller::parameter_shapes(const FillerConfig& c) {
  const int H = c.hidden;
  return {{"embed", {c.vocab_size, c.embed}},
          {"type_embed", {corpus::kEntityTypeCount, c.type_embed}},
          {"fwd.Wx", {4 * H, c.embed}},
          {"fwd.Wh", {4 * H, H}},
          {"fwd.b", {4 * H, 1}},
          {"bwd.Wx", {4 * H, c.embed}},
          {"bwd.Wh", {4 * H, H}},
          {"bwd.b", {4 * H, 1}},
          {"cand.W", {c.candidate, c.embed + c.type_embed}},
          {"cand.b", {c.candidate, 1}},
          {"score.B", {2 * H, c.candidate}}};
}

SlotFiller::SlotFiller(const FillerConfig& config, nc::Rng& rng) : config_(config) {
  config_.validate();
  for (const auto& [name, shape] : parameter_shapes(config_)) {
    if (name.size() > 2 && name.compare(name.size() - 2, 2, ".b") == 0) {
      params_.add(name, shape.first, shape.second);
    } else {
      params_.add_uniform(name, shape.first, shape.second, config_.init_scale, rng);
    }
  }
}

SlotFiller::SlotFiller(const FillerConfig& config, nc::ParamStore params) : config_(config), params_(std::move(params)) {
  config_.validate();
  const auto shapes = parameter_shapes(config_);
  if (shapes.size() != params_.size()) throw ConfigError("filler parameters do not match the configuration");
  for (const auto& [name, shape] : shapes) {
    if (!params_.contains(name)) throw ConfigError("filler checkpoint lacks parameter '" + name + "'");
    const auto& t = params_.value(name);
    if (t.rows() != shape.first || t.cols() != shape.second)
      throw ConfigError("filler parameter '" + name + "' has the wrong shape");
  }
}

std::vector<Var> SlotFiller::encode(Tape& tape, const std::vector<int>& ids) const {
  const auto n = ids.size();
  const nc::Tensor zero = nc::Tensor::Zero(config_.hidden, 1);
  Var embed = tape.param("embed");
  std::vector<Var> x;
  x.reserve(n);
  for (int id : ids) {
    if (id < 0 || id >= config_.vocab_size) throw std::invalid_argument("filler: token id outside the vocabulary");
    x.push_back(nc::row(embed, id));
  }
  std::vector<Var> fwd, bwd(n, tape.constant(zero));
  nc::LstmVars s{tape.constant(zero), tape.constant(zero)};
  for (std::size_t t = 0; t < n; ++t) {
    s = nc::lstm_cell(x[t], s, tape.param("fwd.Wx"), tape.param("fwd.Wh"), tape.param("fwd.b"));
    fwd.push_back(s.h);
  }
  s = {tape.constant(zero), tape.constant(zero)};
  for (std::size_t t = n; t-- > 0;) {
    s = nc::lstm_cell(x[t], s, tape.param("bwd.Wx"), tape.param("bwd.Wh"), tape.param("bwd.b"));
    bwd[t] = s.h;
  }
  std::vector<Var> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) out.push_back(nc::concat({fwd[t], bwd[t]}));
  return out;
}

Var SlotFiller::candidate(Tape& tape, const std::vector<int>& word_ids, EntityType type) const {
  if (word_ids.empty()) throw std::invalid_argument("filler: candidate without tokens");
  Var embed = tape.param("embed");
  Var sum = nc::row(embed, word_ids.front());
  for (std::size_t i = 1; i < word_ids.size(); ++i) sum = sum + nc::row(embed, word_ids[i]);
  Var mean = (1.0 / static_cast<double>(word_ids.size())) * sum;
  Var x = nc::concat({mean, nc::row(tape.param("type_embed"), static_cast<int>(type))});
  return nc::tanh(nc::matmul(tape.param("cand.W"), x) + tape.param("cand.b"));
}

Var SlotFiller::scores(Tape& tape, Var slot_state, const std::vector<Var>& candidates) const {
  Var projected = nc::matmul_tn(tape.param("score.B"), slot_state);  // C x 1
  return nc::matmul(nc::stack_rows(candidates), projected);
}

std::vector<int> y_ids(const FillInput& input, const Vocab& vocab) {
  std::vector<int> ids;
  ids.reserve(input.sep + 1);
  for (std::size_t i = 0; i <= input.sep; ++i) {
    if (i == 0) {
      ids.push_back(Vocab::kStart);
    } else if (i == input.sep) {
      ids.push_back(Vocab::kEnd);
    } else {
      ids.push_back(vocab.index(input.tokens[i]));
    }
  }
  return ids;
}

std::vector<int> candidate_ids(const std::string& surface, const Vocab& vocab) {
  std::vector<int> ids;
  for (const auto& t : corpus::tokenize(corpus::to_lower(surface))) ids.push_back(vocab.index(t));
  if (ids.empty()) ids.push_back(Vocab::kUnknown);
  return ids;
}

std::vector<FillExample> make_fill_examples(const std::vector<corpus::PaintingRecord>& records, std::size_t max_len) {
  std::vector<FillExample> out;
  for (const auto& rec : records) {
    CandidateSet g;
    for (const char* key : corpus::kAttributeKeys) {
      auto it = rec.attributes.find(key);
      if (it != rec.attributes.end()) g.add({it->second, attribute_entity_type(key), CandidateSource::attribute});
    }
    for (const auto& s : rec.sentences) {
      std::size_t v = 0;
      for (const auto& t : s.masked.tokens)
        if (t.is_slot()) g.add({s.values.at(v++), *t.slot, CandidateSource::article});
    }
    for (const auto& s : rec.sentences) {
      if (s.masked.slot_count() == 0) continue;
      out.push_back({encode_fill_input({s.masked}, g, max_len), s.values});
    }
  }
  return out;
}

Vocab build_filler_vocab(const std::vector<FillExample>& examples, int min_freq) {
  std::vector<corpus::MaskedSentence> texts;
  for (const auto& ex : examples) {
    const auto decoded = decode_fill_input(ex.input);
    texts.push_back({decoded.y, corpus::TopicLabel::context});
    for (const auto& c : decoded.candidates.entries()) {
      corpus::MaskedSentence words;
      for (const auto& t : corpus::tokenize(corpus::to_lower(c.surface))) words.tokens.push_back(corpus::Token::make_word(t));
      texts.push_back(std::move(words));
    }
  }
  return corpus::build_vocab(texts, min_freq);
}

namespace {

struct SlotScores {
  std::vector<std::size_t> compatible;  // indices into input.candidates
  std::optional<Var> logits;            // |compatible| x 1
};

// Per slot, scores of its type-compatible candidates.
std::vector<SlotScores> score_input(Tape& tape, const SlotFiller& model, const Vocab& vocab, const FillInput& in) {
  const auto states = model.encode(tape, y_ids(in, vocab));
  std::vector<std::optional<Var>> reprs(in.candidates.size());
  std::vector<SlotScores> out;
  for (std::size_t s = 0; s < in.slot_positions.size(); ++s) {
    SlotScores slot;
    std::vector<Var> cands;
    for (std::size_t j = 0; j < in.candidates.size(); ++j) {
      if (in.candidates[j].type != in.slot_types[s]) continue;
      if (!reprs[j]) reprs[j] = model.candidate(tape, candidate_ids(in.candidates[j].surface, vocab), in.candidates[j].type);
      slot.compatible.push_back(j);
      cands.push_back(*reprs[j]);
    }
    if (!cands.empty()) slot.logits = model.scores(tape, states[in.slot_positions[s]], cands);
    out.push_back(std::move(slot));
  }
  return out;
}

}  // namespace

Var fill_loss(Tape& tape, const SlotFiller& model, const Vocab& vocab, const FillExample& ex, FillLossStats* stats) {
  if (ex.targets.size() != ex.input.slot_positions.size())
    throw DataError("fill example has " + std::to_string(ex.targets.size()) + " targets for " +
                    std::to_string(ex.input.slot_positions.size()) + " slots");
  FillLossStats local;
  Var loss = tape.constant(nc::Tensor::Zero(1, 1));
  const auto slots = score_input(tape, model, vocab, ex.input);
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (slots[s].compatible.empty()) {
      ++local.no_candidate;
      continue;
    }
    std::optional<Eigen::Index> target;
    for (std::size_t k = 0; k < slots[s].compatible.size(); ++k)
      if (ex.input.candidates[slots[s].compatible[k]].surface == ex.targets[s]) target = static_cast<Eigen::Index>(k);
    if (!target) {
      ++local.unreachable;
      continue;
    }
    loss = loss + nc::cross_entropy(*slots[s].logits, *target);
    ++local.scored;
  }
  local.loss = loss.scalar();
  if (stats) *stats = local;
  return loss;
}

std::vector<FillEpochStats> train_filler(SlotFiller& model, const Vocab& vocab, const std::vector<FillExample>& examples,
                                         const FillTrainOptions& opts) {
  if (opts.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (vocab.size() != model.config().vocab_size) throw ConfigError("filler vocabulary size does not match the model");
  nc::ParamStore& store = model.params();
  nc::Rng rng(opts.seed);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<FillEpochStats> history;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(order);
    FillEpochStats st;
    st.epoch = epoch;
    st.lr = opts.schedule.at(epoch);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(opts.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(opts.batch_size));
      const double scale = 1.0 / static_cast<double>(end - start);
      store.zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        Tape tape(&store);
        FillLossStats ls;
        Var loss = fill_loss(tape, model, vocab, examples[order[k]], &ls);
        total += ls.loss;
        st.scored += ls.scored;
        st.skipped += ls.no_candidate + ls.unreachable;
        tape.backward(scale * loss, store);
      }
      nc::adam_step(store, {st.lr, opts.beta1, opts.beta2, opts.eps});
    }
    st.slot_loss = st.scored ? total / static_cast<double>(st.scored) : 0.0;
    history.push_back(st);
    if (opts.on_epoch) opts.on_epoch(st);
  }
  return history;
}

std::string unknown_placeholder(EntityType type) { return "[unknown-" + std::string(corpus::to_string(type)) + "]"; }

FillResult fill_slots(const SlotFiller& model, const Vocab& vocab, const std::vector<corpus::MaskedSentence>& masked,
                      const CandidateSet& candidates) {
  FillResult result;
  for (std::size_t si = 0; si < masked.size(); ++si) {
    const auto& sentence = masked[si];
    const FillInput in =
        encode_fill_input({sentence}, candidates, static_cast<std::size_t>(model.config().max_input_len));
    result.warnings.insert(result.warnings.end(), in.warnings.begin(), in.warnings.end());
    Tape tape(&model.params(), false);
    const auto slots = score_input(tape, model, vocab, in);

    std::vector<std::string> out;
    std::size_t slot = 0;
    for (std::size_t ti = 0; ti < sentence.tokens.size(); ++ti) {
      const auto& tok = sentence.tokens[ti];
      if (!tok.is_slot()) {
        out.push_back(tok.word);
        continue;
      }
      SlotDecision d;
      d.sentence = si;
      d.token = ti;
      d.type = *tok.slot;
      const auto& sc = slots[slot++];
      if (sc.compatible.empty()) {
        out.push_back(unknown_placeholder(*tok.slot));
        result.warnings.push_back("no " + std::string(corpus::to_string(*tok.slot)) + " candidate for sentence " +
                                  std::to_string(si) + " token " + std::to_string(ti));
      } else {
        const nc::Tensor& logits = sc.logits->value();
        std::size_t best = 0;
        for (std::size_t k = 1; k < sc.compatible.size(); ++k) {
          const double a = logits(static_cast<Eigen::Index>(k), 0), b = logits(static_cast<Eigen::Index>(best), 0);
          if (a > b || (a == b && in.candidates[sc.compatible[k]].surface < in.candidates[sc.compatible[best]].surface))
            best = k;
        }
        const nc::Vector p = nc::softmax(nc::Vector(logits.col(0)));
        d.choice = in.candidates[sc.compatible[best]];
        d.probability = p(static_cast<Eigen::Index>(best));
        out.push_back(d.choice->surface);
      }
      result.decisions.push_back(std::move(d));
    }
    if (!result.text.empty()) result.text += " ";
    result.text += corpus::join(out, " ");
    result.sentences.push_back(std::move(out));
  }
  return result;
}

nc::Checkpoint to_checkpoint(const SlotFiller& model, const Vocab& vocab, std::uint64_t seed) {
  if (vocab.size() != model.config().vocab_size) throw ConfigError("vocabulary size does not match the filler");
  nlohmann::json meta{{"kind", "filler"},
                      {"config", model.config().to_json()},
                      {"vocab", vocab.tokens()},
                      {"vocab_digest", hex_digest(vocab.digest())},
                      {"seed", seed}};
  return {meta.dump(), model.params()};
}

FillerBundle filler_from_checkpoint(const nc::Checkpoint& ckpt) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ckpt.metadata);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("filler checkpoint metadata is not JSON: ") + e.what());
  }
  if (meta.value("kind", "") != "filler") throw ConfigError("checkpoint is not a filler checkpoint");
  const FillerConfig config = FillerConfig::from_json(meta.at("config"));
  const auto tokens = meta.at("vocab").get<std::vector<std::string>>();
  const Vocab reserved;
  if (tokens.size() < reserved.tokens().size()) throw ConfigError("checkpoint vocabulary is truncated");
  Vocab vocab(std::vector<std::string>(tokens.begin() + reserved.size(), tokens.end()));
  if (vocab.tokens() != tokens || hex_digest(vocab.digest()) != meta.at("vocab_digest").get<std::string>())
    throw ConfigError("checkpoint vocabulary digest mismatch");
  if (vocab.size() != config.vocab_size) throw ConfigError("checkpoint vocabulary size disagrees with its config");
  return {SlotFiller(config, ckpt.params), std::move(vocab), meta.value("seed", std::uint64_t{0})};
}

void save_filler(const std::filesystem::path& path, const SlotFiller& model, const Vocab& vocab, std::uint64_t seed) {
  nc::save_checkpoint(path, to_checkpoint(model, vocab, seed));
}

FillerBundle load_filler(const std::filesystem::path& path) { return filler_from_checkpoint(nc::load_checkpoint(path)); }

}  // namespace artdesc::filler
