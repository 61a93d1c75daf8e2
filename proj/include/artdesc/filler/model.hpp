#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "artdesc/corpus/types.hpp"
#include "artdesc/corpus/vocab.hpp"
#include "artdesc/filler/input.hpp"
#include "artdesc/numcore/adam.hpp"
#include "artdesc/numcore/checkpoint.hpp"
#include "artdesc/numcore/param_store.hpp"
#include "artdesc/numcore/random.hpp"
#include "artdesc/numcore/tape.hpp"
#include "json.hpp"

namespace artdesc::filler {

struct FillerConfig {
  int vocab_size = 0;
  int embed = 32;
  int hidden = 32;  // per direction
  int type_embed = 8;
  int candidate = 32;
  int max_input_len = 512;
  double init_scale = 0.1;

  /// Throws ConfigError.
  void validate() const;
  nlohmann::json to_json() const;
  static FillerConfig from_json(const nlohmann::json& j);
};

/// Slot filler over the [CLS] y [SEP] k layout.
///   states  h_t = [LSTM_fwd; LSTM_bwd] over the ids of [CLS] y [SEP]
///   cand    c_j = tanh(Wc [mean word embedding of surface_j; E_type(type_j)] + bc)
///   score   s_ij = h_{slot i}^T B c_j
/// A slot chooses among candidates of its own entity type only; candidates are
/// encoded without position, so the ranking ignores their order in k.
class SlotFiller {
 public:
  SlotFiller(const FillerConfig& config, nc::Rng& rng);
  SlotFiller(const FillerConfig& config, nc::ParamStore params);

  const FillerConfig& config() const { return config_; }
  const nc::ParamStore& params() const { return params_; }
  nc::ParamStore& params() { return params_; }

  std::vector<nc::Var> encode(nc::Tape& tape, const std::vector<int>& ids) const;
  nc::Var candidate(nc::Tape& tape, const std::vector<int>& word_ids, corpus::EntityType type) const;
  /// Scores of `slot_state` against each candidate representation (J x 1).
  nc::Var scores(nc::Tape& tape, nc::Var slot_state, const std::vector<nc::Var>& candidates) const;

  static std::vector<std::pair<std::string, std::pair<int, int>>> parameter_shapes(const FillerConfig& config);

 private:
  FillerConfig config_;
  nc::ParamStore params_;
};

/// Ids of [CLS] y [SEP] ([CLS] and [SEP] map to <start> and <end>).
std::vector<int> y_ids(const FillInput& input, const corpus::Vocab& vocab);
/// Lowercased word ids of a candidate surface (empty surfaces map to <unk>).
std::vector<int> candidate_ids(const std::string& surface, const corpus::Vocab& vocab);

struct FillExample {
  FillInput input;
  std::vector<std::string> targets;  // original value per slot
};

/// One example per sentence with slots. Candidates come from the whole
/// paragraph: the painting's typed attributes plus every entity value in any
/// of its sentences.
std::vector<FillExample> make_fill_examples(const std::vector<corpus::PaintingRecord>& records,
                                            std::size_t max_len = 512);
corpus::Vocab build_filler_vocab(const std::vector<FillExample>& examples, int min_freq = 1);

struct FillLossStats {
  double loss = 0.0;
  std::size_t scored = 0;         // slots that contributed a term
  std::size_t no_candidate = 0;   // no candidate of the slot's type
  std::size_t unreachable = 0;    // target value not among the compatible candidates
};

/// Sum over slots of cross-entropy among the type-compatible candidates.
nc::Var fill_loss(nc::Tape& tape, const SlotFiller& model, const corpus::Vocab& vocab, const FillExample& ex,
                  FillLossStats* stats = nullptr);

struct FillEpochStats {
  int epoch = 0;
  double lr = 0.0;
  double slot_loss = 0.0;  // mean over scored slots
  std::size_t scored = 0;
  std::size_t skipped = 0;
};

struct FillTrainOptions {
  int epochs = 1;
  int batch_size = 16;
  nc::LrSchedule schedule{};
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  std::function<void(const FillEpochStats&)> on_epoch;
};

std::vector<FillEpochStats> train_filler(SlotFiller& model, const corpus::Vocab& vocab,
                                         const std::vector<FillExample>& examples, const FillTrainOptions& opts);

struct SlotDecision {
  std::size_t sentence = 0;
  std::size_t token = 0;  // index within the sentence
  corpus::EntityType type = corpus::EntityType::misc;
  std::optional<Candidate> choice;
  double probability = 0.0;  // softmax mass of the choice among compatible candidates
};

/// Placeholder for slots without a compatible candidate: "[unknown-date]".
std::string unknown_placeholder(corpus::EntityType type);

struct FillResult {
  std::vector<std::vector<std::string>> sentences;  // one unit per input token
  std::vector<SlotDecision> decisions;
  std::vector<std::string> warnings;
  std::string text;  // sentences joined with spaces
};

/// Each sentence is encoded on its own with the full candidate set. Non-slot
/// tokens are copied verbatim. Ties go to the lexicographically smaller surface.
FillResult fill_slots(const SlotFiller& model, const corpus::Vocab& vocab,
                      const std::vector<corpus::MaskedSentence>& masked, const CandidateSet& candidates);

struct FillerBundle {
  SlotFiller model;
  corpus::Vocab vocab;
  std::uint64_t seed = 0;
};

nc::Checkpoint to_checkpoint(const SlotFiller& model, const corpus::Vocab& vocab, std::uint64_t seed);
FillerBundle filler_from_checkpoint(const nc::Checkpoint& ckpt);
void save_filler(const std::filesystem::path& path, const SlotFiller& model, const corpus::Vocab& vocab,
                 std::uint64_t seed);
FillerBundle load_filler(const std::filesystem::path& path);

}  // namespace artdesc::filler
