#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "artdesc/corpus/reader.hpp"
#include "artdesc/corpus/tagger.hpp"
#include "artdesc/decoder/checkpoint.hpp"
#include "artdesc/decoder/search.hpp"
#include "artdesc/filler/model.hpp"
#include "artdesc/metrics/metrics.hpp"
#include "artdesc/pipeline/config.hpp"
#include "artdesc/pipeline/log.hpp"
#include "artdesc/retriever/index.hpp"
#include "artdesc/retriever/query.hpp"
#include "artdesc/retriever/recall.hpp"
#include "json.hpp"

namespace artdesc::pipeline {

/// Gazetteer from the config (empty tagger when none is configured; the
/// date/ordinal/number patterns still apply).
std::unique_ptr<corpus::GazetteerTagger> make_tagger(const PipelineConfig& cfg);
retriever::Blocklist make_blocklist(const PipelineConfig& cfg);

/// Adds "config_digest" to a checkpoint's metadata document.
nc::Checkpoint stamp(nc::Checkpoint ckpt, const PipelineConfig& cfg);
/// Digest recorded in an artifact's metadata, or empty.
std::string recorded_digest(const std::string& metadata);

// ---- preprocess -------------------------------------------------------------

struct PreprocessReport {
  std::size_t paintings = 0;
  std::size_t sentences = 0;
  std::size_t slots = 0;
  std::size_t untopiced = 0;  // sentences without a topic annotation
  std::map<std::string, std::size_t> per_topic;
  std::map<std::string, std::size_t> per_type;

  nlohmann::json to_json() const;
};

PreprocessReport summarize(const std::vector<corpus::PaintingRecord>& records);

/// Raw JSONL in, masked JSONL out. Entities come from the records themselves
/// where given, otherwise from the configured tagger.
PreprocessReport preprocess(const PipelineConfig& cfg, const std::filesystem::path& raw,
                            const std::filesystem::path& out, const Logger& log);

// ---- training ---------------------------------------------------------------

/// Configured corpus, with features when asked; throws MissingArtifactError
/// naming `stage` when an input is absent.
std::vector<corpus::PaintingRecord> load_training_corpus(const PipelineConfig& cfg, const std::string& stage,
                                                         bool with_features);

struct TrainReport {
  std::filesystem::path checkpoint;
  std::size_t examples = 0;
  int vocab_size = 0;
  double final_loss = 0.0;
};

/// Trains the configured decoder variant and writes cfg.decoder_checkpoint().
TrainReport train_decoder_stage(const PipelineConfig& cfg, const Logger& log);
/// Trains the slot filler and writes cfg.filler_checkpoint().
TrainReport train_filler_stage(const PipelineConfig& cfg, const Logger& log);

// ---- retrieval --------------------------------------------------------------

/// Builds and saves the index; metadata records the config digest and seed.
retriever::TfIdfIndex build_index(const PipelineConfig& cfg, const std::filesystem::path& articles,
                                  const std::filesystem::path& out, const Logger& log);

/// Painting metadata used for querying: {"attributes": {...}, "objects": [...]}
/// or a full corpus record.
struct PaintingMeta {
  std::string id;
  std::map<std::string, std::string> attributes;
  std::vector<std::string> objects;
  std::string reference;
};

PaintingMeta parse_meta(const nlohmann::json& j);
PaintingMeta load_meta(const std::filesystem::path& path);

/// Top-k retrieval for each painting, keyed by painting id.
retriever::Rankings rank_paintings(const std::vector<corpus::PaintingRecord>& records,
                                   const retriever::TfIdfIndex& index, int k,
                                   const retriever::Blocklist& blocklist);

// ---- describe ---------------------------------------------------------------

struct Models {
  decoder::DecoderBundle decoder;
  filler::FillerBundle filler;
  std::optional<retriever::TfIdfIndex> index;  // external-corpus mode
  std::map<std::string, std::string> bodies;   // article id -> body
  nlohmann::json artifacts = nlohmann::json::object();  // what was loaded, with recorded digests
  std::vector<std::string> warnings;
};

/// Loads checkpoints, index and article bodies as the knowledge mode requires.
Models load_models(const PipelineConfig& cfg, const Logger& log);

struct DescribeOptions {
  int beam_size = 5;
  int max_len = 0;  // 0: the decoder's own limit
  int k = 5;
  KnowledgeMode knowledge_mode = KnowledgeMode::external_corpus;
  std::optional<corpus::TopicLabel> topic;  // generate only this topic
  retriever::Blocklist blocklist = retriever::default_blocklist();
  const corpus::Tagger* tagger = nullptr;  // required
};

DescribeOptions describe_options(const PipelineConfig& cfg, const corpus::Tagger& tagger);

struct DescribeInput {
  PaintingMeta meta;
  corpus::FeatureGrid grid;
};

struct Description {
  std::string id;
  std::string text;
  std::vector<corpus::MaskedSentence> masked;  // content, form, context order
  std::vector<std::vector<std::string>> filled;
  std::string query;
  std::vector<retriever::ScoredArticle> articles;
  std::size_t slots = 0;
  std::size_t placeholders = 0;
  std::vector<std::string> warnings;

  /// {id, text, sentences, query, articles, slots, placeholders, warnings}
  nlohmann::json to_json() const;
};

/// Decode per topic, compose, retrieve, extract candidates, fill.
Description describe(const DescribeInput& input, const Models& models, const DescribeOptions& opts);

/// Provenance block attached to describe output.
nlohmann::json provenance(const PipelineConfig& cfg, const Models& models);

// ---- evaluation -------------------------------------------------------------

struct Prediction {
  std::string id;
  std::string text;
  std::vector<std::string> topics;  // one per generated sentence
  std::size_t slots = 0;
  std::size_t placeholders = 0;
};

std::vector<Prediction> load_predictions(const std::filesystem::path& path);
/// Reference paragraphs by id: corpus records ("reference", or the joined
/// sentences) or {"id", "text"} lines.
std::map<std::string, std::string> load_references(const std::filesystem::path& path);

struct EvaluationReport {
  std::size_t paintings = 0;
  double bleu4 = 0.0;
  double rouge_l = 0.0;  // mean over paintings
  double placeholder_rate = 0.0;
  std::map<std::string, std::size_t> per_topic;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Throws DataError listing prediction ids that have no reference.
EvaluationReport evaluate(const std::vector<Prediction>& predictions,
                          const std::map<std::string, std::string>& references);

// ---- filling without decoding -----------------------------------------------

/// One masked sentence per non-empty line, tokens separated by whitespace,
/// slots written as "[person]", "[date]", ...
std::vector<corpus::MaskedSentence> parse_masked_text(const std::string& text);

}  // namespace artdesc::pipeline
