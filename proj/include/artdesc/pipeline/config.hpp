#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "artdesc/corpus/types.hpp"
#include "artdesc/decoder/config.hpp"
#include "artdesc/filler/model.hpp"
#include "json.hpp"

namespace artdesc::pipeline {

enum class KnowledgeMode { external_corpus, reference_oracle };

std::string_view to_string(KnowledgeMode m);
std::optional<KnowledgeMode> parse_knowledge_mode(std::string_view s);

struct TrainingConfig {
  int epochs = 20;
  int batch_size = 32;
  double lr = 5e-4;
  double lr_decay = 0.8;
  int lr_every = 10;
  double classifier_weight = 1.0;  // conditional decoder only

  nlohmann::json to_json() const;
  /// Missing keys keep the value from `base`.
  static TrainingConfig from_json(const nlohmann::json& j, TrainingConfig base);
};

/// Everything one run of the pipeline needs. Paths are absolute after
/// loading (relative entries resolve against the config file's directory).
struct PipelineConfig {
  std::filesystem::path corpus;       // preprocessed corpus JSONL
  std::filesystem::path features;     // directory of <id>.feat files
  std::filesystem::path gazetteer;    // "surface<TAB>type" lines; optional
  std::filesystem::path knowledge;    // article directory or JSONL
  std::filesystem::path blocklist;    // optional; shipped list when empty
  std::filesystem::path checkpoints = "checkpoints";
  std::filesystem::path index;        // defaults to <checkpoints>/index.bin

  decoder::DecoderConfig decoder;     // vocab_size / feature_dim are filled in at training time
  TrainingConfig decoder_training;
  filler::FillerConfig filler;
  TrainingConfig filler_training{30, 16, 5e-3, 1.0, 10, 0.0};

  std::uint64_t seed = 0;
  int k = 5;
  int beam_size = 5;
  int min_freq = 1;
  KnowledgeMode knowledge_mode = KnowledgeMode::external_corpus;

  nlohmann::json to_json() const;
  /// Unknown keys are rejected (ConfigError) so typos do not pass silently.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  /// FNV-1a digest of the canonical JSON form without the path entries (a
  /// project keeps its digest when moved), as 16 hex digits.
  std::string digest() const;

  std::filesystem::path decoder_checkpoint() const;
  std::filesystem::path filler_checkpoint() const;
  std::filesystem::path index_path() const;
};

/// Throws MissingArtifactError when the file is absent and ConfigError when it
/// is not valid.
PipelineConfig load_config(const std::filesystem::path& path);

/// Throws MissingArtifactError naming `stage` when `path` is empty or missing.
void require_path(const std::filesystem::path& path, const std::string& stage, const std::string& what);

}  // namespace artdesc::pipeline
