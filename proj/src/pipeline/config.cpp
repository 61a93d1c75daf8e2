#include "artdesc/pipeline/config.hpp"

#include <fstream>
#include <set>

#include "artdesc/digest.hpp"
#include "artdesc/errors.hpp"

namespace artdesc::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(KnowledgeMode m) {
  return m == KnowledgeMode::external_corpus ? "external-corpus" : "reference-as-oracle";
}

std::optional<KnowledgeMode> parse_knowledge_mode(std::string_view s) {
  if (s == "external-corpus") return KnowledgeMode::external_corpus;
  if (s == "reference-as-oracle") return KnowledgeMode::reference_oracle;
  return std::nullopt;
}

json TrainingConfig::to_json() const {
  return {{"epochs", epochs},     {"batch_size", batch_size}, {"lr", lr},
          {"lr_decay", lr_decay}, {"lr_every", lr_every},     {"classifier_weight", classifier_weight}};
}

TrainingConfig TrainingConfig::from_json(const json& j, TrainingConfig c) {
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.lr_decay = j.value("lr_decay", c.lr_decay);
  c.lr_every = j.value("lr_every", c.lr_every);
  c.classifier_weight = j.value("classifier_weight", c.classifier_weight);
  if (c.epochs < 0 || c.batch_size < 1 || c.lr <= 0 || c.lr_decay <= 0 || c.lr_every < 1)
    throw ConfigError("training config out of range");
  return c;
}

namespace {

fs::path resolve(const json& j, const char* key, const fs::path& base, const fs::path& fallback = {}) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback.empty() || fallback.is_absolute() || base.empty()
                                                           ? fallback
                                                           : base / fallback;
  fs::path p = j.at(key).get<std::string>();
  if (p.empty()) return p;
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string str(const fs::path& p) { return p.string(); }

}  // namespace

json PipelineConfig::to_json() const {
  json d = decoder.to_json();
  d.erase("vocab_size");
  d.erase("feature_dim");
  json f = filler.to_json();
  f.erase("vocab_size");
  return {{"corpus", str(corpus)},
          {"features", str(features)},
          {"gazetteer", str(gazetteer)},
          {"knowledge", str(knowledge)},
          {"blocklist", str(blocklist)},
          {"checkpoints", str(checkpoints)},
          {"index", str(index)},
          {"decoder", d},
          {"decoder_training", decoder_training.to_json()},
          {"filler", f},
          {"filler_training", filler_training.to_json()},
          {"seed", seed},
          {"k", k},
          {"beam_size", beam_size},
          {"min_freq", min_freq},
          {"knowledge_mode", std::string(to_string(knowledge_mode))}};
}

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base) {
  static const std::set<std::string> known{"corpus",   "features",         "gazetteer", "knowledge",       "blocklist",
                                           "checkpoints", "index",         "decoder",   "decoder_training", "filler",
                                           "filler_training", "seed",      "k",         "beam_size",       "min_freq",
                                           "knowledge_mode"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  try {
    PipelineConfig c;
    c.corpus = resolve(j, "corpus", base);
    c.features = resolve(j, "features", base);
    c.gazetteer = resolve(j, "gazetteer", base);
    c.knowledge = resolve(j, "knowledge", base);
    c.blocklist = resolve(j, "blocklist", base);
    c.checkpoints = resolve(j, "checkpoints", base, "checkpoints");
    c.index = resolve(j, "index", base);
    if (j.contains("decoder")) {
      json d = j.at("decoder");
      d["vocab_size"] = 1;
      d["feature_dim"] = 1;
      if (!d.contains("variant")) d["variant"] = "parallel";
      c.decoder = decoder::DecoderConfig::from_json(d);
    } else {
      c.decoder.variant = decoder::Variant::parallel;
    }
    c.decoder.vocab_size = 0;
    c.decoder.feature_dim = 0;
    if (j.contains("filler")) {
      json f = j.at("filler");
      f["vocab_size"] = 1;
      c.filler = filler::FillerConfig::from_json(f);
    }
    c.filler.vocab_size = 0;
    if (j.contains("decoder_training"))
      c.decoder_training = TrainingConfig::from_json(j.at("decoder_training"), c.decoder_training);
    if (j.contains("filler_training"))
      c.filler_training = TrainingConfig::from_json(j.at("filler_training"), c.filler_training);
    c.seed = j.value("seed", c.seed);
    c.k = j.value("k", c.k);
    c.beam_size = j.value("beam_size", c.beam_size);
    c.min_freq = j.value("min_freq", c.min_freq);
    if (j.contains("knowledge_mode")) {
      const auto m = parse_knowledge_mode(j.at("knowledge_mode").get<std::string>());
      if (!m) throw ConfigError("knowledge_mode must be 'external-corpus' or 'reference-as-oracle'");
      c.knowledge_mode = *m;
    }
    if (c.k < 1) throw ConfigError("k must be >= 1");
    if (c.beam_size < 1) throw ConfigError("beam_size must be >= 1");
    if (c.min_freq < 1) throw ConfigError("min_freq must be >= 1");
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
  }
}

std::string PipelineConfig::digest() const {
  json j = to_json();
  for (const char* key : {"corpus", "features", "gazetteer", "knowledge", "blocklist", "checkpoints", "index"})
    j.erase(key);
  return hex_digest(fnv1a64(j.dump()));
}

fs::path PipelineConfig::decoder_checkpoint() const {
  return checkpoints / ("decoder-" + std::string(decoder::to_string(decoder.variant)) + ".ckpt");
}

fs::path PipelineConfig::filler_checkpoint() const { return checkpoints / "filler.ckpt"; }

fs::path PipelineConfig::index_path() const { return index.empty() ? checkpoints / "index.bin" : index; }

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("config", "cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return PipelineConfig::from_json(j, fs::absolute(path).parent_path());
}

void require_path(const fs::path& path, const std::string& stage, const std::string& what) {
  if (path.empty()) throw MissingArtifactError(stage, what + " is not configured");
  if (!fs::exists(path)) throw MissingArtifactError(stage, what + " not found at '" + path.string() + "'");
}

}  // namespace artdesc::pipeline
