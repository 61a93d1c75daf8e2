#include "artdesc/decoder/checkpoint.hpp"

#include "artdesc/digest.hpp"
#include "artdesc/errors.hpp"
#include "json.hpp"

namespace artdesc::decoder {

using nlohmann::json;

nc::Checkpoint to_checkpoint(const TopicDecoder& model, const corpus::Vocab& vocab, std::uint64_t seed) {
  if (vocab.size() != model.config().vocab_size) throw ConfigError("vocabulary size does not match the decoder");
  json meta{{"kind", "decoder"},
            {"variant", std::string(to_string(model.config().variant))},
            {"config", model.config().to_json()},
            {"vocab", vocab.tokens()},
            {"vocab_digest", hex_digest(vocab.digest())},
            {"seed", seed}};
  return {meta.dump(), model.params()};
}

DecoderBundle from_checkpoint(const nc::Checkpoint& ckpt, std::optional<Variant> expected) {
  json meta;
  try {
    meta = json::parse(ckpt.metadata);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("decoder checkpoint metadata is not JSON: ") + e.what());
  }
  if (meta.value("kind", "") != "decoder") throw ConfigError("checkpoint is not a decoder checkpoint");
  const DecoderConfig config = DecoderConfig::from_json(meta.at("config"));
  if (expected && *expected != config.variant) {
    throw ConfigError("checkpoint holds a " + std::string(to_string(config.variant)) + " decoder, but " +
                      std::string(to_string(*expected)) + " was requested");
  }
  std::vector<std::string> tokens = meta.at("vocab").get<std::vector<std::string>>();
  const corpus::Vocab reserved;
  if (tokens.size() < reserved.tokens().size()) throw ConfigError("checkpoint vocabulary is truncated");
  corpus::Vocab vocab(std::vector<std::string>(tokens.begin() + reserved.size(), tokens.end()));
  if (vocab.tokens() != tokens || hex_digest(vocab.digest()) != meta.at("vocab_digest").get<std::string>()) {
    throw ConfigError("checkpoint vocabulary digest mismatch");
  }
  if (vocab.size() != config.vocab_size) throw ConfigError("checkpoint vocabulary size disagrees with its config");
  return {TopicDecoder(config, ckpt.params), std::move(vocab), meta.value("seed", std::uint64_t{0})};
}

void save_decoder(const std::filesystem::path& path, const TopicDecoder& model, const corpus::Vocab& vocab,
                  std::uint64_t seed) {
  nc::save_checkpoint(path, to_checkpoint(model, vocab, seed));
}

DecoderBundle load_decoder(const std::filesystem::path& path, std::optional<Variant> expected) {
  return from_checkpoint(nc::load_checkpoint(path), expected);
}

}  // namespace artdesc::decoder
