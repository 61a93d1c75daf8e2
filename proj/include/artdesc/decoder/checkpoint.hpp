#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "artdesc/corpus/vocab.hpp"
#include "artdesc/decoder/model.hpp"
#include "artdesc/numcore/checkpoint.hpp"

namespace artdesc::decoder {

struct DecoderBundle {
  TopicDecoder model;
  corpus::Vocab vocab;
  std::uint64_t seed = 0;
};

/// Metadata: {"kind":"decoder","variant","config","vocab","vocab_digest","seed"}.
nc::Checkpoint to_checkpoint(const TopicDecoder& model, const corpus::Vocab& vocab, std::uint64_t seed);
/// Verifies kind, vocabulary digest and (when given) the expected variant;
/// throws ConfigError on any mismatch.
DecoderBundle from_checkpoint(const nc::Checkpoint& ckpt, std::optional<Variant> expected = std::nullopt);

void save_decoder(const std::filesystem::path& path, const TopicDecoder& model, const corpus::Vocab& vocab,
                  std::uint64_t seed);
DecoderBundle load_decoder(const std::filesystem::path& path, std::optional<Variant> expected = std::nullopt);

}  // namespace artdesc::decoder
