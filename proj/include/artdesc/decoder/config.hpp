#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "artdesc/corpus/types.hpp"
#include "json.hpp"

namespace artdesc::decoder {

enum class Variant { baseline, parallel, conditional };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view s);

/// Sizes default to desk scale; the published model used hidden = embed = 512
/// and a 20-wide topic embedding.
struct DecoderConfig {
  Variant variant = Variant::baseline;
  int vocab_size = 0;
  int feature_dim = 0;
  int hidden = 64;
  int embed = 64;
  int topic_embed = 8;
  int attention = 0;  // 0 means "same as hidden"
  int max_len = 24;
  int classifier_filters = 16;
  double init_scale = 0.08;

  int attention_width() const { return attention > 0 ? attention : hidden; }
  /// Throws ConfigError when a size is out of range.
  void validate() const;

  nlohmann::json to_json() const;
  static DecoderConfig from_json(const nlohmann::json& j);
};

/// Parameter-name prefix of the sub-decoder that serves `topic`.
/// Empty for the single-decoder variants.
std::string sub_decoder_prefix(Variant v, corpus::TopicLabel topic);

}  // namespace artdesc::decoder
