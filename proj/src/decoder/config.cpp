#include "artdesc/decoder/config.hpp"

#include "artdesc/errors.hpp"

namespace artdesc::decoder {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::parallel: return "parallel";
    case Variant::conditional: return "conditional";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "baseline") return Variant::baseline;
  if (s == "parallel") return Variant::parallel;
  if (s == "conditional") return Variant::conditional;
  return std::nullopt;
}

void DecoderConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("decoder config: ") + what);
  };
  need(vocab_size >= 1, "vocab_size must be >= 1");
  need(feature_dim >= 1, "feature_dim must be >= 1");
  need(hidden >= 1, "hidden must be >= 1");
  need(embed >= 1, "embed must be >= 1");
  need(topic_embed >= 1, "topic_embed must be >= 1");
  need(attention >= 0, "attention must be >= 0");
  need(max_len >= 2, "max_len must be >= 2");
  need(classifier_filters >= 1, "classifier_filters must be >= 1");
  need(init_scale > 0, "init_scale must be positive");
}

nlohmann::json DecoderConfig::to_json() const {
  return {{"variant", std::string(to_string(variant))},
          {"vocab_size", vocab_size},
          {"feature_dim", feature_dim},
          {"hidden", hidden},
          {"embed", embed},
          {"topic_embed", topic_embed},
          {"attention", attention},
          {"max_len", max_len},
          {"classifier_filters", classifier_filters},
          {"init_scale", init_scale}};
}

DecoderConfig DecoderConfig::from_json(const nlohmann::json& j) {
  DecoderConfig c;
  const auto v = parse_variant(j.at("variant").get<std::string>());
  if (!v) throw ConfigError("decoder config: unknown variant");
  c.variant = *v;
  c.vocab_size = j.at("vocab_size").get<int>();
  c.feature_dim = j.at("feature_dim").get<int>();
  c.hidden = j.value("hidden", c.hidden);
  c.embed = j.value("embed", c.embed);
  c.topic_embed = j.value("topic_embed", c.topic_embed);
  c.attention = j.value("attention", c.attention);
  c.max_len = j.value("max_len", c.max_len);
  c.classifier_filters = j.value("classifier_filters", c.classifier_filters);
  c.init_scale = j.value("init_scale", c.init_scale);
  c.validate();
  return c;
}

std::string sub_decoder_prefix(Variant v, corpus::TopicLabel topic) {
  if (v != Variant::parallel) return {};
  return std::string(corpus::to_string(topic)) + "/";
}

}  // namespace artdesc::decoder
