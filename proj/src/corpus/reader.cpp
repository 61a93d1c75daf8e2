#include "artdesc/corpus/reader.hpp"

#include <fstream>

#include "artdesc/corpus/features.hpp"
#include "artdesc/corpus/masking.hpp"
#include "artdesc/corpus/text.hpp"
#include "artdesc/errors.hpp"
#include "json.hpp"

namespace artdesc::corpus {

using nlohmann::json;

namespace {

std::string get_string(const json& j, const char* key, const std::string& fallback = {}) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

std::filesystem::path feature_path(const std::filesystem::path& dir, const std::string& id) {
  return dir / (id + ".feat");
}

namespace {

PaintingRecord parse_object(const json& j, const LoadOptions& opts);

}  // namespace

PaintingRecord parse_record(const std::string& json_line, const LoadOptions& opts) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("corpus line is not valid JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw DataError("corpus line must be a JSON object");
  try {
    return parse_object(j, opts);
  } catch (const json::exception& e) {
    throw DataError(std::string("corpus record has a field of the wrong type: ") + e.what());
  }
}

namespace {

PaintingRecord parse_object(const json& j, const LoadOptions& opts) {
  PaintingRecord rec;
  rec.id = get_string(j, "id");
  if (rec.id.empty()) throw DataError("corpus record without id");

  for (const char* key : kAttributeKeys) rec.attributes[key] = "";
  if (auto it = j.find("attributes"); it != j.end() && !it->is_null()) {
    for (const auto& [k, v] : it->items()) {
      if (!rec.attributes.count(k)) throw DataError("record '" + rec.id + "': unknown attribute key '" + k + "'");
      rec.attributes[k] = v.is_null() ? "" : v.get<std::string>();
    }
  }
  if (auto it = j.find("objects"); it != j.end() && !it->is_null()) {
    for (const auto& o : *it) rec.objects.push_back(o.get<std::string>());
  }

  // Raw form: one "description" string, optionally with a "topics" array
  // aligned to its sentences.
  json sentences = j.value("sentences", json::array());
  if (!j.contains("sentences") && j.contains("description")) {
    const auto split = split_sentences(j.at("description").get<std::string>());
    const json topics = j.value("topics", json());
    if (!topics.is_null() && topics.size() != split.size()) {
      throw DataError("record '" + rec.id + "': " + std::to_string(topics.size()) + " topics for " +
                      std::to_string(split.size()) + " sentences");
    }
    for (std::size_t i = 0; i < split.size(); ++i)
      sentences.push_back({{"text", split[i]}, {"topic", topics.is_null() ? json(nullptr) : topics[i]}});
  }

  std::vector<std::string> texts;
  {
    for (const auto& s : sentences) {
      SentenceEntry entry;
      entry.raw = get_string(s, "text");
      const std::vector<std::string> tokens = tokenize(entry.raw);
      if (tokens.size() < std::max<std::size_t>(opts.min_sentence_tokens, 1)) continue;

      const std::string topic = get_string(s, "topic");
      TopicLabel label = TopicLabel::context;
      if (topic.empty()) {
        entry.has_topic = false;
      } else if (auto t = parse_topic(topic)) {
        label = *t;
      } else {
        throw DataError("record '" + rec.id + "': unknown topic '" + topic + "'");
      }

      std::vector<EntitySpan> spans;
      if (auto ent = s.find("entities"); ent != s.end() && !ent->is_null()) {
        std::vector<std::pair<std::string, EntityType>> given;
        for (const auto& e : *ent) {
          const std::string type = get_string(e, "type");
          const auto ty = parse_entity_type(type);
          if (!ty) throw DataError("record '" + rec.id + "': unknown entity type '" + type + "'");
          given.emplace_back(get_string(e, "value"), *ty);
        }
        try {
          spans = locate_entities(tokens, given);
        } catch (const DataError& e) {
          throw DataError("record '" + rec.id + "': " + e.what());
        }
      } else if (opts.tagger != nullptr) {
        spans = opts.tagger->tag(tokens);
      }
      MaskResult m = mask_tokens(tokens, spans, label);
      entry.masked = std::move(m.masked);
      entry.values = std::move(m.values);
      texts.push_back(entry.raw);
      rec.sentences.push_back(std::move(entry));
    }
  }
  rec.reference = get_string(j, "reference", join(texts));

  if (opts.features_dir) rec.features = load_features(feature_path(*opts.features_dir, rec.id));
  return rec;
}

}  // namespace

std::string format_record(const PaintingRecord& rec) {
  json j;
  j["id"] = rec.id;
  json sentences = json::array();
  for (const auto& s : rec.sentences) {
    json js;
    js["text"] = s.raw;
    js["topic"] = s.has_topic ? json(std::string(to_string(s.masked.topic))) : json(nullptr);
    js["masked"] = s.masked.render();
    json ents = json::array();
    std::size_t v = 0;
    for (const Token& t : s.masked.tokens) {
      if (!t.is_slot()) continue;
      ents.push_back({{"value", s.values.at(v++)}, {"type", std::string(to_string(*t.slot))}});
    }
    js["entities"] = std::move(ents);
    sentences.push_back(std::move(js));
  }
  j["sentences"] = std::move(sentences);
  json attrs = json::object();
  for (const auto& [k, v] : rec.attributes) attrs[k] = v;
  j["attributes"] = std::move(attrs);
  j["objects"] = rec.objects;
  j["reference"] = rec.reference;
  return j.dump();
}

std::vector<PaintingRecord> read_corpus(std::istream& in, const LoadOptions& opts) {
  std::vector<PaintingRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_record(line, opts));
    } catch (const FormatError& e) {
      throw FormatError("corpus line " + std::to_string(lineno) + ": " + e.what(), e.offset());
    } catch (const DataError& e) {
      throw DataError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PaintingRecord> load_corpus(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("corpus", "cannot open '" + path.string() + "'");
  return read_corpus(in, opts);
}

void write_corpus(std::ostream& out, const std::vector<PaintingRecord>& records) {
  for (const auto& r : records) out << format_record(r) << '\n';
}

std::vector<MaskedSentence> topical_sentences(const std::vector<PaintingRecord>& records) {
  std::vector<MaskedSentence> out;
  for (const auto& r : records)
    for (const auto& s : r.sentences)
      if (s.has_topic) out.push_back(s.masked);
  return out;
}

std::vector<MaskedSentence> all_sentences(const std::vector<PaintingRecord>& records) {
  std::vector<MaskedSentence> out;
  for (const auto& r : records)
    for (const auto& s : r.sentences) out.push_back(s.masked);
  return out;
}

}  // namespace artdesc::corpus
