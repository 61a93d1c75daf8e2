#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "artdesc/corpus/tagger.hpp"
#include "artdesc/corpus/types.hpp"

namespace artdesc::corpus {

struct LoadOptions {
  /// Used for sentences that carry no "entities" array. Without a tagger such
  /// sentences are masked with no entities.
  const Tagger* tagger = nullptr;
  /// Sentences with fewer tokens are dropped (curator filter for catalogue lines).
  std::size_t min_sentence_tokens = 1;
  /// When set, features are loaded from <dir>/<id>.feat.
  std::optional<std::filesystem::path> features_dir;
};

/// Parses one corpus line:
///   {id, sentences:[{text, topic, entities:[{value, type}]}],
///    attributes:{artist,type,timeframe,school}, objects:[string], reference}
/// or the raw form with "description" (split into sentences) and an optional
/// "topics" array in place of "sentences".
/// Throws DataError on schema violations.
PaintingRecord parse_record(const std::string& json_line, const LoadOptions& opts = {});
std::string format_record(const PaintingRecord& record);

std::vector<PaintingRecord> read_corpus(std::istream& in, const LoadOptions& opts = {});
std::vector<PaintingRecord> load_corpus(const std::filesystem::path& path, const LoadOptions& opts = {});
void write_corpus(std::ostream& out, const std::vector<PaintingRecord>& records);

/// Masked sentences with a topic annotation (the decoder's training material).
std::vector<MaskedSentence> topical_sentences(const std::vector<PaintingRecord>& records);
std::vector<MaskedSentence> all_sentences(const std::vector<PaintingRecord>& records);

std::filesystem::path feature_path(const std::filesystem::path& dir, const std::string& id);

}  // namespace artdesc::corpus
