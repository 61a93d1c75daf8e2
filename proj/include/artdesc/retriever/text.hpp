#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace artdesc::retriever {

/// Porter's 1980 suffix-stripping algorithm (the original rules, not the
/// later "Porter2" revision). Expects a lowercase ASCII word; words of one or
/// two letters are returned unchanged.
std::string porter_stem(std::string_view word);

/// The shipped English stop-word list (data/stopwords.txt).
const std::unordered_set<std::string>& stop_words();

/// Parses a one-entry-per-line list; '#' starts a comment line, blank lines
/// are skipped, entries are lowercased and trimmed.
std::vector<std::string> parse_word_list(std::string_view text);

/// Lowercase, tokenize, drop punctuation-only tokens and stop words, stem.
std::vector<std::string> normalize_text(std::string_view text);

/// Unigrams followed by adjacent bigrams ("a b") of a normalized stream.
std::vector<std::string> ngram_terms(const std::vector<std::string>& tokens);

}  // namespace artdesc::retriever
