#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace artdesc::corpus {

/// Splits on whitespace and punctuation, keeping each punctuation character as
/// its own token. Case is preserved; square brackets are rewritten to
/// parentheses so no word can collide with a slot marker.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower(std::string_view s);
std::vector<std::string> to_lower(const std::vector<std::string>& tokens);

std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

/// Abbreviations (without the trailing period, compared case-insensitively)
/// that do not end a sentence. Single capital letters are always treated as
/// initials.
const std::set<std::string>& default_abbreviations();

/// Splits running text into sentences on '.', '!' and '?' followed by
/// whitespace or end of input. Returned sentences are trimmed; joining them
/// with single spaces reproduces the whitespace-normalized input.
std::vector<std::string> split_sentences(std::string_view text,
                                         const std::set<std::string>& abbreviations = default_abbreviations());

}  // namespace artdesc::corpus
