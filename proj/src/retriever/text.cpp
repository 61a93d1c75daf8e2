#include "artdesc/retriever/text.hpp"

#include <algorithm>
#include <cctype>

#include "artdesc/corpus/text.hpp"
#include "resources.hpp"

namespace artdesc::retriever {

std::vector<std::string> parse_word_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    pos = nl + 1;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back(corpus::to_lower(line.substr(first, last - first + 1)));
  }
  return out;
}

const std::unordered_set<std::string>& stop_words() {
  static const std::unordered_set<std::string> words = [] {
    const auto list = parse_word_list(resources::kStopWords);
    return std::unordered_set<std::string>(list.begin(), list.end());
  }();
  return words;
}

std::vector<std::string> normalize_text(std::string_view text) {
  std::vector<std::string> out;
  const auto& stops = stop_words();
  for (auto& tok : corpus::tokenize(corpus::to_lower(std::string(text)))) {
    const bool has_alnum = std::any_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isalnum(c); });
    if (!has_alnum || stops.count(tok)) continue;
    out.push_back(porter_stem(tok));
  }
  return out;
}

std::vector<std::string> ngram_terms(const std::vector<std::string>& tokens) {
  std::vector<std::string> terms(tokens);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) terms.push_back(tokens[i] + " " + tokens[i + 1]);
  return terms;
}

}  // namespace artdesc::retriever
