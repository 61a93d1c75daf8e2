#include "artdesc/corpus/text.hpp"

#include <cctype>

namespace artdesc::corpus {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_char(c)) {
      cur += ch;
    } else if (std::isspace(c)) {
      flush();
    } else {
      flush();
      if (ch == '[') ch = '(';
      if (ch == ']') ch = ')';
      out.emplace_back(1, ch);
    }
  }
  flush();
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> to_lower(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(to_lower(t));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

const std::set<std::string>& default_abbreviations() {
  static const std::set<std::string> abbrev{"mr", "mrs", "ms",  "dr",  "st", "sr",  "jr",  "c",   "ca",
                                            "fl", "no",  "vol", "fig", "pl", "cat", "inv", "e.g", "i.e",
                                            "vs", "cf",  "op",  "approx"};
  return abbrev;
}

std::vector<std::string> split_sentences(std::string_view text, const std::set<std::string>& abbreviations) {
  // Whitespace-normalize first so the join contract holds.
  std::vector<std::string> words;
  {
    std::string cur;
    for (char ch : text) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!cur.empty()) words.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
  }

  std::vector<std::string> sentences;
  std::string cur;
  for (const std::string& w : words) {
    if (!cur.empty()) cur += ' ';
    cur += w;
    // Trailing closing quotes/brackets may follow the terminator.
    std::size_t end = w.size();
    while (end > 0 && (w[end - 1] == '"' || w[end - 1] == '\'' || w[end - 1] == ')')) --end;
    if (end == 0) continue;
    const char term = w[end - 1];
    if (term != '.' && term != '!' && term != '?') continue;
    if (term == '.') {
      std::string stem = w.substr(0, end - 1);
      while (!stem.empty() && (stem.front() == '(' || stem.front() == '"' || stem.front() == '\'')) stem.erase(0, 1);
      if (stem.size() == 1 && std::isupper(static_cast<unsigned char>(stem[0]))) continue;  // initial
      if (abbreviations.count(to_lower(stem))) continue;
    }
    sentences.push_back(std::move(cur));
    cur.clear();
  }
  if (!cur.empty()) sentences.push_back(std::move(cur));
  return sentences;
}

}  // namespace artdesc::corpus
