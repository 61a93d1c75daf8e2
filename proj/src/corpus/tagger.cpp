#include "artdesc/corpus/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "artdesc/corpus/text.hpp"
#include "artdesc/errors.hpp"

namespace artdesc::corpus {

namespace {

const std::set<std::string>& ordinal_words() {
  static const std::set<std::string> w{"first",     "second",     "third",      "fourth",      "fifth",
                                       "sixth",     "seventh",    "eighth",     "ninth",       "tenth",
                                       "eleventh",  "twelfth",    "thirteenth", "fourteenth",  "fifteenth",
                                       "sixteenth", "seventeenth", "eighteenth", "nineteenth", "twentieth"};
  return w;
}

const std::set<std::string>& number_words() {
  static const std::set<std::string> w{"two",    "three",   "four",   "five",   "six",     "seven",
                                       "eight",  "nine",    "ten",    "eleven", "twelve",  "twenty",
                                       "thirty", "hundred", "thousand", "dozen", "million"};
  return w;
}

const std::set<std::string>& month_words() {
  static const std::set<std::string> w{"january", "february", "march",     "april",   "may",      "june",
                                       "july",    "august",   "september", "october", "november", "december"};
  return w;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool is_year(const std::string& s) {
  std::string core = s;
  if (core.size() == 5 && core.back() == 's') core.pop_back();  // 1500s
  if (core.size() != 4 || !all_digits(core)) return false;
  const int y = std::stoi(core);
  return y >= 1000 && y <= 2099;
}

bool is_numeric_ordinal(const std::string& s) {
  if (s.size() < 3) return false;
  const std::string suffix = to_lower(s.substr(s.size() - 2));
  if (suffix != "st" && suffix != "nd" && suffix != "rd" && suffix != "th") return false;
  return all_digits(s.substr(0, s.size() - 2));
}

bool is_ordinal(const std::string& s) { return is_numeric_ordinal(s) || ordinal_words().count(to_lower(s)) != 0; }

}  // namespace

std::vector<EntitySpan> Tagger::tag(std::string_view sentence) const { return tag(tokenize(sentence)); }

void GazetteerTagger::add(std::string_view surface, EntityType type) {
  std::vector<std::string> toks = tokenize(surface);
  if (toks.empty()) throw std::invalid_argument("gazetteer entry has no tokens");
  if (entries_.count(toks)) {
    entries_[toks] = type;
    for (auto& [t, ty] : entries_by_head_[toks.front()])
      if (t == toks) ty = type;
    return;
  }
  entries_.emplace(toks, type);
  auto& bucket = entries_by_head_[toks.front()];
  bucket.emplace_back(toks, type);
  // Longest first so the first hit is the longest match.
  std::stable_sort(bucket.begin(), bucket.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
}

void GazetteerTagger::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("gazetteer", "cannot open '" + path.string() + "'");
  load(in, path.string());
}

void GazetteerTagger::load(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::uint64_t line_start = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError(source + ":" + std::to_string(lineno) + ": expected 'surface<TAB>type'", line_start);
    }
    const auto type = parse_entity_type(line.substr(tab + 1));
    if (!type) {
      throw FormatError(source + ":" + std::to_string(lineno) + ": unknown entity type '" + line.substr(tab + 1) + "'",
                        line_start + tab + 1);
    }
    add(line.substr(0, tab), *type);
  }
}

std::size_t GazetteerTagger::match_pattern(const std::vector<std::string>& tokens, std::size_t at,
                                           EntityType& type) const {
  const std::string& tok = tokens[at];
  const std::string low = to_lower(tok);
  const bool has_next = at + 1 < tokens.size();

  // "15th century", "fifteenth century"
  if (is_ordinal(tok) && has_next && to_lower(tokens[at + 1]) == "century") {
    type = EntityType::date;
    return 2;
  }
  // "March 1502", "12 March 1502", "March 12 , 1502"
  if (month_words().count(low) && low != "may") {
    std::size_t n = 1;
    if (at + n < tokens.size() && all_digits(tokens[at + n]) && tokens[at + n].size() <= 2) ++n;
    if (at + n < tokens.size() && tokens[at + n] == "," && at + n + 1 < tokens.size() && is_year(tokens[at + n + 1])) ++n;
    if (at + n < tokens.size() && is_year(tokens[at + n])) {
      type = EntityType::date;
      return n + 1;
    }
  }
  if (all_digits(tok) && tok.size() <= 2 && has_next && month_words().count(to_lower(tokens[at + 1])) &&
      at + 2 < tokens.size() && is_year(tokens[at + 2])) {
    type = EntityType::date;
    return 3;
  }
  if (is_year(tok)) {
    type = EntityType::date;
    return 1;
  }
  if (is_ordinal(tok)) {
    type = EntityType::ordinal;
    return 1;
  }
  if (all_digits(tok) || number_words().count(low)) {
    type = EntityType::number;
    return 1;
  }
  return 0;
}

std::vector<EntitySpan> GazetteerTagger::tag(const std::vector<std::string>& tokens) const {
  std::vector<EntitySpan> spans;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t len = 0;
    EntityType type = EntityType::misc;
    if (auto it = entries_by_head_.find(tokens[i]); it != entries_by_head_.end()) {
      for (const auto& [surface, ty] : it->second) {
        if (i + surface.size() > tokens.size()) continue;
        if (std::equal(surface.begin(), surface.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
          len = surface.size();
          type = ty;
          break;
        }
      }
    }
    if (len == 0) len = match_pattern(tokens, i, type);
    if (len == 0) {
      ++i;
      continue;
    }
    spans.push_back({i, i + len, type});
    i += len;
  }
  return spans;
}

std::vector<EntitySpan> tag_entities(std::string_view sentence, const Tagger& tagger) { return tagger.tag(sentence); }

}  // namespace artdesc::corpus
