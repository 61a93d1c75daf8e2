#include "artdesc/retriever/recall.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <stdexcept>

#include "artdesc/corpus/text.hpp"
#include "artdesc/errors.hpp"
#include "json.hpp"

namespace artdesc::retriever {

const char* to_string(RelevanceLabel label) {
  switch (label) {
    case RelevanceLabel::correct: return "correct";
    case RelevanceLabel::theme: return "theme";
    case RelevanceLabel::author: return "author";
    case RelevanceLabel::ambiguation: return "ambiguation";
    case RelevanceLabel::incorrect: return "incorrect";
  }
  return "?";
}

RelevanceLabel parse_relevance_label(const std::string& s) {
  const std::string l = corpus::to_lower(s);
  for (auto label : {RelevanceLabel::correct, RelevanceLabel::theme, RelevanceLabel::author,
                     RelevanceLabel::ambiguation, RelevanceLabel::incorrect})
    if (l == to_string(label)) return label;
  throw DataError("unknown relevance label '" + s + "'");
}

bool is_positive(RelevanceLabel label) {
  return label == RelevanceLabel::correct || label == RelevanceLabel::theme || label == RelevanceLabel::author;
}

Annotations read_annotations(std::istream& in) {
  Annotations out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out[j.at("painting_id").get<std::string>()].push_back(
          {j.at("article_id").get<std::string>(), parse_relevance_label(j.at("label").get<std::string>())});
    } catch (const nlohmann::json::exception& e) {
      throw DataError("annotation line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

Annotations load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("eval-recall", "annotations " + path.string());
  return read_annotations(in);
}

const RecallRow& RecallReport::row(const std::string& group) const {
  for (const auto& r : rows)
    if (r.group == group) return r;
  throw std::out_of_range("no recall row '" + group + "'");
}

RecallReport eval_recall(const Rankings& rankings, const Annotations& annotations, const std::vector<int>& ks) {
  if (ks.empty()) throw std::invalid_argument("eval_recall: no cut-offs given");
  for (int k : ks)
    if (k < 1) throw std::invalid_argument("eval_recall: k must be at least 1");

  RecallReport report;
  report.ks = ks;
  const std::vector<std::pair<std::string, std::function<bool(RelevanceLabel)>>> groups{
      {"correct", [](RelevanceLabel l) { return l == RelevanceLabel::correct; }},
      {"theme", [](RelevanceLabel l) { return l == RelevanceLabel::theme; }},
      {"author", [](RelevanceLabel l) { return l == RelevanceLabel::author; }},
      {"all", is_positive},
  };
  std::vector<std::map<int, std::size_t>> hits(groups.size());
  report.rows.resize(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) report.rows[g].group = groups[g].first;

  for (const auto& [painting, ranked] : rankings) {
    auto it = annotations.find(painting);
    if (it == annotations.end()) {
      report.unannotated.push_back(painting);
      continue;
    }
    if (std::none_of(it->second.begin(), it->second.end(),
                     [](const AnnotatedArticle& a) { return is_positive(a.label); }))
      report.no_positive.push_back(painting);

    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::set<std::string> relevant;
      for (const auto& a : it->second)
        if (groups[g].second(a.label)) relevant.insert(a.article_id);
      if (relevant.empty()) continue;
      ++report.rows[g].paintings;
      // first rank position holding a relevant article
      std::size_t pos = std::string::npos;
      for (std::size_t i = 0; i < ranked.size(); ++i)
        if (relevant.count(ranked[i])) {
          pos = i;
          break;
        }
      for (int k : ks)
        if (pos != std::string::npos && pos < static_cast<std::size_t>(k)) ++hits[g][k];
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int k : ks) {
      const auto n = report.rows[g].paintings;
      report.rows[g].recall[k] = n ? 100.0 * static_cast<double>(hits[g][k]) / static_cast<double>(n) : 0.0;
    }
  }
  return report;
}

}  // namespace artdesc::retriever
