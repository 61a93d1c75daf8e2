#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace artdesc::retriever {

enum class RelevanceLabel { correct, theme, author, ambiguation, incorrect };

const char* to_string(RelevanceLabel label);
/// Accepts the label names case-insensitively; throws DataError otherwise.
RelevanceLabel parse_relevance_label(const std::string& s);
/// Correct, Theme and Author articles count as positives.
bool is_positive(RelevanceLabel label);

struct AnnotatedArticle {
  std::string article_id;
  RelevanceLabel label;
};

/// painting id -> annotated articles
using Annotations = std::map<std::string, std::vector<AnnotatedArticle>>;

/// Line-delimited records {"painting_id", "article_id", "label"}.
Annotations read_annotations(std::istream& in);
Annotations load_annotations(const std::filesystem::path& path);

/// painting id -> article ids, best first
using Rankings = std::map<std::string, std::vector<std::string>>;

struct RecallRow {
  std::string group;           // "correct", "theme", "author" or "all"
  std::size_t paintings = 0;   // paintings with at least one article of the group
  std::map<int, double> recall;  // k -> percentage in [0, 100]
};

struct RecallReport {
  std::vector<int> ks;
  std::vector<RecallRow> rows;  // correct, theme, author, all
  std::vector<std::string> unannotated;  // ranked paintings without annotations (excluded)
  std::vector<std::string> no_positive;  // annotated, but only negative labels

  const RecallRow& row(const std::string& group) const;
};

/// R@k: percentage of paintings whose annotated article of the group appears
/// within the first k ranked articles. Throws invalid_argument for an empty
/// or non-positive k.
RecallReport eval_recall(const Rankings& rankings, const Annotations& annotations,
                         const std::vector<int>& ks = {1, 5, 10});

}  // namespace artdesc::retriever
