#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "artdesc/retriever/index.hpp"

namespace artdesc::retriever {

/// A directory of plain-text files (id = file stem, title = first non-empty
/// line, body = whole file; files visited in name order) or a line-delimited
/// JSON export with {"id", "title"?, "text" | "body"} per line.
std::vector<KnowledgeArticle> load_articles(const std::filesystem::path& path);
std::vector<KnowledgeArticle> read_articles_jsonl(std::istream& in);

}  // namespace artdesc::retriever
