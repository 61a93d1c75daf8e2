#include "artdesc/retriever/articles.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "artdesc/errors.hpp"
#include "json.hpp"

namespace artdesc::retriever {

namespace fs = std::filesystem;

namespace {

std::string first_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto a = line.find_first_not_of(" \t\r");
    if (a != std::string::npos) return line.substr(a, line.find_last_not_of(" \t\r") - a + 1);
  }
  return "";
}

}  // namespace

std::vector<KnowledgeArticle> read_articles_jsonl(std::istream& in) {
  std::vector<KnowledgeArticle> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      KnowledgeArticle a;
      a.id = j.at("id").get<std::string>();
      a.title = j.value("title", std::string());
      a.body = j.contains("text") ? j.at("text").get<std::string>() : j.at("body").get<std::string>();
      out.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("article line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<KnowledgeArticle> load_articles(const fs::path& path) {
  if (!fs::exists(path)) throw MissingArtifactError("index", "knowledge corpus " + path.string());
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<KnowledgeArticle> out;
    for (const auto& f : files) {
      std::ifstream in(f, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      out.push_back({f.stem().string(), first_line(ss.str()), ss.str()});
    }
    return out;
  }
  std::ifstream in(path);
  return read_articles_jsonl(in);
}

}  // namespace artdesc::retriever
