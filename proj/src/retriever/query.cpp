#include "artdesc/retriever/query.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "artdesc/corpus/text.hpp"
#include "artdesc/corpus/types.hpp"
#include "artdesc/errors.hpp"
#include "artdesc/retriever/text.hpp"
#include "resources.hpp"

namespace artdesc::retriever {

namespace {

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r\n") - a + 1);
}

}  // namespace

const Blocklist& default_blocklist() {
  static const Blocklist list = parse_word_list(resources::kBlocklist);
  return list;
}

Blocklist load_blocklist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("retrieve", "blocklist " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_word_list(ss.str());
}

Query build_query(const std::map<std::string, std::string>& attributes, const std::vector<std::string>& objects,
                  const Blocklist& blocklist) {
  std::vector<std::string> parts;
  for (const char* key : corpus::kAttributeKeys) {
    auto it = attributes.find(key);
    if (it == attributes.end()) continue;
    if (auto v = trimmed(it->second); !v.empty()) parts.push_back(v);
  }
  for (const auto& o : objects) {
    const auto v = trimmed(o);
    if (v.empty()) continue;
    if (std::find(blocklist.begin(), blocklist.end(), corpus::to_lower(v)) != blocklist.end()) continue;
    parts.push_back(v);
  }
  Query q;
  q.text = corpus::join(parts, " ");
  q.empty = parts.empty();
  return q;
}

}  // namespace artdesc::retriever
