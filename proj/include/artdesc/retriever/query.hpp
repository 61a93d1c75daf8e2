#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace artdesc::retriever {

/// Detector concepts dropped from queries; lowercase and trimmed.
using Blocklist = std::vector<std::string>;

/// The shipped list (data/blocklist.txt), seeded with "cell phone".
const Blocklist& default_blocklist();
Blocklist load_blocklist(const std::filesystem::path& path);

struct Query {
  std::string text;
  bool empty = true;  // nothing survived: retrieval will return no articles
};

/// Attribute values in the order artist, type, timeframe, school, followed by
/// the object concepts not on the blocklist, joined with single spaces.
/// Masked sentences are deliberately not part of the query.
Query build_query(const std::map<std::string, std::string>& attributes, const std::vector<std::string>& objects,
                  const Blocklist& blocklist = default_blocklist());

}  // namespace artdesc::retriever
