#pragma once

// A complete miniature project on disk: corpus, features, gazetteer,
// knowledge articles and a config, small enough to memorize in seconds.

#include <filesystem>
#include <string>

#include "json.hpp"

namespace artdesc::testing {

struct ToyProject {
  std::filesystem::path root;
  std::filesystem::path config;  // root / "config.json"
  int paintings = 0;
};

/// Writes the project under `root` (created if needed). `overrides` is merged
/// into the generated config object.
ToyProject write_toy_project(const std::filesystem::path& root, int paintings, std::uint64_t seed,
                             const nlohmann::json& overrides = nlohmann::json::object());

/// Fresh scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace artdesc::testing
