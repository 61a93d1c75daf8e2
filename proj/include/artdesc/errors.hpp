#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace artdesc {

/// Tensor dimensions disagree; the message names the offending tensor.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An object was used in a state that does not permit the call
/// (backward twice, Adam without gradients, ...).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed file contents. Carries the byte offset where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  explicit FormatError(const std::string& what) : std::runtime_error(what), offset_(0) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Configuration, checkpoint or vocabulary do not fit together.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data is inconsistent (missing ids, unlocatable entities, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage needs an artifact that does not exist.
class MissingArtifactError : public std::runtime_error {
 public:
  MissingArtifactError(const std::string& stage, const std::string& what)
      : std::runtime_error("missing artifact for stage '" + stage + "': " + what), stage_(stage) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace artdesc
