#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

namespace artdesc::pipeline {

/// Line-delimited structured log: {"level": ..., "event": ..., <fields>}.
class Logger {
 public:
  explicit Logger(std::ostream* out = nullptr) : out_(out) {}

  void info(const std::string& event, nlohmann::json fields = nlohmann::json::object()) const;
  void warn(const std::string& event, nlohmann::json fields = nlohmann::json::object()) const;
  void error(const std::string& event, nlohmann::json fields = nlohmann::json::object()) const;

 private:
  std::ostream* out_;
  void write(const char* level, const std::string& event, nlohmann::json fields) const;
};

}  // namespace artdesc::pipeline
