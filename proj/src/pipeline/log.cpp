#include "artdesc/pipeline/log.hpp"

#include <ostream>

namespace artdesc::pipeline {

void Logger::write(const char* level, const std::string& event, nlohmann::json fields) const {
  if (!out_) return;
  nlohmann::json line{{"level", level}, {"event", event}};
  if (fields.is_object()) {
    for (auto& [k, v] : fields.items()) line[k] = v;
  } else if (!fields.is_null()) {
    line["detail"] = std::move(fields);
  }
  *out_ << line.dump() << '\n';
  out_->flush();
}

void Logger::info(const std::string& event, nlohmann::json fields) const { write("info", event, std::move(fields)); }
void Logger::warn(const std::string& event, nlohmann::json fields) const { write("warn", event, std::move(fields)); }
void Logger::error(const std::string& event, nlohmann::json fields) const { write("error", event, std::move(fields)); }

}  // namespace artdesc::pipeline
