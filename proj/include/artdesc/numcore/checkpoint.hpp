#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "artdesc/numcore/param_store.hpp"

namespace artdesc::nc {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Parameters plus an opaque UTF-8 metadata document (JSON by convention).
/// The header digest is FNV-1a 64 over the metadata bytes and is verified on load.
/// Byte layout: docs/FORMATS.md.
struct Checkpoint {
  std::string metadata;
  ParamStore params;

  std::uint64_t digest() const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace artdesc::nc
