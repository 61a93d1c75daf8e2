#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace artdesc {

/// 64-bit FNV-1a. Used for config and vocabulary digests embedded in artifacts.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex_digest(std::uint64_t d) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
  return buf;
}

}  // namespace artdesc
