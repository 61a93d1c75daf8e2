#pragma once

// Little-endian primitives shared by the checkpoint, index and feature formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "artdesc/errors.hpp"

namespace artdesc::io {

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw std::runtime_error("write failed");
  }
  void u32(std::uint32_t v) { uint_le(v, 4); }
  void u64(std::uint64_t v) { uint_le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  void uint_le(std::uint64_t v, int n) {
    unsigned char b[8];
    for (int i = 0; i < n; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, static_cast<std::size_t>(n));
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* p, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError(std::string("truncated input while reading ") + what, offset_);
    }
    offset_ += n;
  }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(uint_le(4, what)); }
  std::uint64_t u64(const char* what) { return uint_le(8, what); }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  std::string str(const char* what, std::uint32_t max_len = 1u << 30) {
    const std::uint64_t at = offset_;
    const std::uint32_t n = u32(what);
    if (n > max_len) throw FormatError(std::string("implausible length for ") + what, at);
    std::string s(n, '\0');
    bytes(s.data(), n, what);
    return s;
  }
  std::uint64_t offset() const { return offset_; }
  bool at_eof() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::uint64_t uint_le(int n, const char* what) {
    unsigned char b[8];
    bytes(b, static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

}  // namespace artdesc::io
