#include "artdesc/numcore/checkpoint.hpp"

#include <fstream>

#include "artdesc/binary_io.hpp"
#include "artdesc/digest.hpp"

namespace artdesc::nc {

namespace {
constexpr char kMagic[8] = {'A', 'R', 'T', 'D', 'C', 'K', 'P', 'T'};
}

std::uint64_t Checkpoint::digest() const { return fnv1a64(metadata); }

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  io::Writer w(out);
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  w.u64(ckpt.digest());
  w.str(ckpt.metadata);
  w.u32(static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto& [name, e] : ckpt.params.entries()) {
    w.str(name);
    w.u32(2);
    w.u64(static_cast<std::uint64_t>(e.value.rows()));
    w.u64(static_cast<std::uint64_t>(e.value.cols()));
    for (Eigen::Index r = 0; r < e.value.rows(); ++r)
      for (Eigen::Index c = 0; c < e.value.cols(); ++c) w.f64(e.value(r, c));
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  io::Reader r(in);
  char magic[8];
  r.bytes(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw FormatError("not a checkpoint file (bad magic)", 0);
  const std::uint64_t version_at = r.offset();
  const std::uint32_t version = r.u32("format version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version), version_at);
  }
  const std::uint64_t digest_at = r.offset();
  const std::uint64_t digest = r.u64("config digest");
  Checkpoint ckpt;
  ckpt.metadata = r.str("metadata");
  if (ckpt.digest() != digest) throw FormatError("metadata digest mismatch", digest_at);
  const std::uint32_t count = r.u32("parameter count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t at = r.offset();
    const std::string name = r.str("parameter name", 4096);
    const std::uint32_t ndim = r.u32("ndim");
    if (ndim != 2) throw FormatError("parameter '" + name + "' has unsupported rank " + std::to_string(ndim), at);
    const std::uint64_t rows = r.u64("rows");
    const std::uint64_t cols = r.u64("cols");
    if (rows == 0 || cols == 0 || rows > (1u << 28) || cols > (1u << 28) || rows * cols > (1ull << 32)) {
      throw FormatError("parameter '" + name + "' has implausible shape", at);
    }
    if (ckpt.params.contains(name)) throw FormatError("duplicate parameter '" + name + "'", at);
    Tensor& t = ckpt.params.add(name, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index rr = 0; rr < t.rows(); ++rr)
      for (Eigen::Index cc = 0; cc < t.cols(); ++cc) t(rr, cc) = r.f64("parameter data");
  }
  if (!r.at_eof()) throw FormatError("trailing bytes after last parameter", r.offset());
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("checkpoint", "cannot open '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace artdesc::nc
