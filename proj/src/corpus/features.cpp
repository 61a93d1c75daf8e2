#include "artdesc/corpus/features.hpp"

#include <cstring>
#include <fstream>

#include "artdesc/binary_io.hpp"

namespace artdesc::corpus {

namespace {
constexpr char kMagic[4] = {'A', 'F', 'G', 'R'};
constexpr std::uint32_t kMaxSide = 1u << 20;
}  // namespace

FeatureGrid read_features(std::istream& in) {
  io::Reader r(in);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a feature file (bad magic)", 0);
  const std::uint32_t L = r.u32("L");
  const std::uint32_t D = r.u32("D");
  if (L == 0 || D == 0 || L > kMaxSide || D > kMaxSide) {
    throw FormatError("feature grid must have 1 <= L, D <= 2^20; got L=" + std::to_string(L) + " D=" + std::to_string(D), 4);
  }
  FeatureGrid g;
  g.values.resize(L, D);
  for (std::uint32_t i = 0; i < L; ++i) {
    for (std::uint32_t j = 0; j < D; ++j) {
      const std::uint64_t at = r.offset();
      const float v = r.f32("feature values");
      if (!std::isfinite(v)) throw FormatError("non-finite feature value", at);
      g.values(i, j) = static_cast<double>(v);
    }
  }
  if (!r.at_eof()) throw FormatError("feature file is longer than L*D values", r.offset());
  return g;
}

FeatureGrid load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("features", "cannot open '" + path.string() + "'");
  return read_features(in);
}

void write_features(std::ostream& out, const FeatureGrid& grid) {
  io::Writer w(out);
  w.bytes(kMagic, 4);
  w.u32(static_cast<std::uint32_t>(grid.locations()));
  w.u32(static_cast<std::uint32_t>(grid.dim()));
  for (Eigen::Index i = 0; i < grid.locations(); ++i)
    for (Eigen::Index j = 0; j < grid.dim(); ++j) w.f32(static_cast<float>(grid.values(i, j)));
}

void save_features(const std::filesystem::path& path, const FeatureGrid& grid) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_features(out, grid);
}

nc::Vector mean_pool(const FeatureGrid& grid) {
  if (grid.locations() == 0 || grid.dim() == 0) throw std::invalid_argument("mean_pool: empty grid");
  return grid.values.colwise().mean().transpose();
}

}  // namespace artdesc::corpus
