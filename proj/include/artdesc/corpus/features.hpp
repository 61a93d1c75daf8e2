#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "artdesc/corpus/types.hpp"

namespace artdesc::corpus {

/// Feature file: 4 magic bytes "AFGR", u32 L, u32 D, then L*D little-endian
/// f32 values row by row. Values widen to f64 on load.
FeatureGrid read_features(std::istream& in);
FeatureGrid load_features(const std::filesystem::path& path);
void write_features(std::ostream& out, const FeatureGrid& grid);
void save_features(const std::filesystem::path& path, const FeatureGrid& grid);

/// Arithmetic mean of the L rows.
nc::Vector mean_pool(const FeatureGrid& grid);

}  // namespace artdesc::corpus
