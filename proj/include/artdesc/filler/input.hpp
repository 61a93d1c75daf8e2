#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "artdesc/corpus/types.hpp"
#include "artdesc/filler/candidates.hpp"

namespace artdesc::filler {

inline constexpr const char* kCls = "[CLS]";
inline constexpr const char* kSep = "[SEP]";

/// [CLS] y [SEP] k: the masked description followed by one k-segment token per
/// candidate (multi-word surfaces stay a single unit).
struct FillInput {
  std::vector<std::string> tokens;
  std::vector<std::uint8_t> segment;  // 0 for [CLS], y and [SEP]; 1 for k
  std::size_t sep = 0;                // position of [SEP]
  std::vector<std::size_t> slot_positions;
  std::vector<corpus::EntityType> slot_types;
  std::vector<Candidate> candidates;  // k-segment entries in order
  std::vector<std::string> warnings;

  std::size_t y_length() const { return sep - 1; }
};

/// Candidates that do not fit within max_len tokens are dropped from the end
/// (with a warning); y is never truncated.
FillInput encode_fill_input(const std::vector<corpus::MaskedSentence>& masked, const CandidateSet& candidates,
                            std::size_t max_len = 512);

struct DecodedFillInput {
  std::vector<corpus::Token> y;
  CandidateSet candidates;
};

/// Inverse of encode_fill_input up to sentence boundaries.
DecodedFillInput decode_fill_input(const FillInput& input);

}  // namespace artdesc::filler
