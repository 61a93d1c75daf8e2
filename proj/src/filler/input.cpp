#include "artdesc/filler/input.hpp"

#include "artdesc/errors.hpp"

namespace artdesc::filler {

FillInput encode_fill_input(const std::vector<corpus::MaskedSentence>& masked, const CandidateSet& candidates,
                            std::size_t max_len) {
  FillInput in;
  in.tokens.push_back(kCls);
  for (const auto& s : masked) {
    for (const auto& t : s.tokens) {
      if (t.is_slot()) {
        in.slot_positions.push_back(in.tokens.size());
        in.slot_types.push_back(*t.slot);
      }
      in.tokens.push_back(t.text());
    }
  }
  in.sep = in.tokens.size();
  in.tokens.push_back(kSep);
  in.segment.assign(in.tokens.size(), 0);
  if (in.tokens.size() > max_len)
    in.warnings.push_back("masked description alone exceeds the maximum input length; no candidates kept");

  for (const auto& c : candidates.entries()) {
    if (in.tokens.size() >= max_len) {
      in.warnings.push_back("candidate list truncated to " + std::to_string(in.candidates.size()) + " of " +
                            std::to_string(candidates.size()) + " entries");
      break;
    }
    in.tokens.push_back(c.surface);
    in.segment.push_back(1);
    in.candidates.push_back(c);
  }
  return in;
}

DecodedFillInput decode_fill_input(const FillInput& input) {
  if (input.tokens.empty() || input.tokens.front() != kCls || input.sep >= input.tokens.size() ||
      input.tokens[input.sep] != kSep)
    throw DataError("malformed fill input");
  DecodedFillInput out;
  for (std::size_t i = 1; i < input.sep; ++i) {
    if (auto slot = corpus::parse_slot_text(input.tokens[i])) {
      out.y.push_back(corpus::Token::make_slot(*slot));
    } else {
      out.y.push_back(corpus::Token::make_word(input.tokens[i]));
    }
  }
  for (std::size_t i = input.sep + 1; i < input.tokens.size(); ++i) {
    Candidate c = input.candidates.at(i - input.sep - 1);
    c.surface = input.tokens[i];
    out.candidates.add(std::move(c));
  }
  return out;
}

}  // namespace artdesc::filler
