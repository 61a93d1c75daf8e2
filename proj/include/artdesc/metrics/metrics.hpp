#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "artdesc/corpus/types.hpp"

namespace artdesc::metrics {

using Tokens = std::vector<std::string>;

struct BleuStats {
  std::array<double, 4> matches{};  // clipped n-gram matches, n = 1..4
  std::array<double, 4> totals{};   // candidate n-gram counts
  double candidate_length = 0.0;
  double reference_length = 0.0;    // closest reference length (shorter on ties)

  BleuStats& operator+=(const BleuStats& o);
};

/// Clipped counts of one candidate against its references. Throws
/// invalid_argument when `references` is empty.
BleuStats bleu_stats(const Tokens& candidate, const std::vector<Tokens>& references);

/// 100 * BP * exp(mean_n log p_n). An order with no match uses epsilon / total
/// instead of 0 (epsilon = 0.1); no unigram match at all scores 0.
double bleu_from_stats(const BleuStats& s, double epsilon = 0.1);

/// Sentence BLEU-4 in [0, 100]. Throws invalid_argument for an empty candidate
/// or no references.
double bleu4(const Tokens& candidate, const std::vector<Tokens>& references);

/// Corpus BLEU-4: statistics summed over all pairs before combining.
double corpus_bleu4(const std::vector<Tokens>& candidates, const std::vector<std::vector<Tokens>>& references);

std::size_t lcs_length(const Tokens& a, const Tokens& b);

/// LCS F-measure in [0, 100] with beta^2 = 1.2; 0 when either side is empty.
double rouge_l(const Tokens& candidate, const Tokens& reference, double beta2 = 1.2);

/// Mean number of slots per topic-annotated sentence, for each topic that has
/// at least one sentence (absent topics are left out, not reported as 0).
std::map<corpus::TopicLabel, double> slot_ratio(const std::vector<corpus::PaintingRecord>& records);

/// Lowercased corpus tokenization used for scoring text.
Tokens metric_tokens(const std::string& text);

}  // namespace artdesc::metrics
