#include "artdesc/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "artdesc/corpus/text.hpp"

namespace artdesc::metrics {

namespace {

std::map<Tokens, int> ngram_counts(const Tokens& t, std::size_t n) {
  std::map<Tokens, int> counts;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++counts[Tokens(t.begin() + static_cast<std::ptrdiff_t>(i),
                                                                   t.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return counts;
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  for (std::size_t n = 0; n < 4; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  candidate_length += o.candidate_length;
  reference_length += o.reference_length;
  return *this;
}

BleuStats bleu_stats(const Tokens& candidate, const std::vector<Tokens>& references) {
  if (references.empty()) throw std::invalid_argument("bleu: no references");
  BleuStats s;
  s.candidate_length = static_cast<double>(candidate.size());
  std::size_t best = references.front().size();
  for (const auto& r : references) {
    const auto d = std::abs(static_cast<long>(r.size()) - static_cast<long>(candidate.size()));
    const auto bd = std::abs(static_cast<long>(best) - static_cast<long>(candidate.size()));
    if (d < bd || (d == bd && r.size() < best)) best = r.size();
  }
  s.reference_length = static_cast<double>(best);
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand = ngram_counts(candidate, n);
    std::map<Tokens, int> max_ref;
    for (const auto& r : references)
      for (const auto& [g, c] : ngram_counts(r, n)) max_ref[g] = std::max(max_ref[g], c);
    for (const auto& [g, c] : cand) {
      s.totals[n - 1] += c;
      auto it = max_ref.find(g);
      if (it != max_ref.end()) s.matches[n - 1] += std::min(c, it->second);
    }
  }
  return s;
}

double bleu_from_stats(const BleuStats& s, double epsilon) {
  if (s.candidate_length == 0.0 || s.matches[0] == 0.0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    const double p = s.matches[n] > 0 ? s.matches[n] / s.totals[n] : epsilon / std::max(1.0, s.totals[n]);
    log_sum += std::log(p);
  }
  const double bp =
      s.candidate_length > s.reference_length ? 1.0 : std::exp(1.0 - s.reference_length / s.candidate_length);
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

double bleu4(const Tokens& candidate, const std::vector<Tokens>& references) {
  if (candidate.empty()) throw std::invalid_argument("bleu: empty candidate");
  return bleu_from_stats(bleu_stats(candidate, references));
}

double corpus_bleu4(const std::vector<Tokens>& candidates, const std::vector<std::vector<Tokens>>& references) {
  if (candidates.size() != references.size()) throw std::invalid_argument("corpus bleu: size mismatch");
  BleuStats total;
  for (std::size_t i = 0; i < candidates.size(); ++i) total += bleu_stats(candidates[i], references[i]);
  return bleu_from_stats(total);
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(const Tokens& candidate, const Tokens& reference, double beta2) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(candidate.size());
  const double r = lcs / static_cast<double>(reference.size());
  return 100.0 * (1.0 + beta2) * p * r / (r + beta2 * p);
}

std::map<corpus::TopicLabel, double> slot_ratio(const std::vector<corpus::PaintingRecord>& records) {
  std::map<corpus::TopicLabel, std::pair<double, double>> acc;  // slots, sentences
  for (const auto& rec : records)
    for (const auto& s : rec.sentences) {
      if (!s.has_topic) continue;
      auto& a = acc[s.masked.topic];
      a.first += static_cast<double>(s.masked.slot_count());
      a.second += 1.0;
    }
  std::map<corpus::TopicLabel, double> out;
  for (const auto& [topic, a] : acc) out[topic] = a.first / a.second;
  return out;
}

Tokens metric_tokens(const std::string& text) { return corpus::tokenize(corpus::to_lower(text)); }

}  // namespace artdesc::metrics
