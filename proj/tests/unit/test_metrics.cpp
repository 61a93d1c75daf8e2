#include <cmath>
#include <functional>

#include "../support/synthetic.hpp"
#include "artdesc/metrics/metrics.hpp"
#include "doctest.h"

using namespace artdesc;
using namespace artdesc::metrics;

namespace {

Tokens split(const std::string& s) { return metric_tokens(s); }

// LCS by enumerating every subsequence of the shorter side.
std::size_t brute_lcs(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::size_t j = 0, len = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else { ++j; ++len; }
    }
    if (ok) best = std::max(best, len);
  }
  return best;
}

}  // namespace

TEST_CASE("bleu4 hand-worked fixtures") {
  // p1 = 5/6, p2 = 3/5, p3 = 1/4, p4 = 0 -> 0.1/3; equal lengths so BP = 1.
  const double expected = 100.0 * std::exp((std::log(5.0 / 6) + std::log(3.0 / 5) + std::log(1.0 / 4) +
                                            std::log(0.1 / 3)) / 4.0);
  CHECK(std::abs(expected - 25.406637407730738) < 1e-9);
  CHECK(std::abs(bleu4(split("the cat sat on the mat"), {split("the cat is on the mat")}) - expected) < 1e-6);

  const auto st = bleu_stats(split("the cat sat on the mat"), {split("the cat is on the mat")});
  CHECK(st.matches == std::array<double, 4>{5, 3, 1, 0});
  CHECK(st.totals == std::array<double, 4>{6, 5, 4, 3});

  // Short candidate: p = 1, 3/4, 1/3, 0.1/2 and BP = exp(1 - 6/5).
  CHECK(std::abs(bleu4(split("the cat on the mat"), {split("the cat sat on the mat")}) - 27.37591267534727) < 1e-6);

  const Tokens x = split("a portrait of a young woman in a red dress");
  CHECK(bleu4(x, {x}) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(bleu4(split("one two three four"), {split("five six seven eight")}) < 1e-3);
  CHECK(bleu4(split("river"), {split("the river bank")}) >= 0.0);
  CHECK_THROWS_AS(bleu4(x, {}), std::invalid_argument);
  CHECK_THROWS_AS(bleu4({}, {x}), std::invalid_argument);

  // Duplicating a reference never changes the score.
  const Tokens c = split("the saint holds a book in the landscape");
  const Tokens r1 = split("a saint holds the book"), r2 = split("the saint in a landscape");
  CHECK(bleu4(c, {r1, r2}) == bleu4(c, {r1, r2, r1}));
  CHECK(bleu4(c, {r1}) == bleu4(c, {r1, r1}));
  // Closest reference length, shorter on ties.
  CHECK(bleu_stats(split("a b c d e"), {split("a b c d"), split("a b c d e f")}).reference_length == 4.0);
}

TEST_CASE("corpus bleu pools statistics") {
  const std::vector<Tokens> cands{split("the cat sat on the mat"), split("a dog barks")};
  const std::vector<std::vector<Tokens>> refs{{split("the cat is on the mat")}, {split("a dog barks loudly")}};
  BleuStats pooled = bleu_stats(cands[0], refs[0]);
  pooled += bleu_stats(cands[1], refs[1]);
  CHECK(pooled.matches == std::array<double, 4>{8, 5, 2, 0});
  CHECK(corpus_bleu4(cands, refs) == bleu_from_stats(pooled));
  CHECK(corpus_bleu4({cands[0]}, {{cands[0]}}) == doctest::Approx(100.0));
}

TEST_CASE("rouge_l fixtures and LCS oracle") {
  const Tokens a = split("the cat sat on the mat");
  CHECK(lcs_length(a, split("the cat is on the mat")) == 5);
  CHECK(std::abs(rouge_l(a, split("the cat is on the mat")) - 100.0 * 5.0 / 6.0) < 1e-9);
  // LCS 3, P = 3/5, R = 1/2: F = 2.2 * 0.3 / (0.5 + 1.2 * 0.6) = 0.66 / 1.22
  CHECK(std::abs(rouge_l(split("a b c d e"), split("a x c y e z")) - 100.0 * 0.66 / 1.22) < 1e-6);
  CHECK(rouge_l(a, a) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(rouge_l(split("x y"), split("u v w")) == 0.0);
  CHECK(rouge_l({}, a) == 0.0);

  nc::Rng rng(1);
  const std::vector<std::string> pool{"a", "b", "c", "d"};
  for (int trial = 0; trial < 300; ++trial) {
    Tokens p, q;
    for (auto n = rng.below(10); n > 0; --n) p.push_back(pool[rng.below(4)]);
    for (auto n = rng.below(10); n > 0; --n) q.push_back(pool[rng.below(4)]);
    CHECK(lcs_length(p, q) == brute_lcs(p, q));
    CHECK(lcs_length(p, q) == lcs_length(q, p));
  }
}

TEST_CASE("slot_ratio") {
  using corpus::TopicLabel;
  using testing::sentence_from;
  corpus::PaintingRecord a, b;
  auto add = [](corpus::PaintingRecord& r, std::vector<std::string> words, TopicLabel t, bool topical = true) {
    corpus::SentenceEntry e;
    e.masked = sentence_from(words, t);
    e.has_topic = topical;
    r.sentences.push_back(e);
  };
  add(a, {"[person]", "painted", "it"}, TopicLabel::content);
  add(a, {"no", "slot"}, TopicLabel::content);
  add(a, {"[date]", "[location]", "[person]"}, TopicLabel::context);
  add(b, {"[person]", "in", "[location]"}, TopicLabel::context);
  add(b, {"bright", "[misc]"}, TopicLabel::content);
  add(b, {"[person]", "[person]"}, TopicLabel::content, false);
  const auto r = slot_ratio({a, b});
  CHECK(r.size() == 2);
  CHECK(r.at(TopicLabel::content) == doctest::Approx(2.0 / 3.0));
  CHECK(r.at(TopicLabel::context) == doctest::Approx(2.5));
  CHECK(!r.count(TopicLabel::form));

  corpus::PaintingRecord plain;
  add(plain, {"a", "b"}, TopicLabel::form);
  add(plain, {"c"}, TopicLabel::content);
  for (const auto& [t, v] : slot_ratio({plain})) CHECK(v == 0.0);
}
