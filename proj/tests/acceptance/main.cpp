// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/retrieval_oracle.hpp"
#include "../support/synthetic.hpp"
#include "../support/toy_project.hpp"
#include "artdesc/corpus/masking.hpp"
#include "artdesc/corpus/text.hpp"
#include "artdesc/decoder/search.hpp"
#include "artdesc/decoder/train.hpp"
#include "artdesc/filler/candidates.hpp"
#include "artdesc/metrics/metrics.hpp"
#include "artdesc/numcore/grad_check.hpp"
#include "artdesc/pipeline/pipeline.hpp"
#include "artdesc/retriever/index.hpp"
#include "artdesc/retriever/recall.hpp"

using namespace artdesc;
using corpus::EntityType;
using corpus::FeatureGrid;
using corpus::TopicLabel;
using corpus::Vocab;
using decoder::Variant;
using nc::Matrix;
using nc::Vector;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void need(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { notes.push_back("     " + what); }
};

// Every fill decision made anywhere in this run is checked for type
// compatibility (criterion 8 counts violations across all tests).
std::size_t g_decisions = 0;
std::size_t g_type_violations = 0;

void audit(const filler::FillResult& r) {
  for (const auto& d : r.decisions) {
    ++g_decisions;
    if (d.choice && d.choice->type != d.type) ++g_type_violations;
  }
}

// ---- 1. gradient fidelity ----------------------------------------------------

void gradient_fidelity(Outcome& out) {
  const auto t0 = Clock::now();
  nc::Rng rng(101);
  const FeatureGrid grid = testing::random_grid(rng, 3, 4);
  const std::vector<int> target{5, 9, Vocab::kEnd};

  for (Variant v : {Variant::baseline, Variant::conditional}) {
    auto d = testing::toy_decoder(v, 12, 4, 8, rng);
    const decoder::TrainingExample ex{&grid, TopicLabel::form, target};
    const double w = v == Variant::conditional ? 1.0 : 0.0;
    const auto r = nc::grad_check([&](nc::Tape& t) { return decoder::example_loss(t, d, ex, w); }, d.params());
    out.need(r.max_relative_error < 1e-4, std::string(to_string(v)) + " decoder" +
                                              (w > 0 ? " joint loss" : " loss") + ": max rel error " +
                                              fmt("%.2e", r.max_relative_error) + " over " +
                                              std::to_string(r.checked) + " entries");
  }

  // Filler: vocabulary of 12 (11 reserved + one word), 3-token sentence.
  const Vocab vocab(std::vector<std::string>{"w"});
  auto f = testing::toy_filler(vocab.size(), 8, rng);
  filler::CandidateSet g;
  g.add({"w", EntityType::person, filler::CandidateSource::article});
  g.add({"Anna", EntityType::person, filler::CandidateSource::attribute});
  g.add({"1500", EntityType::date, filler::CandidateSource::article});
  const auto y = testing::sentence_from({"w", "[person]", "w"}, TopicLabel::content);
  const filler::FillExample ex{filler::encode_fill_input({y}, g), {"Anna"}};
  const auto r = nc::grad_check([&](nc::Tape& t) { return filler::fill_loss(t, f, vocab, ex); }, f.params());
  out.need(r.max_relative_error < 1e-4, "filler loss: max rel error " + fmt("%.2e", r.max_relative_error) +
                                            " over " + std::to_string(r.checked) + " entries");

  const double s = seconds_since(t0);
  out.need(s < 60.0, "runtime " + fmt("%.2f", s) + " s (limit 60 s)");
}

// ---- 2. attention contract ---------------------------------------------------

void attention_contract(Outcome& out) {
  nc::Rng rng(202);
  const int D = 5, H = 7;
  auto d = testing::toy_decoder(Variant::baseline, 12, D, H, rng, 0.8);
  const Matrix& Wv = d.params().value("att.Wv");
  const Matrix& Wh = d.params().value("att.Wh");
  const Matrix& b = d.params().value("att.b");
  const Matrix& w = d.params().value("att.w");

  double worst_sum = 0.0, worst_z = 0.0, worst_alpha = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int L = 1 + static_cast<int>(rng.below(12));
    const FeatureGrid grid = testing::random_grid(rng, L, D, 3.0);
    const Vector h = testing::random_grid(rng, H, 1, 1.0).values.col(0);
    nc::Tape tape(&d.params(), false);
    const auto ctx = d.bind(tape, grid, std::nullopt);
    const auto att = d.attend(tape, ctx, tape.constant(h));
    const Vector alpha = att.alpha.value().col(0);
    const Vector z = att.context.value().col(0);

    // Explicit per-location score, softmax and weighted sum.
    std::vector<double> e(static_cast<std::size_t>(L));
    double mx = -INFINITY;
    for (int i = 0; i < L; ++i) {
      double s = 0.0;
      for (Eigen::Index a = 0; a < Wv.rows(); ++a) {
        double u = b(a, 0);
        for (int k = 0; k < D; ++k) u += Wv(a, k) * grid.values(i, k);
        for (int k = 0; k < H; ++k) u += Wh(a, k) * h(k);
        s += w(a, 0) * std::tanh(u);
      }
      e[static_cast<std::size_t>(i)] = s;
      mx = std::max(mx, s);
    }
    double total = 0.0;
    for (auto& x : e) total += (x = std::exp(x - mx));
    for (int i = 0; i < L; ++i)
      worst_alpha = std::max(worst_alpha, std::abs(alpha(i) - e[static_cast<std::size_t>(i)] / total));
    Vector expect = Vector::Zero(D);
    for (int i = 0; i < L; ++i)
      for (int k = 0; k < D; ++k) expect(k) += alpha(i) * grid.values(i, k);
    worst_sum = std::max(worst_sum, std::abs(alpha.sum() - 1.0));
    worst_z = std::max(worst_z, (z - expect).cwiseAbs().maxCoeff());
  }
  out.need(worst_sum <= 1e-9, "max |sum(alpha) - 1| = " + fmt("%.2e", worst_sum) + " over 1000 draws");
  out.need(worst_z <= 1e-10, "max |z - sum_i alpha_i v_i| = " + fmt("%.2e", worst_z));
  out.need(worst_alpha <= 1e-10, "max |alpha - explicit softmax| = " + fmt("%.2e", worst_alpha));
}

// ---- 3. decoder memorization ---------------------------------------------------

void decoder_memorization(Outcome& out) {
  const auto t0 = Clock::now();
  nc::Rng data(303);
  const auto records = testing::memorization_corpus(20, data, 4, 8);
  const Vocab vocab = testing::vocab_of(records);
  decoder::DecoderConfig cfg;
  cfg.variant = Variant::baseline;
  cfg.vocab_size = vocab.size();
  cfg.feature_dim = 8;
  cfg.hidden = cfg.embed = 32;
  cfg.max_len = 12;
  nc::Rng init(3);
  decoder::TopicDecoder model(cfg, init);
  const auto examples = decoder::make_examples(records, vocab, Variant::baseline);

  decoder::TrainOptions opts;
  opts.epochs = 500;
  opts.batch_size = 4;
  opts.schedule = {1e-2, 1.0, 10};
  opts.seed = 3;
  decoder::train_decoder(model, examples, opts);
  const double nll = decoder::evaluate_token_nll(model, examples);
  out.need(nll <= 0.05, "per-token training loss " + fmt("%.2e", nll) + " (limit 0.05)");

  int exact = 0;
  for (const auto& rec : records) {
    const auto h = decoder::greedy_decode(model, *rec.features, std::nullopt, cfg.max_len);
    std::vector<int> want = vocab.encode(rec.sentences[0].masked);
    want.push_back(Vocab::kEnd);
    if (h.tokens == want) ++exact;
  }
  out.need(exact == 20, "greedy decoding reproduces " + std::to_string(exact) + "/20 training sentences");
  const double s = seconds_since(t0);
  out.need(s < 300.0, "runtime " + fmt("%.1f", s) + " s (limit 300 s)");
}

// ---- 4. topic control ----------------------------------------------------------

void topic_control(Outcome& out) {
  nc::Rng data(404);
  const int L = 4, D = 16;
  const auto records = testing::topic_disjoint_corpus(40, data, L, D);
  const Vocab vocab = testing::vocab_of(records);

  auto topic_of_word = [](const std::string& w) -> std::optional<TopicLabel> {
    for (TopicLabel t : corpus::kAllTopics) {
      const auto pool = testing::topic_words(t);
      if (std::find(pool.begin(), pool.end(), w) != pool.end()) return t;
    }
    return std::nullopt;
  };

  auto trained = [&](Variant v) {
    decoder::DecoderConfig cfg;
    cfg.variant = v;
    cfg.vocab_size = vocab.size();
    cfg.feature_dim = D;
    cfg.hidden = cfg.embed = 32;
    cfg.max_len = 8;
    nc::Rng init(4);
    decoder::TopicDecoder m(cfg, init);
    decoder::TrainOptions opts;
    opts.epochs = 30;
    opts.batch_size = 8;
    opts.schedule = {1e-2, 0.8, 10};
    opts.seed = 4;
    const auto ex = decoder::make_examples(records, vocab, v);
    if (v == Variant::conditional)
      decoder::train_conditional(m, ex, opts);
    else
      decoder::train_decoder(m, ex, opts);
    return m;
  };

  nc::Rng held(405);
  std::vector<FeatureGrid> grids;
  for (int i = 0; i < 50; ++i) grids.push_back(testing::random_grid(held, L, D));
  decoder::GenerateOptions gen;
  gen.beam_size = 5;

  const auto parallel = trained(Variant::parallel);
  int clean = 0, total = 0, foreign = 0, words = 0;
  for (const auto& g : grids) {
    for (TopicLabel t : corpus::kAllTopics) {
      const auto s = decoder::generate(parallel, vocab, g, t, gen);
      bool ok = true;
      for (const auto& tok : s.tokens) {
        if (tok.is_slot()) continue;
        ++words;
        if (topic_of_word(tok.word) != t) {
          ok = false;
          ++foreign;
        }
      }
      ++total;
      if (ok) ++clean;
    }
  }
  out.need(clean == total, "parallel: " + std::to_string(clean) + "/" + std::to_string(total) +
                               " sentences use only their topic's vocabulary (" + std::to_string(foreign) + " of " +
                               std::to_string(words) + " words foreign)");

  const auto conditional = trained(Variant::conditional);
  int by_tc = 0, by_vocab = 0;
  total = 0;
  for (const auto& g : grids) {
    for (TopicLabel t : corpus::kAllTopics) {
      const auto s = decoder::generate(conditional, vocab, g, t, gen);
      ++total;
      if (decoder::classifier::predict(conditional.params(), vocab.encode(s)) == t) ++by_tc;
      // Majority vote over topic vocabularies, independent of the model.
      std::map<TopicLabel, int> votes;
      for (const auto& tok : s.tokens)
        if (auto wt = tok.is_slot() ? std::nullopt : topic_of_word(tok.word)) ++votes[*wt];
      const auto best = std::max_element(votes.begin(), votes.end(),
                                         [](const auto& a, const auto& b) { return a.second < b.second; });
      if (best != votes.end() && best->first == t && best->second * 2 > static_cast<int>(s.tokens.size())) ++by_vocab;
    }
  }
  const double tc_rate = 100.0 * by_tc / total, vocab_rate = 100.0 * by_vocab / total;
  out.need(tc_rate >= 90.0, "conditional: topic classifier assigns the requested topic to " + fmt("%.1f", tc_rate) +
                                "% of " + std::to_string(total) + " held-out sentences (need >= 90%)");
  out.need(vocab_rate >= 90.0,
           "conditional: vocabulary-majority oracle agrees for " + fmt("%.1f", vocab_rate) + "% (need >= 90%)");
}

// ---- 5. beam optimality --------------------------------------------------------

void beam_optimality(Outcome& out) {
  nc::Rng rng(505);
  const int V = 5, T = 3;
  int agree = 0, greedy_same = 0;
  const auto path = fs::temp_directory_path() / "artdesc-acceptance-beam.ckpt";
  for (int trial = 0; trial < 50; ++trial) {
    // Each model goes through a checkpoint round trip before decoding.
    const auto fresh = testing::toy_decoder(Variant::baseline, V, 3, 6, rng, 1.5);
    nc::save_checkpoint(path, nc::Checkpoint{fresh.config().to_json().dump(), fresh.params()});
    const nc::Checkpoint ck = nc::load_checkpoint(path);
    const decoder::TopicDecoder d(decoder::DecoderConfig::from_json(nlohmann::json::parse(ck.metadata)), ck.params);
    const FeatureGrid g = testing::random_grid(rng, 2, 3);

    decoder::Hypothesis best;
    best.log_prob = -INFINITY;
    std::function<void(std::vector<int>)> visit = [&](std::vector<int> seq) {
      if (!seq.empty() && (seq.back() == Vocab::kEnd || static_cast<int>(seq.size()) == T)) {
        const decoder::Hypothesis h{seq, decoder::sequence_log_prob(d, g, std::nullopt, seq)};
        if (best.log_prob == -INFINITY || decoder::better_hypothesis(h, best)) best = h;
        return;
      }
      for (int w = 0; w < V; ++w) {
        auto next = seq;
        next.push_back(w);
        visit(next);
      }
    };
    visit({});
    const auto wide = decoder::beam_decode(d, g, std::nullopt, V * V * V, T);
    if (wide.tokens == best.tokens && std::abs(wide.log_prob - best.log_prob) < 1e-12) ++agree;
    const auto b1 = decoder::beam_decode(d, g, std::nullopt, 1, T);
    const auto gr = decoder::greedy_decode(d, g, std::nullopt, T);
    if (b1.tokens == gr.tokens && b1.log_prob == gr.log_prob) ++greedy_same;
  }
  fs::remove(path);
  out.need(agree == 50, "beam 125 equals exhaustive argmax on " + std::to_string(agree) + "/50 checkpoints");
  out.need(greedy_same == 50, "beam 1 equals greedy on " + std::to_string(greedy_same) + "/50");
}

// ---- 6. retrieval oracle equivalence ---------------------------------------------

void retrieval_oracle(Outcome& out) {
  int same = 0, queries = 0, self_hits = 0, self_total = 0;
  double worst_score = 0.0, worst_top = 0.0;
  for (std::uint64_t seed : {601, 602, 603}) {
    nc::Rng rng(seed);
    const auto arts = testing::random_articles(100, rng);
    const auto idx = retriever::TfIdfIndex::build(arts);
    const testing::DenseTfIdf dense(arts);
    for (int q = 0; q < 20; ++q) {
      const std::string query = testing::random_words(rng, 2 + static_cast<int>(rng.below(10)));
      const auto got = retriever::rank(query, idx, static_cast<int>(idx.size())).hits;
      const auto want = dense.rank(query);
      bool ok = got.size() == want.size();
      for (std::size_t i = 0; ok && i < got.size(); ++i) {
        ok = got[i].id == want[i].id;
        worst_score = std::max(worst_score, std::abs(got[i].score - want[i].score));
      }
      ++queries;
      if (ok) ++same;
    }
    for (const auto& a : arts) {
      const auto r = retriever::rank(a.body, idx, 1).hits;
      ++self_total;
      if (!r.empty() && r[0].id == a.id) ++self_hits;
      worst_top = std::max(worst_top, r.empty() ? 1.0 : std::abs(r[0].score - 1.0));
    }
  }
  out.need(same == queries, "ordering identical to dense brute force for " + std::to_string(same) + "/" +
                                std::to_string(queries) + " queries over three 100-document corpora");
  out.note("max score difference " + fmt("%.2e", worst_score));
  const double r1 = 100.0 * self_hits / self_total;
  out.need(r1 == 100.0, "self-retrieval R@1 = " + fmt("%.1f", r1) + "%");
  out.need(worst_top <= 1e-9, "max |top score - 1| = " + fmt("%.2e", worst_top));
}

// ---- 7. R@k harness ------------------------------------------------------------

double log_binom_pmf(int n, int k, double p) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
         (n - k) * std::log1p(-p);
}

// Central 95% interval of Binomial(n, p): smallest lo with CDF(lo) > 0.025 and
// smallest hi with CDF(hi) >= 0.975.
std::pair<int, int> binomial_95(int n, double p) {
  double cdf = 0.0;
  int lo = -1, hi = n;
  for (int k = 0; k <= n; ++k) {
    cdf += std::exp(log_binom_pmf(n, k, p));
    if (lo < 0 && cdf > 0.025) lo = k;
    if (cdf >= 0.975) {
      hi = k;
      break;
    }
  }
  return {lo, hi};
}

void recall_harness(Outcome& out) {
  // Planted signal through the real index: each "painting" queries with an
  // article's own text and is annotated with that article.
  nc::Rng rng(707);
  const auto arts = testing::random_articles(100, rng);
  const auto idx = retriever::TfIdfIndex::build(arts);
  retriever::Rankings planted_rank;
  retriever::Annotations planted;
  for (const auto& a : arts) {
    for (const auto& h : retriever::rank(a.body, idx, 10).hits) planted_rank["q-" + a.id].push_back(h.id);
    planted["q-" + a.id].push_back({a.id, retriever::RelevanceLabel::correct});
  }
  const auto rep = retriever::eval_recall(planted_rank, planted);
  out.need(rep.row("all").recall.at(1) == 100.0,
           "planted signal: R@1 = " + fmt("%.1f", rep.row("all").recall.at(1)) + " over 100 paintings");

  // Chance level: 1000 paintings with independent random rankings over N
  // articles; annotations are a derangement of the planted ones, so each
  // annotated article is an independent uniform draw and P(hit@k) = k / N.
  const int n = 1000, N = 50;
  std::vector<std::string> ids;
  for (int a = 0; a < N; ++a) ids.push_back("art" + std::to_string(a));
  retriever::Rankings rankings;
  std::vector<std::string> top;
  for (int i = 0; i < n; ++i) {
    auto perm = ids;
    rng.shuffle(perm);
    perm.resize(10);
    top.push_back(perm[0]);
    rankings["p" + std::to_string(i)] = perm;
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  retriever::Annotations shuffled;
  for (int j = 0; j < n; ++j) {
    const int i = order[j], src = order[(j + 1) % n];
    shuffled["p" + std::to_string(i)].push_back({top[src], retriever::RelevanceLabel::correct});
  }
  // Planted (unshuffled) sanity check on the same rankings.
  retriever::Annotations aligned;
  for (int i = 0; i < n; ++i) aligned["p" + std::to_string(i)].push_back({top[i], retriever::RelevanceLabel::correct});
  out.need(retriever::eval_recall(rankings, aligned).row("all").recall.at(1) == 100.0,
           "planted signal on 1000 random rankings: R@1 = 100.0");

  const auto chance = retriever::eval_recall(rankings, shuffled);
  for (int k : {1, 5, 10}) {
    const double p = static_cast<double>(k) / N;
    const auto [lo, hi] = binomial_95(n, p);
    const double got = chance.row("all").recall.at(k);
    const int hits = static_cast<int>(std::lround(got * n / 100.0));
    out.need(hits >= lo && hits <= hi, "shuffled R@" + std::to_string(k) + " = " + fmt("%.1f", got) +
                                           "% (expected " + fmt("%.1f", 100.0 * p) + "%, 95% band " +
                                           fmt("%.1f", 100.0 * lo / n) + "-" + fmt("%.1f", 100.0 * hi / n) + "%)");
  }
}

// ---- 8. fill accuracy ------------------------------------------------------------

void fill_accuracy(Outcome& out) {
  nc::Rng data(808);
  const auto train = testing::cue_fill_corpus(500, data);
  const auto held = testing::cue_fill_corpus(100, data);
  const auto vocab = filler::build_filler_vocab(train);
  filler::FillerConfig cfg;
  cfg.vocab_size = vocab.size();
  cfg.embed = cfg.hidden = cfg.candidate = 16;
  nc::Rng init(8);
  filler::SlotFiller model(cfg, init);
  filler::FillTrainOptions opts;
  opts.epochs = 15;
  opts.batch_size = 8;
  opts.schedule = {1e-2, 1.0, 10};
  opts.seed = 8;
  filler::train_filler(model, vocab, train, opts);

  std::size_t right = 0, total = 0;
  for (const auto& ex : held) {
    const auto dec = filler::decode_fill_input(ex.input);
    const auto r = filler::fill_slots(model, vocab, {corpus::MaskedSentence{dec.y, TopicLabel::content}},
                                      dec.candidates);
    audit(r);
    for (std::size_t s = 0; s < r.decisions.size(); ++s) {
      ++total;
      if (r.decisions[s].choice && r.decisions[s].choice->surface == ex.targets[s]) ++right;
    }
  }
  out.need(right == total, "held-out slot accuracy " + std::to_string(right) + "/" + std::to_string(total) +
                               " (500 train / 100 held-out sentences)");
}

// ---- 9. masking round trip -------------------------------------------------------

std::string ascii_lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void masking_round_trip(Outcome& out) {
  nc::Rng rng(909);
  const std::vector<std::string> words{"The", "saint", "Mary", "of", "Rome", "1502", ",", "panel", "Van",
                                       "Eyck", "holds", "a", "Book", "in", "Delft", "XVII", "St", "."};
  int failures = 0, pairs = 0, slots = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::string> toks;
    const auto n = 1 + rng.below(20);
    for (std::uint64_t i = 0; i < n; ++i) toks.push_back(words[rng.below(words.size())]);
    std::vector<corpus::EntitySpan> spans;
    for (std::size_t i = 0; i < toks.size();) {
      if (rng.uniform() < 0.3) {
        const std::size_t len = 1 + rng.below(std::min<std::size_t>(3, toks.size() - i));
        spans.push_back({i, i + len, corpus::kAllEntityTypes[rng.below(corpus::kEntityTypeCount)]});
        i += len;
      } else {
        ++i;
      }
    }
    // Expected: words lowercased, each entity one original-case unit.
    auto expected = [&](const std::vector<corpus::EntitySpan>& sp) {
      std::vector<std::string> e;
      std::size_t at = 0;
      for (const auto& s : sp) {
        for (; at < s.begin; ++at) e.push_back(ascii_lower(toks[at]));
        std::string unit;
        for (; at < s.end; ++at) unit += (unit.empty() ? "" : " ") + toks[at];
        e.push_back(unit);
      }
      for (; at < toks.size(); ++at) e.push_back(ascii_lower(toks[at]));
      return e;
    };

    ++pairs;
    slots += static_cast<int>(spans.size());
    try {
      const auto m = corpus::mask_tokens(toks, spans);
      bool ok = m.masked.slot_count() == spans.size() && corpus::unmask(m.masked, m.values) == expected(spans);
      // Every other trial goes through the text path: the sentence as a
      // string plus entity values, located again by the tokenizer.
      if (ok && trial % 2 == 0) {
        const std::string sentence = corpus::join(toks);
        ok = corpus::tokenize(sentence) == toks;
        std::vector<std::pair<std::string, EntityType>> ents;
        for (std::size_t k = 0; k < spans.size(); ++k) ents.emplace_back(m.values[k], spans[k].type);
        // A value may be found at an earlier occurrence than the generated
        // span; the identity must hold for whatever spans were located.
        const auto located = corpus::locate_entities(toks, ents);
        const auto again = corpus::mask_sentence(sentence, located);
        ok = ok && again.values == m.values && corpus::unmask(again.masked, again.values) == expected(located);
      }
      if (!ok) ++failures;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  out.need(failures == 0, std::to_string(pairs) + " generated pairs (" + std::to_string(slots) +
                              " entities): " + std::to_string(failures) + " failures");
}

// ---- 10. metric fixtures -----------------------------------------------------------

metrics::Tokens split(const std::string& s) {
  std::istringstream in(s);
  metrics::Tokens t;
  for (std::string w; in >> w;) t.push_back(w);
  return t;
}

void metric_fixtures(Outcome& out) {
  // Hand-worked: p_n = 5/6, 3/5, 1/4, 0 -> 0.1/3, BP = 1.
  const double b1 = 100.0 * std::exp((std::log(5.0 / 6) + std::log(3.0 / 5) + std::log(1.0 / 4) + std::log(0.1 / 3)) / 4);
  const double got1 = metrics::bleu4(split("the cat sat on the mat"), {split("the cat is on the mat")});
  out.need(std::abs(got1 - b1) < 1e-6 && std::abs(b1 - 25.406637407730738) < 1e-9,
           "BLEU-4 fixture A " + fmt("%.9f", got1) + " (expected 25.406637408)");
  // p_n = 1, 3/4, 1/3, 0.1/2 and BP = exp(1 - 6/5).
  const double got2 = metrics::bleu4(split("the cat on the mat"), {split("the cat sat on the mat")});
  out.need(std::abs(got2 - 27.37591267534727) < 1e-6, "BLEU-4 fixture B (brevity penalty) " + fmt("%.9f", got2) +
                                                          " (expected 27.375912675)");
  const double r1 = metrics::rouge_l(split("the cat sat on the mat"), split("the cat is on the mat"));
  out.need(std::abs(r1 - 100.0 * 5 / 6) < 1e-6, "ROUGE-L fixture A " + fmt("%.9f", r1) + " (expected 83.333333333)");
  const double r2 = metrics::rouge_l(split("a b c d e"), split("a x c y e z"));
  out.need(std::abs(r2 - 100.0 * 0.66 / 1.22) < 1e-6, "ROUGE-L fixture B " + fmt("%.9f", r2) +
                                                          " (expected 54.098360656)");
  const auto x = split("a portrait of a young woman in a red dress");
  out.need(std::abs(metrics::bleu4(x, {x}) - 100.0) < 1e-9 && std::abs(metrics::rouge_l(x, x) - 100.0) < 1e-9,
           "identity inputs score 100 on both metrics");
  out.need(metrics::bleu4(split("one two three four"), {split("five six seven eight")}) < 1e-3,
           "zero overlap scores below 1e-3");
}

// ---- 11. end-to-end determinism and oracle reconstruction ---------------------------

std::string describe_all(const pipeline::PipelineConfig& cfg) {
  const pipeline::Logger quiet;
  const auto records = pipeline::load_training_corpus(cfg, "acceptance", true);
  const auto tagger = pipeline::make_tagger(cfg);
  const auto models = pipeline::load_models(cfg, quiet);
  const auto opts = pipeline::describe_options(cfg, *tagger);
  const auto prov = pipeline::provenance(cfg, models);
  std::string out;
  for (const auto& rec : records) {
    auto j = pipeline::describe({{rec.id, rec.attributes, rec.objects, rec.reference}, *rec.features}, models, opts)
                 .to_json();
    j["provenance"] = prov;
    out += j.dump() + "\n";
  }
  return out;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void end_to_end(Outcome& out, const std::string& cli) {
  const pipeline::Logger quiet;
  // Two independent training runs with the same seed, in separate directories.
  std::vector<pipeline::PipelineConfig> cfgs;
  for (const char* name : {"acceptance-e2e-a", "acceptance-e2e-b"}) {
    const auto toy = testing::write_toy_project(testing::scratch_dir(name), 6, 1101);
    auto cfg = pipeline::load_config(toy.config);
    pipeline::train_decoder_stage(cfg, quiet);
    pipeline::train_filler_stage(cfg, quiet);
    pipeline::build_index(cfg, cfg.knowledge, cfg.index_path(), quiet);
    cfgs.push_back(cfg);
  }
  const std::string a1 = describe_all(cfgs[0]), a2 = describe_all(cfgs[0]), b = describe_all(cfgs[1]);
  out.need(!a1.empty() && a1 == a2, "describe() output identical across two runs (" + std::to_string(a1.size()) +
                                        " bytes, 6 paintings)");
  out.need(a1 == b, "identical after retraining from scratch with the same seed");
  out.need(file_bytes(cfgs[0].decoder_checkpoint()) == file_bytes(cfgs[1].decoder_checkpoint()) &&
               file_bytes(cfgs[0].filler_checkpoint()) == file_bytes(cfgs[1].filler_checkpoint()),
           "checkpoints byte-identical across the two training runs");

  if (!cli.empty()) {
    const auto dir = cfgs[0].checkpoints.parent_path();
    const std::string base = "\"" + cli + "\" --config \"" + (dir / "config.json").string() + "\" describe --all";
    const int s1 = std::system((base + " --out \"" + (dir / "cli1.jsonl").string() + "\" 2>/dev/null").c_str());
    const int s2 = std::system((base + " --out \"" + (dir / "cli2.jsonl").string() + "\" 2>/dev/null").c_str());
    const std::string c1 = file_bytes(dir / "cli1.jsonl");
    out.need(s1 == 0 && s2 == 0 && !c1.empty() && c1 == file_bytes(dir / "cli2.jsonl") && c1 == a1,
             "command-line describe: two runs byte-identical and equal to the library output");
  }

  // Reference-as-oracle mode: the memorizing toy models must reproduce the
  // reference paragraph exactly.
  auto oracle = cfgs[0];
  oracle.knowledge_mode = pipeline::KnowledgeMode::reference_oracle;
  const auto records = pipeline::load_training_corpus(oracle, "acceptance", true);
  const auto tagger = pipeline::make_tagger(oracle);
  const auto models = pipeline::load_models(oracle, quiet);
  const auto opts = pipeline::describe_options(oracle, *tagger);
  int exact = 0;
  for (const auto& rec : records) {
    const auto d =
        pipeline::describe({{rec.id, rec.attributes, rec.objects, rec.reference}, *rec.features}, models, opts);
    // Re-run the fill on the decoded sentences to audit the type invariant.
    const auto g = filler::extract_candidates({rec.reference}, rec.attributes, *tagger);
    audit(filler::fill_slots(models.filler.model, models.filler.vocab, d.masked, g));
    if (d.text == rec.reference) ++exact;
    else out.note(rec.id + ": got \"" + d.text + "\"");
  }
  out.need(exact == static_cast<int>(records.size()), "reference-as-oracle output equals the reference for " +
                                                          std::to_string(exact) + "/" +
                                                          std::to_string(records.size()) + " paintings");
}

// ---- 12. documented anchors --------------------------------------------------------

void anchors(Outcome& out) {
  out.note("Published reference points (full-scale data and pretrained encoders; not reproducible here):");
  out.note("  slots per sentence     content 0.98   form 0.91   context 2.12");
  out.note("  parallel decoder       BLEU-4 8.8");
  out.note("  retrieval              R@1 13.8   R@5 36.6   R@10 45.5");
  out.note("The same measurements are produced by `artdesc evaluate` and `artdesc eval-recall`");
  out.note("when the full painting corpus and knowledge articles are supplied.");
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
#ifdef ARTDESC_CLI
  cli = ARTDESC_CLI;
#endif
  if (argc > 1) cli = argv[1];
  if (!cli.empty() && !fs::exists(cli)) cli.clear();

  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "gradient fidelity", gradient_fidelity},
      {2, "attention contract", attention_contract},
      {3, "decoder memorization", decoder_memorization},
      {4, "topic control", topic_control},
      {5, "beam optimality", beam_optimality},
      {6, "retrieval oracle equivalence", retrieval_oracle},
      {7, "R@k harness correctness", recall_harness},
      {8, "fill accuracy", fill_accuracy},
      {9, "masking round trip", masking_round_trip},
      {10, "metric fixtures", metric_fixtures},
      {11, "end-to-end determinism and oracle reconstruction", [&](Outcome& o) { end_to_end(o, cli); }},
      {12, "documented reference anchors", anchors},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.need(false, std::string("exception: ") + e.what());
    }
    if (c.id == 8) {
      o.need(g_type_violations == 0, "type-compatibility violations so far: " + std::to_string(g_type_violations) +
                                         " in " + std::to_string(g_decisions) + " decisions");
    }
    if (c.id == 12) o.note("context only: passes when rendered");
    const double s = seconds_since(t0);
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << "  [" << fmt("%.1f", s)
              << " s]\n";
    for (const auto& n : o.notes) std::cout << "        " << n << '\n';
    std::cout.flush();
    if (!o.pass) ++failed;
  }
  if (g_type_violations != 0) {
    std::cout << "FAIL  type-compatibility invariant: " << g_type_violations << " violations in all runs\n";
    ++failed;
  } else {
    std::cout << "        type-compatibility invariant held in all " << g_decisions << " fill decisions\n";
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion/criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
