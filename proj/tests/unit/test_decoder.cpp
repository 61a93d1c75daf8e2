#include <cmath>
#include <filesystem>
#include <functional>

#include "../support/synthetic.hpp"
#include "artdesc/corpus/features.hpp"
#include "artdesc/decoder/checkpoint.hpp"
#include "artdesc/decoder/search.hpp"
#include "artdesc/decoder/train.hpp"
#include "artdesc/errors.hpp"
#include "artdesc/numcore/grad_check.hpp"
#include "doctest.h"

using namespace artdesc;
using namespace artdesc::decoder;
using corpus::FeatureGrid;
using corpus::TopicLabel;
using corpus::Vocab;
using nc::Matrix;
using nc::Vector;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Attention computed location by location with explicit loops.
std::pair<Vector, Vector> attention_oracle(const nc::ParamStore& p, const std::string& pre, const Matrix& grid,
                                           const Vector& h) {
  const Matrix& Wv = p.value(pre + "att.Wv");
  const Matrix& Wh = p.value(pre + "att.Wh");
  const Matrix& b = p.value(pre + "att.b");
  const Matrix& w = p.value(pre + "att.w");
  const auto L = grid.rows(), D = grid.cols(), A = Wv.rows();
  std::vector<double> g(static_cast<std::size_t>(L));
  for (Eigen::Index i = 0; i < L; ++i) {
    double s = 0;
    for (Eigen::Index a = 0; a < A; ++a) {
      double u = b(a, 0);
      for (Eigen::Index d = 0; d < D; ++d) u += Wv(a, d) * grid(i, d);
      for (Eigen::Index k = 0; k < h.size(); ++k) u += Wh(a, k) * h(k);
      s += w(a, 0) * std::tanh(u);
    }
    g[static_cast<std::size_t>(i)] = s;
  }
  double z = 0;
  Vector alpha(L);
  for (Eigen::Index i = 0; i < L; ++i) z += std::exp(g[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = 0; i < L; ++i) alpha(i) = std::exp(g[static_cast<std::size_t>(i)]) / z;
  Vector ctx = Vector::Zero(D);
  for (Eigen::Index i = 0; i < L; ++i)
    for (Eigen::Index d = 0; d < D; ++d) ctx(d) += alpha(i) * grid(i, d);
  return {ctx, alpha};
}

struct ToySetup {
  nc::Rng rng{42};
  FeatureGrid grid;
  ToySetup() { grid = testing::random_grid(rng, 3, 4); }
};

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("attend contract") {
  nc::Rng rng(1);
  TopicDecoder d = testing::toy_decoder(Variant::baseline, 12, 4, 8, rng);

  FeatureGrid one = testing::random_grid(rng, 1, 4);
  {
    nc::Tape tape(&d.params(), false);
    auto ctx = d.bind(tape, one, std::nullopt);
    auto att = d.attend(tape, ctx, tape.constant(Matrix::Constant(8, 1, 0.3)));
    CHECK(att.alpha.value()(0, 0) == 1.0);
    CHECK(att.context.value().col(0) == one.values.row(0).transpose());
  }

  FeatureGrid same{Matrix(5, 4)};
  for (int i = 0; i < 5; ++i) same.values.row(i) << 0.1, -0.4, 2.0, 0.7;
  {
    nc::Tape tape(&d.params(), false);
    auto ctx = d.bind(tape, same, std::nullopt);
    auto att = d.attend(tape, ctx, tape.constant(testing::random_grid(rng, 8, 1).values));
    CHECK(max_abs(att.context.value().col(0) - same.values.row(0).transpose()) < 1e-12);
  }

  for (int trial = 0; trial < 100; ++trial) {
    FeatureGrid g = testing::random_grid(rng, 1 + static_cast<int>(rng.below(9)), 4, 2.0);
    const Vector h = testing::random_grid(rng, 8, 1).values.col(0);
    nc::Tape tape(&d.params(), false);
    auto ctx = d.bind(tape, g, std::nullopt);
    auto att = d.attend(tape, ctx, tape.constant(h));
    auto [z, alpha] = attention_oracle(d.params(), "", g.values, h);
    CHECK(std::abs(att.alpha.value().sum() - 1.0) < 1e-9);
    CHECK(max_abs(att.alpha.value().col(0) - alpha) < 1e-10);
    CHECK(max_abs(att.context.value().col(0) - z) < 1e-10);
  }

  FeatureGrid wrong = testing::random_grid(rng, 3, 5);
  nc::Tape tape(&d.params(), false);
  CHECK_THROWS_AS(d.bind(tape, wrong, std::nullopt), ShapeError);
}

TEST_CASE("init_state") {
  nc::Rng rng(2);
  TopicDecoder d = testing::toy_decoder(Variant::baseline, 12, 4, 8, rng);
  {
    nc::ParamStore zero = d.params();
    for (auto& [_, e] : zero.entries()) e.value.setZero();
    TopicDecoder z(d.config(), zero);
    nc::Tape tape(&z.params(), false);
    FeatureGrid g{Matrix::Zero(3, 4)};
    auto st = z.init_state(tape, z.bind(tape, g, std::nullopt));
    CHECK(st.h.value().isZero(0.0));
    CHECK(st.c.value().isZero(0.0));
  }
  for (int trial = 0; trial < 50; ++trial) {
    FeatureGrid g = testing::random_grid(rng, 4, 4, 5.0);
    nc::Tape tape(&d.params(), false);
    auto st = d.init_state(tape, d.bind(tape, g, std::nullopt));
    const Vector pooled = corpus::mean_pool(g);
    const Vector h = (d.params().value("init_h.W") * pooled + d.params().value("init_h.b")).array().tanh().matrix();
    const Vector c = (d.params().value("init_c.W") * pooled + d.params().value("init_c.b")).array().tanh().matrix();
    CHECK(max_abs(st.h.value().col(0) - h) < 1e-12);
    CHECK(max_abs(st.c.value().col(0) - c) < 1e-12);
    CHECK(st.h.value().cwiseAbs().maxCoeff() < 1.0);
  }
}

TEST_CASE("decode step against a scratch oracle") {
  nc::Rng rng(3);
  for (Variant v : {Variant::baseline, Variant::conditional, Variant::parallel}) {
    TopicDecoder d = testing::toy_decoder(v, 12, 4, 8, rng, 0.3);
    const TopicLabel topic = TopicLabel::form;
    const std::string pre = sub_decoder_prefix(v, topic);
    FeatureGrid g = testing::random_grid(rng, 3, 4);
    const Vector h0 = testing::random_grid(rng, 8, 1).values.col(0);
    const Vector c0 = testing::random_grid(rng, 8, 1).values.col(0);
    const int prev = 7;

    nc::Tape tape(&d.params(), false);
    auto ctx = d.bind(tape, g, topic);
    auto out = d.step(tape, ctx, {tape.constant(h0), tape.constant(c0)}, prev);
    const Vector p = nc::softmax(out.logits.value());
    CHECK(p.size() == 12);
    CHECK(std::abs(p.sum() - 1.0) < 1e-9);

    auto [z, alpha] = attention_oracle(d.params(), pre, g.values, h0);
    Vector x(z.size() + 8 + (v == Variant::conditional ? 4 : 0));
    x << z, d.params().value(pre + "embed").row(prev).transpose(),
        (v == Variant::conditional ? Vector(d.params().value("topic_embed").row(1).transpose()) : Vector());
    const Matrix& Wx = d.params().value(pre + "lstm.Wx");
    const Matrix& Wh = d.params().value(pre + "lstm.Wh");
    const Matrix& b = d.params().value(pre + "lstm.b");
    Vector h(8), c(8);
    for (int j = 0; j < 8; ++j) {
      double pre_g[4];
      for (int gate = 0; gate < 4; ++gate) {
        const int r = gate * 8 + j;
        double s = b(r, 0);
        for (Eigen::Index k = 0; k < x.size(); ++k) s += Wx(r, k) * x(k);
        for (int k = 0; k < 8; ++k) s += Wh(r, k) * h0(k);
        pre_g[gate] = s;
      }
      c(j) = sig(pre_g[1]) * c0(j) + sig(pre_g[0]) * std::tanh(pre_g[2]);
      h(j) = sig(pre_g[3]) * std::tanh(c(j));
    }
    Vector hz(8 + z.size());
    hz << h, z;
    Vector logits = d.params().value(pre + "out.W") * hz + d.params().value(pre + "out.b");
    double zsum = 0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) zsum += std::exp(logits(i));
    for (Eigen::Index i = 0; i < logits.size(); ++i) CHECK(std::abs(p(i) - std::exp(logits(i)) / zsum) < 1e-10);
    CHECK(max_abs(out.state.h.value().col(0) - h) < 1e-10);
  }
}

TEST_CASE("conditional decoder depends on the topic") {
  nc::Rng rng(4);
  TopicDecoder d = testing::toy_decoder(Variant::conditional, 12, 4, 8, rng);
  FeatureGrid g = testing::random_grid(rng, 3, 4);
  auto dist = [&](TopicLabel t) {
    nc::Tape tape(&d.params(), false);
    auto ctx = d.bind(tape, g, t);
    auto st = d.init_state(tape, ctx);
    return Vector(nc::softmax(d.step(tape, ctx, st, Vocab::kStart).logits.value()));
  };
  CHECK(max_abs(dist(TopicLabel::content) - dist(TopicLabel::context)) > 1e-6);
  d.params().mutable_value("topic_embed").row(2) = d.params().value("topic_embed").row(0);
  CHECK(max_abs(dist(TopicLabel::content) - dist(TopicLabel::context)) == 0.0);

  nc::Tape tape(&d.params(), false);
  CHECK_THROWS_AS(d.bind(tape, g, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(corpus::topic_from_index(3), std::invalid_argument);
}

TEST_CASE("gradient checks at toy size") {
  nc::Rng rng(5);
  FeatureGrid g = testing::random_grid(rng, 3, 4);
  const std::vector<int> target{5, 9, Vocab::kEnd};
  for (Variant v : {Variant::baseline, Variant::parallel, Variant::conditional}) {
    TopicDecoder d = testing::toy_decoder(v, 12, 4, 8, rng);
    TrainingExample ex{&g, TopicLabel::context, target};
    const double w = v == Variant::conditional ? 1.0 : 0.0;
    const auto report = nc::grad_check([&](nc::Tape& t) { return example_loss(t, d, ex, w); }, d.params());
    INFO("variant " << to_string(v) << " worst " << report.worst_param << "[" << report.worst_index << "] analytic "
                    << report.analytic << " numeric " << report.numeric);
    CHECK(report.max_relative_error < 1e-4);
  }
}

TEST_CASE("parallel sub-decoders are isolated") {
  nc::Rng rng(6);
  TopicDecoder d = testing::toy_decoder(Variant::parallel, 12, 4, 8, rng);
  FeatureGrid g = testing::random_grid(rng, 3, 4);
  for (TopicLabel topic : corpus::kAllTopics) {
    d.params().zero_grad();
    nc::Tape tape(&d.params());
    TrainingExample ex{&g, topic, {4, 8, Vocab::kEnd}};
    tape.backward(example_loss(tape, d, ex, 0.0), d.params());
    const std::string mine = sub_decoder_prefix(Variant::parallel, topic);
    double own = 0;
    for (const auto& [name, e] : d.params().entries()) {
      if (name.rfind(mine, 0) == 0) {
        own += e.grad.cwiseAbs().sum();
      } else {
        CHECK(e.grad.isZero(0.0));
      }
    }
    CHECK(own > 0);
  }
}

TEST_CASE("training: learning signal, determinism, ablation identity") {
  nc::Rng data_rng(7);
  auto records = testing::topic_disjoint_corpus(6, data_rng, 3, 4);
  const Vocab vocab = testing::vocab_of(records);

  auto fresh = [&](Variant v) {
    DecoderConfig cfg;
    cfg.variant = v;
    cfg.vocab_size = vocab.size();
    cfg.feature_dim = 4;
    cfg.hidden = 16;
    cfg.embed = 16;
    cfg.classifier_filters = 4;
    nc::Rng rng(99);
    return TopicDecoder(cfg, rng);
  };
  TrainOptions opts;
  opts.epochs = 3;
  opts.batch_size = 4;
  opts.schedule.initial = 1e-2;
  opts.seed = 5;

  for (Variant v : {Variant::baseline, Variant::parallel, Variant::conditional}) {
    const auto examples = make_examples(records, vocab, v);
    CHECK(examples.size() == (v == Variant::baseline ? 6u : 18u));
    TopicDecoder a = fresh(v), b = fresh(v);
    const auto ha = train_decoder(a, examples, opts);
    const auto hb = train_decoder(b, examples, opts);
    REQUIRE(ha.size() == 3);
    CHECK(ha.back().token_nll < ha.front().token_nll);
    TopicDecoder one = fresh(v);
    TrainOptions single = opts;
    single.epochs = 1;
    train_decoder(one, examples, single);
    CHECK(evaluate_token_nll(one, examples) < std::log(static_cast<double>(vocab.size())));
    for (std::size_t e = 0; e < ha.size(); ++e) CHECK(ha[e].token_nll == hb[e].token_nll);
    for (const auto& name : a.params().names()) CHECK(a.params().value(name) == b.params().value(name));
  }

  const auto examples = make_examples(records, vocab, Variant::conditional);
  TopicDecoder plain = fresh(Variant::conditional), ablated = fresh(Variant::conditional),
               joint = fresh(Variant::conditional);
  TrainOptions zero = opts;
  zero.classifier_weight = 0.0;
  const auto hp = train_decoder(plain, examples, opts);
  const auto ha = train_conditional(ablated, examples, zero);
  for (std::size_t e = 0; e < hp.size(); ++e) {
    CHECK(hp[e].token_nll == ha[e].token_nll);
    CHECK(hp[e].joint_loss == ha[e].joint_loss);
  }
  const auto hj = train_conditional(joint, examples, opts);
  for (const auto& st : hj) CHECK(st.joint_loss >= st.token_nll);
  // Per-example: L_cond >= L_mle.
  for (const auto& ex : examples) {
    nc::Tape tape(&joint.params(), false);
    LossParts parts;
    const double total = example_loss(tape, joint, ex, 1.0, &parts).scalar();
    CHECK(parts.classifier >= 0.0);
    CHECK(total >= parts.nll);
  }

  TopicDecoder base = fresh(Variant::baseline);
  CHECK_THROWS_AS(train_conditional(base, examples, opts), ConfigError);

  DecoderConfig small;
  small.vocab_size = 5;
  small.feature_dim = 4;
  small.hidden = 4;
  small.embed = 4;
  nc::Rng r(1);
  TopicDecoder tiny(small, r);
  CHECK_THROWS_AS(train_decoder(tiny, make_examples(records, vocab, Variant::baseline), opts), ConfigError);
}

TEST_CASE("make_examples follows the topic-split protocol") {
  nc::Rng rng(8);
  auto records = testing::topic_disjoint_corpus(2, rng, 2, 3);
  // Drop the form sentence of the first painting and un-annotate its context sentence.
  records[0].sentences.erase(records[0].sentences.begin() + 1);
  records[0].sentences[1].has_topic = false;
  const Vocab vocab = testing::vocab_of(records);
  const auto ex = make_examples(records, vocab, Variant::parallel);
  REQUIRE(ex.size() == 4);
  CHECK(ex[0].topic == TopicLabel::content);
  CHECK(ex[1].topic == TopicLabel::content);
  CHECK(ex[0].target.back() == Vocab::kEnd);
  const auto base = make_examples(records, vocab, Variant::baseline);
  REQUIRE(base.size() == 2);
  CHECK(base[0].target.size() == records[0].sentences[0].masked.tokens.size() + 1);

  records[1].features.reset();
  CHECK_THROWS_AS(make_examples(records, vocab, Variant::baseline), DataError);
}

TEST_CASE("search: greedy, beam and exhaustive argmax") {
  nc::Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    TopicDecoder d = testing::toy_decoder(Variant::baseline, 5, 3, 6, rng, 1.5);
    FeatureGrid g = testing::random_grid(rng, 2, 3);
    const Hypothesis greedy = greedy_decode(d, g, std::nullopt, 3);
    const Hypothesis b1 = beam_decode(d, g, std::nullopt, 1, 3);
    CHECK(b1.tokens == greedy.tokens);
    CHECK(b1.log_prob == greedy.log_prob);
    CHECK(beam_decode(d, g, std::nullopt, 5, 3).log_prob >= greedy.log_prob);

    // Enumerate every terminated sequence of at most three tokens.
    Hypothesis best;
    best.log_prob = -INFINITY;
    std::function<void(std::vector<int>)> visit = [&](std::vector<int> seq) {
      if (!seq.empty() && (seq.back() == Vocab::kEnd || seq.size() == 3)) {
        Hypothesis h{seq, sequence_log_prob(d, g, std::nullopt, seq)};
        if (best.log_prob == -INFINITY || better_hypothesis(h, best)) best = h;
        return;
      }
      for (int w = 0; w < 5; ++w) {
        auto next = seq;
        next.push_back(w);
        visit(next);
      }
    };
    visit({});
    const Hypothesis wide = beam_decode(d, g, std::nullopt, 200, 3);
    CHECK(wide.tokens == best.tokens);
    CHECK(std::abs(wide.log_prob - best.log_prob) < 1e-12);
  }
  TopicDecoder d = testing::toy_decoder(Variant::baseline, 5, 3, 6, rng);
  FeatureGrid g = testing::random_grid(rng, 2, 3);
  CHECK_THROWS_AS(beam_decode(d, g, std::nullopt, 0, 3), std::invalid_argument);
}

TEST_CASE("better_hypothesis tie-breaking") {
  CHECK(better_hypothesis({{4, 2}, -1.0}, {{3, 4, 2}, -1.0}));
  CHECK(better_hypothesis({{3, 2}, -1.0}, {{4, 2}, -1.0}));
  CHECK(better_hypothesis({{9, 9, 2}, -0.5}, {{3, 2}, -1.0}));
}

TEST_CASE("generate is deterministic and checkpoints round-trip") {
  nc::Rng rng(11);
  auto records = testing::memorization_corpus(3, rng, 2, 4);
  const Vocab vocab = testing::vocab_of(records);
  TopicDecoder d = testing::toy_decoder(Variant::parallel, vocab.size(), 4, 8, rng);
  const FeatureGrid& g = *records[0].features;
  const auto a = generate(d, vocab, g, TopicLabel::form);
  CHECK(a == generate(d, vocab, g, TopicLabel::form));
  CHECK(a.topic == TopicLabel::form);

  const auto path = std::filesystem::temp_directory_path() / "artdesc_test_decoder.ckpt";
  save_decoder(path, d, vocab, 77);
  const DecoderBundle back = load_decoder(path, Variant::parallel);
  CHECK(back.vocab == vocab);
  CHECK(back.seed == 77);
  CHECK(generate(back.model, back.vocab, g, TopicLabel::form) == a);
  CHECK_THROWS_AS(load_decoder(path, Variant::conditional), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("compose_description") {
  using testing::sentence_from;
  std::map<TopicLabel, corpus::MaskedSentence> m;
  m[TopicLabel::context] = sentence_from({"z"}, TopicLabel::context);
  m[TopicLabel::content] = sentence_from({"x"}, TopicLabel::content);
  m[TopicLabel::form] = sentence_from({"y"}, TopicLabel::form);
  const auto all = compose_description(m);
  REQUIRE(all.sentences.size() == 3);
  CHECK(all.sentences[0].render() == "x");
  CHECK(all.sentences[1].render() == "y");
  CHECK(all.sentences[2].render() == "z");
  CHECK(all.warnings.empty());

  std::map<TopicLabel, corpus::MaskedSentence> only{{TopicLabel::content, m[TopicLabel::content]}};
  const auto partial = compose_description(only);
  CHECK(partial.sentences.size() == 1);
  CHECK(partial.warnings.size() == 2);
}
