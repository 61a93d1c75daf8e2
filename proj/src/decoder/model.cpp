#include "artdesc/decoder/model.hpp"

#include <stdexcept>

#include "artdesc/corpus/features.hpp"
#include "artdesc/corpus/vocab.hpp"
#include "artdesc/errors.hpp"

namespace artdesc::decoder {

using corpus::TopicLabel;
using nc::Tape;
using nc::Tensor;
using nc::Var;

namespace {

bool is_bias(const std::string& name) {
  const auto dot = name.rfind('.');
  const std::string leaf = dot == std::string::npos ? name : name.substr(dot + 1);
  return leaf == "b";
}

int lstm_input_width(const DecoderConfig& c) {
  return c.feature_dim + c.embed + (c.variant == Variant::conditional ? c.topic_embed : 0);
}

void add_sub_decoder(std::vector<std::pair<std::string, std::pair<int, int>>>& out, const DecoderConfig& c,
                     const std::string& p) {
  const int H = c.hidden, D = c.feature_dim, A = c.attention_width(), V = c.vocab_size;
  out.push_back({p + "embed", {V, c.embed}});
  out.push_back({p + "init_h.W", {H, D}});
  out.push_back({p + "init_h.b", {H, 1}});
  out.push_back({p + "init_c.W", {H, D}});
  out.push_back({p + "init_c.b", {H, 1}});
  out.push_back({p + "att.Wv", {A, D}});
  out.push_back({p + "att.Wh", {A, H}});
  out.push_back({p + "att.b", {A, 1}});
  out.push_back({p + "att.w", {A, 1}});
  out.push_back({p + "lstm.Wx", {4 * H, lstm_input_width(c)}});
  out.push_back({p + "lstm.Wh", {4 * H, H}});
  out.push_back({p + "lstm.b", {4 * H, 1}});
  out.push_back({p + "out.W", {V, H + D}});
  out.push_back({p + "out.b", {V, 1}});
}

}  // namespace

std::vector<std::pair<std::string, std::pair<int, int>>> TopicDecoder::parameter_shapes(const DecoderConfig& c) {
  c.validate();
  std::vector<std::pair<std::string, std::pair<int, int>>> out;
  if (c.variant == Variant::parallel) {
    for (TopicLabel t : corpus::kAllTopics) add_sub_decoder(out, c, sub_decoder_prefix(c.variant, t));
  } else {
    add_sub_decoder(out, c, "");
  }
  if (c.variant == Variant::conditional) {
    const int F = c.classifier_filters;
    out.push_back({"topic_embed", {corpus::kTopicCount, c.topic_embed}});
    out.push_back({"tc.embed", {c.vocab_size, c.embed}});
    out.push_back({"tc.conv2.W", {F, 2 * c.embed}});
    out.push_back({"tc.conv2.b", {F, 1}});
    out.push_back({"tc.conv3.W", {F, 3 * c.embed}});
    out.push_back({"tc.conv3.b", {F, 1}});
    out.push_back({"tc.out.W", {corpus::kTopicCount, 2 * F}});
    out.push_back({"tc.out.b", {corpus::kTopicCount, 1}});
  }
  return out;
}

TopicDecoder::TopicDecoder(const DecoderConfig& config, nc::Rng& rng) : config_(config) {
  for (const auto& [name, shape] : parameter_shapes(config_)) {
    if (is_bias(name)) {
      params_.add(name, shape.first, shape.second);
    } else {
      params_.add_uniform(name, shape.first, shape.second, config_.init_scale, rng);
    }
  }
}

TopicDecoder::TopicDecoder(const DecoderConfig& config, nc::ParamStore params)
    : config_(config), params_(std::move(params)) {
  const auto shapes = parameter_shapes(config_);
  if (shapes.size() != params_.size()) {
    throw ConfigError("decoder parameters do not match the configuration (expected " + std::to_string(shapes.size()) +
                      " tensors, found " + std::to_string(params_.size()) + ")");
  }
  for (const auto& [name, shape] : shapes) {
    if (!params_.contains(name)) throw ConfigError("decoder checkpoint lacks parameter '" + name + "'");
    const Tensor& t = params_.value(name);
    if (t.rows() != shape.first || t.cols() != shape.second) {
      throw ConfigError("decoder parameter '" + name + "' has the wrong shape");
    }
  }
}

SequenceContext TopicDecoder::bind(Tape& tape, const corpus::FeatureGrid& grid,
                                   std::optional<TopicLabel> topic) const {
  if (grid.dim() != config_.feature_dim) {
    throw ShapeError("feature grid has dimension " + std::to_string(grid.dim()) + ", decoder expects " +
                     std::to_string(config_.feature_dim));
  }
  if (grid.locations() < 1) throw ShapeError("feature grid has no locations");
  if (config_.variant != Variant::baseline && !topic) {
    throw std::invalid_argument(std::string(to_string(config_.variant)) + " decoder requires a topic");
  }
  if (topic && static_cast<int>(*topic) >= corpus::kTopicCount) throw std::invalid_argument("unknown topic");

  SequenceContext ctx;
  ctx.prefix = topic ? sub_decoder_prefix(config_.variant, *topic) : std::string{};
  ctx.grid = tape.constant(grid.values);
  ctx.projected = nc::matmul_nt(ctx.grid, tape.param(ctx.prefix + "att.Wv"));
  if (config_.variant == Variant::conditional) ctx.topic = nc::row(tape.param("topic_embed"), static_cast<int>(*topic));
  return ctx;
}

DecoderState TopicDecoder::init_state(Tape& tape, const SequenceContext& ctx) const {
  const Eigen::Index L = ctx.grid.rows();
  Var pooled = (1.0 / static_cast<double>(L)) * nc::matmul_tn(ctx.grid, tape.constant(Tensor::Ones(L, 1)));
  const std::string& p = ctx.prefix;
  return {nc::tanh(nc::matmul(tape.param(p + "init_h.W"), pooled) + tape.param(p + "init_h.b")),
          nc::tanh(nc::matmul(tape.param(p + "init_c.W"), pooled) + tape.param(p + "init_c.b"))};
}

Attention TopicDecoder::attend(Tape& tape, const SequenceContext& ctx, Var h_prev) const {
  const std::string& p = ctx.prefix;
  if (h_prev.rows() != config_.hidden || h_prev.cols() != 1) throw ShapeError("attend: h_prev has the wrong shape");
  Var hidden_part = nc::matmul(tape.param(p + "att.Wh"), h_prev) + tape.param(p + "att.b");
  Var mlp = nc::tanh(nc::add_rowwise(ctx.projected, hidden_part));
  Var alpha = nc::softmax(nc::matmul(mlp, tape.param(p + "att.w")));
  return {nc::matmul_tn(ctx.grid, alpha), alpha};
}

StepOutput TopicDecoder::step(Tape& tape, const SequenceContext& ctx, const DecoderState& prev, int prev_token) const {
  if (prev_token < 0 || prev_token >= config_.vocab_size) {
    throw std::invalid_argument("decode step: token " + std::to_string(prev_token) + " outside the vocabulary");
  }
  const std::string& p = ctx.prefix;
  Attention att = attend(tape, ctx, prev.h);
  std::vector<Var> inputs{att.context, nc::row(tape.param(p + "embed"), prev_token)};
  if (ctx.topic) inputs.push_back(*ctx.topic);
  Var x = nc::concat(inputs);
  const nc::LstmVars next = nc::lstm_cell(x, {prev.h, prev.c}, tape.param(p + "lstm.Wx"),
                                          tape.param(p + "lstm.Wh"), tape.param(p + "lstm.b"));
  Var h = next.h, c = next.c;
  Var logits = nc::matmul(tape.param(p + "out.W"), nc::concat({h, att.context})) + tape.param(p + "out.b");
  return {{h, c}, att, logits};
}

TopicDecoder::Forced TopicDecoder::teacher_forced(Tape& tape, const corpus::FeatureGrid& grid,
                                                  std::optional<TopicLabel> topic,
                                                  const std::vector<int>& target) const {
  if (target.empty()) throw std::invalid_argument("teacher_forced: empty target");
  SequenceContext ctx = bind(tape, grid, topic);
  DecoderState state = init_state(tape, ctx);
  Forced out;
  int prev = corpus::Vocab::kStart;
  std::optional<Var> total;
  for (int tok : target) {
    StepOutput s = step(tape, ctx, state, prev);
    Var ce = nc::cross_entropy(s.logits, tok);
    total = total ? *total + ce : ce;
    out.logits.push_back(s.logits);
    state = s.state;
    prev = tok;
  }
  out.nll = *total;
  return out;
}

namespace classifier {

namespace {
Var pad_to(Tape& tape, Var rows, Eigen::Index min_rows) {
  if (rows.rows() >= min_rows) return rows;
  return nc::concat({rows, tape.constant(Tensor::Zero(min_rows - rows.rows(), rows.cols()))});
}
}  // namespace

Var logits(Tape& tape, Var embedded) {
  Var x = pad_to(tape, embedded, 3);
  Var f2 = nc::col_max(nc::tanh(
      nc::add_rowwise(nc::matmul_nt(nc::window_rows(x, 2), tape.param("tc.conv2.W")), tape.param("tc.conv2.b"))));
  Var f3 = nc::col_max(nc::tanh(
      nc::add_rowwise(nc::matmul_nt(nc::window_rows(x, 3), tape.param("tc.conv3.W")), tape.param("tc.conv3.b"))));
  return nc::matmul(tape.param("tc.out.W"), nc::concat({f2, f3})) + tape.param("tc.out.b");
}

Var embed_tokens(Tape& tape, const std::vector<int>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("classifier: empty token sequence");
  Var table = tape.param("tc.embed");
  std::vector<Var> rows;
  rows.reserve(tokens.size());
  for (int t : tokens) rows.push_back(nc::row(table, t));
  return nc::stack_rows(rows);
}

Var embed_distributions(Tape& tape, const std::vector<Var>& step_logits) {
  if (step_logits.empty()) throw std::invalid_argument("classifier: empty distribution sequence");
  std::vector<Var> probs;
  probs.reserve(step_logits.size());
  for (Var l : step_logits) probs.push_back(nc::softmax(l));
  return nc::matmul(nc::stack_rows(probs), tape.param("tc.embed"));
}

TopicLabel predict(const nc::ParamStore& params, const std::vector<int>& tokens) {
  Tape tape(&params, false);
  const Tensor& l = logits(tape, embed_tokens(tape, tokens)).value();
  Eigen::Index best = 0;
  l.col(0).maxCoeff(&best);
  return corpus::topic_from_index(static_cast<int>(best));
}

}  // namespace classifier

}  // namespace artdesc::decoder
