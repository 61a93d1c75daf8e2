#pragma once

// Value-level numerics shared by the graph ops and by tape-free callers.
// Everything here accepts Eigen expressions and returns plain dense objects.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "artdesc/errors.hpp"

namespace artdesc::nc {

using Scalar = double;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// 1-D tensors are column matrices; `Tensor` is the storage type for every
/// learned parameter and every activation.
using Tensor = Matrix;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.allFinite();
}

/// Max-shifted softmax over a vector.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(const Eigen::MatrixBase<Derived>& logits) {
  using S = typename Derived::Scalar;
  if (logits.size() == 0) throw std::invalid_argument("softmax: empty input");
  if (!logits.allFinite()) throw std::invalid_argument("softmax: non-finite input");
  const S top = logits.maxCoeff();
  Eigen::Matrix<S, Eigen::Dynamic, 1> e = (logits.reshaped().array() - top).exp().matrix();
  return e / e.sum();
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> log_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using S = typename Derived::Scalar;
  if (logits.size() == 0) throw std::invalid_argument("log_softmax: empty input");
  if (!logits.allFinite()) throw std::invalid_argument("log_softmax: non-finite input");
  const S top = logits.maxCoeff();
  const S lse = top + std::log((logits.reshaped().array() - top).exp().sum());
  return (logits.reshaped().array() - lse).matrix();
}

/// -log softmax(logits)[target]
template <typename Derived>
typename Derived::Scalar cross_entropy(const Eigen::MatrixBase<Derived>& logits, Eigen::Index target) {
  if (target < 0 || target >= logits.size()) {
    throw std::invalid_argument("cross_entropy: target index " + std::to_string(target) + " outside [0, " +
                                std::to_string(logits.size()) + ")");
  }
  return -log_softmax(logits)(target);
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return x.unaryExpr([](S v) { return v >= 0 ? S(1) / (S(1) + std::exp(-v)) : std::exp(v) / (S(1) + std::exp(v)); });
}

inline void require_rows(const char* op, const char* tensor, Eigen::Index got, Eigen::Index want) {
  if (got != want) {
    throw ShapeError(std::string(op) + ": tensor '" + tensor + "' has " + std::to_string(got) +
                     " rows, expected " + std::to_string(want));
  }
}

/// Weights of one LSTM cell. Gate rows are stacked in order input, forget,
/// candidate, output; each block has `hidden` rows.
template <typename S>
struct LstmWeights {
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> input;      // 4H x X
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> recurrent;  // 4H x H
  Eigen::Matrix<S, Eigen::Dynamic, 1> bias;                    // 4H

  Eigen::Index hidden() const { return recurrent.cols(); }
};

/// One LSTM step. Returns (h, c).
template <typename S>
std::pair<Eigen::Matrix<S, Eigen::Dynamic, 1>, Eigen::Matrix<S, Eigen::Dynamic, 1>> lstm_step(
    const Eigen::Matrix<S, Eigen::Dynamic, 1>& x, const Eigen::Matrix<S, Eigen::Dynamic, 1>& h_prev,
    const Eigen::Matrix<S, Eigen::Dynamic, 1>& c_prev, const LstmWeights<S>& w) {
  const Eigen::Index hs = w.hidden();
  require_rows("lstm_step", "recurrent", w.recurrent.rows(), 4 * hs);
  require_rows("lstm_step", "input", w.input.rows(), 4 * hs);
  require_rows("lstm_step", "bias", w.bias.rows(), 4 * hs);
  require_rows("lstm_step", "x", x.rows(), w.input.cols());
  require_rows("lstm_step", "h_prev", h_prev.rows(), hs);
  require_rows("lstm_step", "c_prev", c_prev.rows(), hs);

  const Eigen::Matrix<S, Eigen::Dynamic, 1> pre = w.input * x + w.recurrent * h_prev + w.bias;
  const Eigen::Matrix<S, Eigen::Dynamic, 1> i = sigmoid(pre.segment(0, hs));
  const Eigen::Matrix<S, Eigen::Dynamic, 1> f = sigmoid(pre.segment(hs, hs));
  const Eigen::Matrix<S, Eigen::Dynamic, 1> g = pre.segment(2 * hs, hs).array().tanh().matrix();
  const Eigen::Matrix<S, Eigen::Dynamic, 1> o = sigmoid(pre.segment(3 * hs, hs));
  Eigen::Matrix<S, Eigen::Dynamic, 1> c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
  Eigen::Matrix<S, Eigen::Dynamic, 1> h = o.cwiseProduct(c.array().tanh().matrix());
  return {std::move(h), std::move(c)};
}

/// Learning rate after step decay: lr0 * factor^floor(epoch / every).
inline double step_decay_lr(double lr0, int epoch, double factor = 0.8, int every = 10) {
  if (every <= 0) throw std::invalid_argument("step_decay_lr: decay period must be positive");
  return lr0 * std::pow(factor, epoch / every);
}

}  // namespace artdesc::nc
