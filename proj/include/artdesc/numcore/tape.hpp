#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "artdesc/numcore/functional.hpp"
#include "artdesc/numcore/param_store.hpp"

namespace artdesc::nc {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; only valid while the
/// owning tape is alive.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Tensor& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
};

/// Records a computation graph over dense tensors and propagates gradients in
/// reverse. Parameter leaves are bound to a ParamStore; `backward` adds their
/// gradients into the store.
///
/// A tape built with `record = false` evaluates the same ops without keeping
/// closures, which is what inference uses.
class Tape {
 public:
  explicit Tape(const ParamStore* store = nullptr, bool record = true) : store_(store), record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Leaf bound to a named parameter. Repeated lookups return the same leaf.
  Var param(const std::string& name);

  const Tensor& value(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).value; }
  /// Gradient of the last backward pass with respect to `v`.
  const Tensor& grad(Var v) const;

  /// Reverse pass from a 1x1 loss. Adds parameter gradients into `store` (which
  /// must be the store the tape reads from, or a compatible one) and marks all of
  /// its gradients populated. A tape can be propagated once.
  void backward(Var loss, ParamStore& store);
  /// Reverse pass without a store; leaf gradients are readable through grad().
  void backward(Var loss);

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  // Graph construction primitive used by the op free functions.
  using Backprop = std::function<void(Tape&, const Tensor& out_grad)>;
  Var push(Tensor value, Backprop backprop, const char* op);
  Tensor& grad_buffer(int id);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Backprop backprop;
    std::string param;
  };

  void run_backward(Var loss);

  const ParamStore* store_;
  bool record_;
  bool consumed_ = false;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> param_ids_;
};

// Arithmetic. Shapes must match exactly; there is no implicit broadcasting.
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(double s, Var a);
Var hadamard(Var a, Var b);

/// a (m x n) times b (n x k).
Var matmul(Var a, Var b);
/// a (m x n) times b^T, b is (k x n).
Var matmul_nt(Var a, Var b);
/// a^T times b, a is (n x m), b is (n x k).
Var matmul_tn(Var a, Var b);
/// Adds the column vector `bias` (c x 1) to every row of m (r x c).
Var add_rowwise(Var m, Var bias);

Var tanh(Var a);
Var sigmoid(Var a);

/// Vertical concatenation; all parts must share a column count.
Var concat(const std::vector<Var>& parts);
Var slice_rows(Var a, Eigen::Index start, Eigen::Index count);
/// Row `index` of m, returned as a column vector.
Var row(Var m, Eigen::Index index);
/// Stacks column vectors as the rows of a matrix.
Var stack_rows(const std::vector<Var>& columns);
/// Row t of the result is rows t..t+width-1 of x laid end to end.
Var window_rows(Var x, Eigen::Index width);
/// Column-wise maximum of m, as a column vector.
Var col_max(Var m);

Var softmax(Var logits);
/// Scalar -log softmax(logits)[target].
Var cross_entropy(Var logits, Eigen::Index target);
Var sum(Var a);

struct LstmVars {
  Var h;
  Var c;
};
/// One LSTM step on the tape; gate rows ordered i, f, g, o as in lstm_step.
LstmVars lstm_cell(Var x, const LstmVars& prev, Var Wx, Var Wh, Var b);

}  // namespace artdesc::nc
