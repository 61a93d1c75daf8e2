#include "artdesc/numcore/tape.hpp"

#include <stdexcept>

#include "artdesc/errors.hpp"

namespace artdesc::nc {

namespace {

void check_same_tape(Var a, Var b, const char* op) {
  if (a.tape == nullptr || a.tape != b.tape) throw std::invalid_argument(std::string(op) + ": operands on different tapes");
}

void check_shape(const char* op, const char* what, const Tensor& t, Eigen::Index rows, Eigen::Index cols) {
  if (t.rows() != rows || t.cols() != cols) {
    throw ShapeError(std::string(op) + ": '" + what + "' is " + std::to_string(t.rows()) + "x" +
                     std::to_string(t.cols()) + ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

const Tensor& Var::value() const {
  if (tape == nullptr) throw StateError("Var is not bound to a tape");
  return tape->value(*this);
}

Var Tape::constant(Tensor value) { return push(std::move(value), nullptr, "constant"); }

Var Tape::param(const std::string& name) {
  if (store_ == nullptr) throw StateError("tape has no parameter store; cannot bind '" + name + "'");
  if (auto it = param_ids_.find(name); it != param_ids_.end()) return Var{this, it->second};
  Var v = push(store_->value(name), nullptr, "param");
  nodes_.back().param = name;
  param_ids_.emplace(name, v.id);
  return v;
}

Var Tape::push(Tensor value, Backprop backprop, const char* op) {
  if (!value.allFinite()) throw std::domain_error(std::string(op) + ": produced a non-finite value");
  Node n;
  n.value = std::move(value);
  if (record_) n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Tensor& Tape::grad_buffer(int id) {
  Node& n = nodes_.at(static_cast<std::size_t>(id));
  if (n.grad.size() == 0) n.grad = Tensor::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

const Tensor& Tape::grad(Var v) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(v.id));
  if (!consumed_) throw StateError("gradient requested before backward");
  static const Tensor empty;
  return n.grad.size() == 0 ? empty : n.grad;
}

void Tape::run_backward(Var loss) {
  if (!record_) throw StateError("backward on a tape that does not record");
  if (consumed_) throw StateError("backward called twice on the same graph; run a new forward pass first");
  if (loss.tape != this) throw std::invalid_argument("backward: loss belongs to another tape");
  const Tensor& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) throw ShapeError("backward: loss must be 1x1");
  consumed_ = true;
  grad_buffer(loss.id)(0, 0) = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0 || !n.backprop) continue;
    // Copy: the callback may grow other nodes' buffers but never this one's.
    const Tensor g = n.grad;
    n.backprop(*this, g);
  }
}

void Tape::backward(Var loss) { run_backward(loss); }

void Tape::backward(Var loss, ParamStore& store) {
  run_backward(loss);
  for (const auto& [name, id] : param_ids_) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0) continue;
    if (!n.grad.allFinite()) throw std::domain_error("backward: non-finite gradient for '" + name + "'");
    store.mutable_grad(name) += n.grad;
  }
  store.mark_all_grads_ready();
}

// ---- ops -------------------------------------------------------------------

Var operator+(Var a, Var b) {
  check_same_tape(a, b, "add");
  check_shape("add", "rhs", b.value(), a.rows(), a.cols());
  const int ia = a.id, ib = b.id;
  return a.tape->push(a.value() + b.value(), [ia, ib](Tape& t, const Tensor& g) {
    t.grad_buffer(ia) += g;
    t.grad_buffer(ib) += g;
  }, "add");
}

Var operator-(Var a, Var b) {
  check_same_tape(a, b, "sub");
  check_shape("sub", "rhs", b.value(), a.rows(), a.cols());
  const int ia = a.id, ib = b.id;
  return a.tape->push(a.value() - b.value(), [ia, ib](Tape& t, const Tensor& g) {
    t.grad_buffer(ia) += g;
    t.grad_buffer(ib) -= g;
  }, "sub");
}

Var operator*(double s, Var a) {
  const int ia = a.id;
  return a.tape->push(s * a.value(), [ia, s](Tape& t, const Tensor& g) { t.grad_buffer(ia) += s * g; }, "scale");
}

Var hadamard(Var a, Var b) {
  check_same_tape(a, b, "hadamard");
  check_shape("hadamard", "rhs", b.value(), a.rows(), a.cols());
  const int ia = a.id, ib = b.id;
  return a.tape->push(a.value().cwiseProduct(b.value()), [ia, ib](Tape& t, const Tensor& g) {
    t.grad_buffer(ia) += g.cwiseProduct(t.value(Var{&t, ib}));
    t.grad_buffer(ib) += g.cwiseProduct(t.value(Var{&t, ia}));
  }, "hadamard");
}

Var matmul(Var a, Var b) {
  check_same_tape(a, b, "matmul");
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: lhs has " + std::to_string(a.cols()) + " columns but rhs has " +
                     std::to_string(b.rows()) + " rows");
  }
  const int ia = a.id, ib = b.id;
  return a.tape->push(a.value() * b.value(), [ia, ib](Tape& t, const Tensor& g) {
    t.grad_buffer(ia).noalias() += g * t.value(Var{&t, ib}).transpose();
    t.grad_buffer(ib).noalias() += t.value(Var{&t, ia}).transpose() * g;
  }, "matmul");
}

Var matmul_nt(Var a, Var b) {
  check_same_tape(a, b, "matmul_nt");
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: column counts differ");
  const int ia = a.id, ib = b.id;
  return a.tape->push(a.value() * b.value().transpose(), [ia, ib](Tape& t, const Tensor& g) {
    t.grad_buffer(ia).noalias() += g * t.value(Var{&t, ib});
    t.grad_buffer(ib).noalias() += g.transpose() * t.value(Var{&t, ia});
  }, "matmul_nt");
}

Var matmul_tn(Var a, Var b) {
  check_same_tape(a, b, "matmul_tn");
  if (a.rows() != b.rows()) throw ShapeError("matmul_tn: row counts differ");
  const int ia = a.id, ib = b.id;
  return a.tape->push(a.value().transpose() * b.value(), [ia, ib](Tape& t, const Tensor& g) {
    t.grad_buffer(ia).noalias() += t.value(Var{&t, ib}) * g.transpose();
    t.grad_buffer(ib).noalias() += t.value(Var{&t, ia}) * g;
  }, "matmul_tn");
}

Var add_rowwise(Var m, Var bias) {
  check_same_tape(m, bias, "add_rowwise");
  check_shape("add_rowwise", "bias", bias.value(), m.cols(), 1);
  const int im = m.id, ib = bias.id;
  Tensor out = m.value().rowwise() + bias.value().col(0).transpose();
  return m.tape->push(std::move(out), [im, ib](Tape& t, const Tensor& g) {
    t.grad_buffer(im) += g;
    t.grad_buffer(ib) += g.colwise().sum().transpose();
  }, "add_rowwise");
}

Var tanh(Var a) {
  const int ia = a.id;
  Tensor out = a.value().array().tanh().matrix();
  const int next = static_cast<int>(a.tape->size());
  return a.tape->push(std::move(out), [ia, next](Tape& t, const Tensor& g) {
    const Tensor& y = t.value(Var{&t, next});
    t.grad_buffer(ia) += g.cwiseProduct((1.0 - y.array().square()).matrix());
  }, "tanh");
}

Var sigmoid(Var a) {
  const int ia = a.id;
  Tensor out = nc::sigmoid(a.value());
  const int next = static_cast<int>(a.tape->size());
  return a.tape->push(std::move(out), [ia, next](Tape& t, const Tensor& g) {
    const Tensor& y = t.value(Var{&t, next});
    t.grad_buffer(ia) += g.cwiseProduct((y.array() * (1.0 - y.array())).matrix());
  }, "sigmoid");
}

Var concat(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no parts");
  Tape* tape = parts.front().tape;
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    if (p.tape != tape) throw std::invalid_argument("concat: operands on different tapes");
    if (p.cols() != cols) throw ShapeError("concat: column counts differ");
    rows += p.rows();
  }
  Tensor out(rows, cols);
  std::vector<std::pair<int, Eigen::Index>> spans;
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    spans.emplace_back(p.id, at);
    at += p.rows();
  }
  return tape->push(std::move(out), [spans](Tape& t, const Tensor& g) {
    for (const auto& [id, start] : spans) {
      Tensor& buf = t.grad_buffer(id);
      buf += g.middleRows(start, buf.rows());
    }
  }, "concat");
}

Var slice_rows(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) throw ShapeError("slice_rows: range outside tensor");
  const int ia = a.id;
  return a.tape->push(a.value().middleRows(start, count), [ia, start, count](Tape& t, const Tensor& g) {
    t.grad_buffer(ia).middleRows(start, count) += g;
  }, "slice_rows");
}

Var row(Var m, Eigen::Index index) {
  if (index < 0 || index >= m.rows()) {
    throw std::invalid_argument("row: index " + std::to_string(index) + " outside [0, " + std::to_string(m.rows()) + ")");
  }
  const int im = m.id;
  return m.tape->push(m.value().row(index).transpose(), [im, index](Tape& t, const Tensor& g) {
    t.grad_buffer(im).row(index) += g.col(0).transpose();
  }, "row");
}

Var stack_rows(const std::vector<Var>& columns) {
  if (columns.empty()) throw std::invalid_argument("stack_rows: no inputs");
  Tape* tape = columns.front().tape;
  const Eigen::Index n = columns.front().rows();
  Tensor out(static_cast<Eigen::Index>(columns.size()), n);
  std::vector<int> ids;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const Var& c = columns[i];
    if (c.tape != tape) throw std::invalid_argument("stack_rows: operands on different tapes");
    check_shape("stack_rows", "column", c.value(), n, 1);
    out.row(static_cast<Eigen::Index>(i)) = c.value().col(0).transpose();
    ids.push_back(c.id);
  }
  return tape->push(std::move(out), [ids](Tape& t, const Tensor& g) {
    for (std::size_t i = 0; i < ids.size(); ++i) t.grad_buffer(ids[i]) += g.row(static_cast<Eigen::Index>(i)).transpose();
  }, "stack_rows");
}

Var window_rows(Var x, Eigen::Index width) {
  const Eigen::Index rows = x.rows(), cols = x.cols();
  if (width < 1 || width > rows) throw ShapeError("window_rows: window wider than input");
  const Eigen::Index out_rows = rows - width + 1;
  Tensor out(out_rows, width * cols);
  for (Eigen::Index r = 0; r < out_rows; ++r)
    for (Eigen::Index w = 0; w < width; ++w) out.block(r, w * cols, 1, cols) = x.value().row(r + w);
  const int ix = x.id;
  return x.tape->push(std::move(out), [ix, width, cols, out_rows](Tape& t, const Tensor& g) {
    Tensor& buf = t.grad_buffer(ix);
    for (Eigen::Index r = 0; r < out_rows; ++r)
      for (Eigen::Index w = 0; w < width; ++w) buf.row(r + w) += g.block(r, w * cols, 1, cols);
  }, "window_rows");
}

Var col_max(Var m) {
  const Tensor& v = m.value();
  Tensor out(v.cols(), 1);
  std::vector<Eigen::Index> arg(static_cast<std::size_t>(v.cols()));
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index r = 0;
    out(c, 0) = v.col(c).maxCoeff(&r);
    arg[static_cast<std::size_t>(c)] = r;
  }
  const int im = m.id;
  return m.tape->push(std::move(out), [im, arg](Tape& t, const Tensor& g) {
    Tensor& buf = t.grad_buffer(im);
    for (std::size_t c = 0; c < arg.size(); ++c) buf(arg[c], static_cast<Eigen::Index>(c)) += g(static_cast<Eigen::Index>(c), 0);
  }, "col_max");
}

Var softmax(Var logits) {
  if (logits.cols() != 1) throw ShapeError("softmax: expects a column vector");
  const int il = logits.id;
  const int next = static_cast<int>(logits.tape->size());
  return logits.tape->push(nc::softmax(logits.value()), [il, next](Tape& t, const Tensor& g) {
    const Tensor& p = t.value(Var{&t, next});
    const double inner = p.col(0).dot(g.col(0));
    t.grad_buffer(il) += p.cwiseProduct((g.array() - inner).matrix());
  }, "softmax");
}

Var cross_entropy(Var logits, Eigen::Index target) {
  if (logits.cols() != 1) throw ShapeError("cross_entropy: expects a column vector");
  Tensor loss(1, 1);
  loss(0, 0) = nc::cross_entropy(logits.value(), target);
  const int il = logits.id;
  return logits.tape->push(std::move(loss), [il, target](Tape& t, const Tensor& g) {
    Vector d = nc::softmax(t.value(Var{&t, il}));
    d(target) -= 1.0;
    t.grad_buffer(il) += g(0, 0) * d;
  }, "cross_entropy");
}

Var sum(Var a) {
  Tensor out(1, 1);
  out(0, 0) = a.value().sum();
  const int ia = a.id;
  return a.tape->push(std::move(out), [ia](Tape& t, const Tensor& g) {
    t.grad_buffer(ia).array() += g(0, 0);
  }, "sum");
}

LstmVars lstm_cell(Var x, const LstmVars& prev, Var Wx, Var Wh, Var b) {
  const Eigen::Index H = prev.h.rows();
  Var pre = matmul(Wx, x) + matmul(Wh, prev.h) + b;
  Var i = sigmoid(slice_rows(pre, 0, H));
  Var f = sigmoid(slice_rows(pre, H, H));
  Var g = tanh(slice_rows(pre, 2 * H, H));
  Var o = sigmoid(slice_rows(pre, 3 * H, H));
  Var c = hadamard(f, prev.c) + hadamard(i, g);
  return {hadamard(o, tanh(c)), c};
}

}  // namespace artdesc::nc
