#include "artdesc/numcore/param_store.hpp"

#include <stdexcept>

#include "artdesc/errors.hpp"

namespace artdesc::nc {

Tensor& ParamStore::add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 1 || cols < 1) throw ShapeError("parameter '" + name + "' must have positive dimensions");
  auto [it, inserted] = entries_.try_emplace(name);
  if (!inserted) throw std::invalid_argument("parameter '" + name + "' registered twice");
  Entry& e = it->second;
  e.value = Tensor::Zero(rows, cols);
  e.grad = Tensor::Zero(rows, cols);
  e.m = Tensor::Zero(rows, cols);
  e.v = Tensor::Zero(rows, cols);
  return e.value;
}

Tensor& ParamStore::add_uniform(const std::string& name, Eigen::Index rows, Eigen::Index cols, double scale,
                                Rng& rng) {
  Tensor& t = add(name, rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) t(i, j) = rng.uniform(-scale, scale);
  return t;
}

ParamStore::Entry& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

const ParamStore::Entry& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::value(const std::string& name) const { return at(name).value; }
Tensor& ParamStore::mutable_value(const std::string& name) { return at(name).value; }
const Tensor& ParamStore::grad(const std::string& name) const { return at(name).grad; }

Tensor& ParamStore::mutable_grad(const std::string& name) {
  Entry& e = at(name);
  e.grad_ready = true;
  return e.grad;
}

bool ParamStore::grad_ready(const std::string& name) const { return at(name).grad_ready; }

void ParamStore::zero_grad() {
  for (auto& [_, e] : entries_) {
    e.grad.setZero();
    e.grad_ready = false;
  }
}

void ParamStore::mark_all_grads_ready() {
  for (auto& [_, e] : entries_) e.grad_ready = true;
}

ParamStore ParamStore::subset(const std::string& prefix) const {
  ParamStore out;
  for (const auto& [name, e] : entries_)
    if (name.compare(0, prefix.size(), prefix) == 0) out.entries_.emplace(name, e);
  return out;
}

void ParamStore::assign_values(const ParamStore& other) {
  for (const auto& [name, e] : other.entries_) {
    Entry& mine = at(name);
    if (mine.value.rows() != e.value.rows() || mine.value.cols() != e.value.cols()) {
      throw ShapeError("assign_values: shape mismatch for '" + name + "'");
    }
    mine.value = e.value;
  }
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, e] : entries_) n += static_cast<std::size_t>(e.value.size());
  return n;
}

}  // namespace artdesc::nc
