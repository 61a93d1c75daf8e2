#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "artdesc/numcore/functional.hpp"
#include "artdesc/numcore/random.hpp"

namespace artdesc::nc {

/// Named trainable parameters with their gradients and Adam moments.
///
/// Every entry keeps value, gradient, and both moment accumulators at the same
/// shape. A gradient counts as populated once a backward pass (or an explicit
/// `mutable_grad` call) has touched it since the last `zero_grad`.
class ParamStore {
 public:
  struct Entry {
    Tensor value;
    Tensor grad;
    Tensor m;
    Tensor v;
    bool grad_ready = false;
  };

  /// Registers a zero-initialized parameter. Re-registering a name is an error.
  Tensor& add(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  /// Registers a parameter drawn uniformly from [-scale, scale].
  Tensor& add_uniform(const std::string& name, Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng);

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  const Tensor& value(const std::string& name) const;
  Tensor& mutable_value(const std::string& name);
  const Tensor& grad(const std::string& name) const;
  /// Gives write access to the gradient and marks it populated.
  Tensor& mutable_grad(const std::string& name);
  bool grad_ready(const std::string& name) const;

  void zero_grad();
  /// Marks every gradient populated; called at the end of a backward pass.
  void mark_all_grads_ready();

  /// Copy of every entry whose name starts with `prefix` (names unchanged,
  /// step counter reset).
  ParamStore subset(const std::string& prefix) const;
  /// Overwrites values of the entries present in `other`.
  void assign_values(const ParamStore& other);

  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;

  std::int64_t step() const { return step_; }
  void advance_step() { ++step_; }

  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::map<std::string, Entry>& entries() { return entries_; }

 private:
  Entry& at(const std::string& name);
  const Entry& at(const std::string& name) const;

  std::map<std::string, Entry> entries_;
  std::int64_t step_ = 0;
};

}  // namespace artdesc::nc
