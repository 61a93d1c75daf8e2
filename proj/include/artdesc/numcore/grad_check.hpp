#pragma once

#include <functional>
#include <string>

#include "artdesc/numcore/param_store.hpp"
#include "artdesc/numcore/tape.hpp"

namespace artdesc::nc {

/// Builds a scalar loss on the given tape, reading parameters through
/// `tape.param(...)`. Must be deterministic.
using LossBuilder = std::function<Var(Tape&)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

/// Compares reverse-mode gradients against central differences, element by
/// element: |a - n| / max(|a|, |n|, 1e-8). `params` is restored on return.
/// Throws std::runtime_error if two evaluations at the same point disagree.
GradCheckReport grad_check(const LossBuilder& loss, ParamStore& params, double epsilon = 1e-4);

}  // namespace artdesc::nc
