#include "artdesc/numcore/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace artdesc::nc {

namespace {

double evaluate(const LossBuilder& loss, const ParamStore& params) {
  Tape tape(&params, false);
  return loss(tape).scalar();
}

}  // namespace

GradCheckReport grad_check(const LossBuilder& loss, ParamStore& params, double epsilon) {
  if (!(epsilon > 0)) throw std::invalid_argument("grad_check: epsilon must be positive");

  const double base = evaluate(loss, params);
  if (evaluate(loss, params) != base) {
    throw std::runtime_error("grad_check: loss function is not deterministic (two evaluations differ)");
  }

  // Analytic gradients go into a scratch copy so the caller's accumulators stay untouched.
  ParamStore scratch = params;
  scratch.zero_grad();
  {
    Tape tape(&scratch, true);
    tape.backward(loss(tape), scratch);
  }

  GradCheckReport report;
  for (auto& [name, entry] : params.entries()) {
    Tensor& w = entry.value;
    const Tensor& analytic = scratch.grad(name);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double saved = w.data()[i];
      w.data()[i] = saved + epsilon;
      const double up = evaluate(loss, params);
      w.data()[i] = saved - epsilon;
      const double down = evaluate(loss, params);
      w.data()[i] = saved;

      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic.data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_param = name;
        report.worst_index = i;
        report.analytic = a;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace artdesc::nc
