#include "artdesc/numcore/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "artdesc/errors.hpp"

namespace artdesc::nc {

void adam_step(ParamStore& params, const AdamOptions& opts) {
  if (!(opts.lr > 0)) throw std::invalid_argument("adam_step: learning rate must be positive");
  for (const auto& [name, e] : params.entries()) {
    if (!e.grad_ready) throw StateError("adam_step: no gradient populated for parameter '" + name + "'");
  }
  params.advance_step();
  const double t = static_cast<double>(params.step());
  const double c1 = 1.0 - std::pow(opts.beta1, t);
  const double c2 = 1.0 - std::pow(opts.beta2, t);
  for (auto& [name, e] : params.entries()) {
    e.m = opts.beta1 * e.m + (1.0 - opts.beta1) * e.grad;
    e.v = opts.beta2 * e.v + (1.0 - opts.beta2) * e.grad.cwiseAbs2();
    const auto m_hat = e.m.array() / c1;
    const auto v_hat = e.v.array() / c2;
    e.value.array() -= opts.lr * m_hat / (v_hat.sqrt() + opts.eps);
  }
}

}  // namespace artdesc::nc
