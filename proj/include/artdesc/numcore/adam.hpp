#pragma once

#include "artdesc/numcore/param_store.hpp"

namespace artdesc::nc {

struct AdamOptions {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update over every parameter in the store.
/// Throws StateError if any gradient has not been populated.
void adam_step(ParamStore& params, const AdamOptions& opts);

/// Decoder schedule: 5e-4 decayed by 0.8 every 10 epochs (epochs counted from 0).
struct LrSchedule {
  double initial = 5e-4;
  double factor = 0.8;
  int every = 10;

  double at(int epoch) const { return step_decay_lr(initial, epoch, factor, every); }
};

}  // namespace artdesc::nc
