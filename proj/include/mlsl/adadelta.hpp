#pragma once

#include "mlsl/lstm.hpp"

namespace mlsl {

// Per-learner AdaDelta state: running averages of squared gradients and
// squared updates, one entry per parameter. scale is the per-level step
// multiplier (levels deeper in the tree may need a different rate).
struct AdaDeltaState {
  double rho = 0.95;
  double epsilon = 1e-6;
  double scale = 1.0;
  LstmTensors accum_grad_sq;
  LstmTensors accum_delta_sq;

  static AdaDeltaState create(const LearnerShape& shape, double rho = 0.95,
                              double epsilon = 1e-6, double scale = 1.0);
};

// In place, per parameter:
//   Eg2  <- rho Eg2 + (1-rho) g^2
//   d     = -scale * sqrt(Edx2 + eps) / sqrt(Eg2 + eps) * g
//   Edx2 <- rho Edx2 + (1-rho) d^2
//   p    += d
void adadelta_update(AdaDeltaState& state, LstmParams& params,
                     const LstmGrads& grads);

}  // namespace mlsl
