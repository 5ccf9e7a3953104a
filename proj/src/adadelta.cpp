#include "mlsl/adadelta.hpp"

namespace mlsl {

AdaDeltaState AdaDeltaState::create(const LearnerShape& shape, double rho,
                                    double epsilon, double scale) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw ValidationError("AdaDelta: rho must be in (0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw ValidationError("AdaDelta: epsilon must be > 0");
  }
  if (!(scale > 0.0)) {
    throw ValidationError("AdaDelta: scale must be > 0");
  }
  AdaDeltaState s;
  s.rho = rho;
  s.epsilon = epsilon;
  s.scale = scale;
  s.accum_grad_sq = LstmTensors::zeros(shape);
  s.accum_delta_sq = LstmTensors::zeros(shape);
  return s;
}

namespace {

template <typename Block>
void update_block(const AdaDeltaState& st, Block& eg2, Block& edx2,
                  Block& param, const Block& grad) {
  if (!grad.allFinite()) {
    throw std::runtime_error("adadelta_update: non-finite gradient");
  }
  eg2.array() = st.rho * eg2.array() + (1.0 - st.rho) * grad.array().square();
  auto delta = (-st.scale * (edx2.array() + st.epsilon).sqrt() /
                (eg2.array() + st.epsilon).sqrt() * grad.array())
                   .eval();
  edx2.array() = st.rho * edx2.array() + (1.0 - st.rho) * delta.square();
  param.array() += delta;
}

}  // namespace

void adadelta_update(AdaDeltaState& state, LstmParams& params,
                     const LstmGrads& grads) {
  if (grads.shape != params.shape) {
    throw ValidationError("adadelta_update: grads/params shape mismatch");
  }
  for (int g = 0; g < kNumGates; ++g) {
    update_block(state, state.accum_grad_sq.w_in[g],
                 state.accum_delta_sq.w_in[g], params.weights.w_in[g],
                 grads.tensors.w_in[g]);
    update_block(state, state.accum_grad_sq.w_rec[g],
                 state.accum_delta_sq.w_rec[g], params.weights.w_rec[g],
                 grads.tensors.w_rec[g]);
    update_block(state, state.accum_grad_sq.bias[g],
                 state.accum_delta_sq.bias[g], params.weights.bias[g],
                 grads.tensors.bias[g]);
  }
}

}  // namespace mlsl
