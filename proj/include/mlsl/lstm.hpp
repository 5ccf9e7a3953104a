#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mlsl/common.hpp"

namespace mlsl {

// A sequence learner of shape (N, K) maps a variable-length sequence of
// N-vectors to a single K-vector and supports forward evaluation, loss
// backpropagation to every input timestep, and parameter update.
struct LearnerShape {
  int input_width = 0;   // N
  int output_width = 0;  // K

  bool operator==(const LearnerShape&) const = default;
};

// Gate index into the weight arrays below.
enum Gate : int { kInput = 0, kForget = 1, kOutput = 2, kCandidate = 3 };
inline constexpr int kNumGates = 4;

// One (K x N) input matrix, (K x K) recurrent matrix, and K bias per gate.
// The same layout serves weights, gradients, and optimizer accumulators.
struct LstmTensors {
  std::array<Mat, kNumGates> w_in;   // W_g, K x N
  std::array<Mat, kNumGates> w_rec;  // U_g, K x K
  std::array<Vec, kNumGates> bias;   // b_g, K

  static LstmTensors zeros(const LearnerShape& shape);

  // Applies fn(block&) to all 12 blocks in a fixed order.
  template <typename Fn>
  void for_each_block(Fn&& fn) {
    for (auto& m : w_in) fn(m);
    for (auto& m : w_rec) fn(m);
    for (auto& v : bias) fn(v);
  }
};

struct LstmParams {
  LearnerShape shape;
  LstmTensors weights;
};

// Same layout as the parameters; entries hold dLoss/dparam.
struct LstmGrads {
  LearnerShape shape;
  LstmTensors tensors;

  static LstmGrads zeros(const LearnerShape& shape) {
    return {shape, LstmTensors::zeros(shape)};
  }
};

// Per-timestep activations kept from the forward pass; backward needs no
// recomputation. c_0 = h_0 = 0.
struct LstmCache {
  LearnerShape shape;
  std::vector<Vec> inputs;     // x^(t), length N
  std::vector<Vec> gate_in;    // i_t
  std::vector<Vec> gate_forget;  // f_t
  std::vector<Vec> gate_out;   // o_t
  std::vector<Vec> candidate;  // g~_t
  std::vector<Vec> cell;       // c_t
  std::vector<Vec> hidden;     // h_t

  int length() const { return static_cast<int>(inputs.size()); }
};

// Weights i.i.d. uniform on [-0.08, 0.08] from the seeded stream; forget
// bias 1.0 (keeps long-sequence gradients alive early on), other biases 0.
// Deterministic for a fixed (shape, seed).
LstmParams init_params(const LearnerShape& shape, std::uint64_t seed);

struct LstmForwardResult {
  Vec output;  // h_n; zeros(K) for an empty sequence
  LstmCache cache;
};

// Standard LSTM recurrence (sigmoid gates, tanh candidate and cell output,
// no peepholes), double precision throughout.
LstmForwardResult lstm_forward(const LstmParams& params,
                               const std::vector<Vec>& inputs);

struct LstmBackwardResult {
  std::vector<Vec> d_inputs;  // dLoss/dx^(t) per timestep
  LstmGrads grads;            // dLoss/dparams, summed over timesteps
};

// Backpropagation through time from d_output = dLoss/dy.
LstmBackwardResult lstm_backward(const LstmParams& params,
                                 const LstmCache& cache, const Vec& d_output);

}  // namespace mlsl
