#include "mlsl/lstm.hpp"

#include <cmath>

#include "mlsl/rng.hpp"

namespace mlsl {

namespace {

void check_shape(const LearnerShape& shape) {
  if (shape.input_width < 1 || shape.output_width < 1) {
    throw ValidationError("LearnerShape: widths must be >= 1");
  }
}

Vec sigmoid(const Vec& v) {
  return v.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

Vec tanh_vec(const Vec& v) {
  return v.unaryExpr([](double x) { return std::tanh(x); });
}

}  // namespace

LstmTensors LstmTensors::zeros(const LearnerShape& shape) {
  LstmTensors t;
  for (int g = 0; g < kNumGates; ++g) {
    t.w_in[g] = Mat::Zero(shape.output_width, shape.input_width);
    t.w_rec[g] = Mat::Zero(shape.output_width, shape.output_width);
    t.bias[g] = Vec::Zero(shape.output_width);
  }
  return t;
}

LstmParams init_params(const LearnerShape& shape, std::uint64_t seed) {
  check_shape(shape);
  RngStream rng(seed);
  LstmParams p{shape, LstmTensors::zeros(shape)};
  auto fill = [&](Mat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        m(r, c) = rng.uniform(-0.08, 0.08);
  };
  for (int g = 0; g < kNumGates; ++g) {
    fill(p.weights.w_in[g]);
    fill(p.weights.w_rec[g]);
  }
  p.weights.bias[kForget].setConstant(1.0);
  return p;
}

LstmForwardResult lstm_forward(const LstmParams& params,
                               const std::vector<Vec>& inputs) {
  check_shape(params.shape);
  const int k = params.shape.output_width;
  const int n = static_cast<int>(inputs.size());

  LstmForwardResult res;
  res.cache.shape = params.shape;
  if (n == 0) {
    res.output = Vec::Zero(k);
    return res;
  }

  auto& c = res.cache;
  c.inputs.reserve(n);
  c.gate_in.reserve(n);
  c.gate_forget.reserve(n);
  c.gate_out.reserve(n);
  c.candidate.reserve(n);
  c.cell.reserve(n);
  c.hidden.reserve(n);

  Vec h_prev = Vec::Zero(k);
  Vec c_prev = Vec::Zero(k);
  const LstmTensors& w = params.weights;
  for (const Vec& x : inputs) {
    if (x.size() != params.shape.input_width) {
      throw ValidationError("lstm_forward: input width mismatch");
    }
    Vec i = sigmoid(w.w_in[kInput] * x + w.w_rec[kInput] * h_prev +
                    w.bias[kInput]);
    Vec f = sigmoid(w.w_in[kForget] * x + w.w_rec[kForget] * h_prev +
                    w.bias[kForget]);
    Vec o = sigmoid(w.w_in[kOutput] * x + w.w_rec[kOutput] * h_prev +
                    w.bias[kOutput]);
    Vec g = tanh_vec(w.w_in[kCandidate] * x + w.w_rec[kCandidate] * h_prev +
                     w.bias[kCandidate]);
    Vec cell = (f.array() * c_prev.array() + i.array() * g.array()).matrix();
    Vec hidden = (o.array() * cell.array().tanh()).matrix();

    c.inputs.push_back(x);
    c.gate_in.push_back(std::move(i));
    c.gate_forget.push_back(std::move(f));
    c.gate_out.push_back(std::move(o));
    c.candidate.push_back(std::move(g));
    c.cell.push_back(cell);
    c.hidden.push_back(hidden);
    c_prev = std::move(cell);
    h_prev = std::move(hidden);
  }
  res.output = h_prev;
  return res;
}

LstmBackwardResult lstm_backward(const LstmParams& params,
                                 const LstmCache& cache, const Vec& d_output) {
  if (cache.shape != params.shape) {
    throw ValidationError("lstm_backward: cache/params shape mismatch");
  }
  if (d_output.size() != params.shape.output_width) {
    throw ValidationError("lstm_backward: d_output width mismatch");
  }
  const int k = params.shape.output_width;
  const int n = cache.length();
  const LstmTensors& w = params.weights;

  LstmBackwardResult res;
  res.grads = LstmGrads::zeros(params.shape);
  res.d_inputs.assign(n, Vec());
  LstmTensors& g = res.grads.tensors;

  Vec dh = d_output;
  Vec dc = Vec::Zero(k);
  for (int t = n - 1; t >= 0; --t) {
    const Vec& i = cache.gate_in[t];
    const Vec& f = cache.gate_forget[t];
    const Vec& o = cache.gate_out[t];
    const Vec& cand = cache.candidate[t];
    const Vec& cell = cache.cell[t];
    const Vec c_prev = t > 0 ? cache.cell[t - 1] : Vec::Zero(k);
    const Vec h_prev = t > 0 ? cache.hidden[t - 1] : Vec::Zero(k);

    Vec tanh_c = cell.array().tanh().matrix();
    Vec d_o = (dh.array() * tanh_c.array()).matrix();
    dc.array() += dh.array() * o.array() * (1.0 - tanh_c.array().square());

    Vec d_i = (dc.array() * cand.array()).matrix();
    Vec d_cand = (dc.array() * i.array()).matrix();
    Vec d_f = (dc.array() * c_prev.array()).matrix();
    Vec dc_prev = (dc.array() * f.array()).matrix();

    // Pre-activation adjoints.
    std::array<Vec, kNumGates> da;
    da[kInput] = (d_i.array() * i.array() * (1.0 - i.array())).matrix();
    da[kForget] = (d_f.array() * f.array() * (1.0 - f.array())).matrix();
    da[kOutput] = (d_o.array() * o.array() * (1.0 - o.array())).matrix();
    da[kCandidate] = (d_cand.array() * (1.0 - cand.array().square())).matrix();

    Vec dx = Vec::Zero(params.shape.input_width);
    Vec dh_prev = Vec::Zero(k);
    for (int gate = 0; gate < kNumGates; ++gate) {
      g.w_in[gate].noalias() += da[gate] * cache.inputs[t].transpose();
      g.w_rec[gate].noalias() += da[gate] * h_prev.transpose();
      g.bias[gate] += da[gate];
      dx.noalias() += w.w_in[gate].transpose() * da[gate];
      dh_prev.noalias() += w.w_rec[gate].transpose() * da[gate];
    }
    res.d_inputs[t] = std::move(dx);
    dh = std::move(dh_prev);
    dc = std::move(dc_prev);
  }
  return res;
}

}  // namespace mlsl
