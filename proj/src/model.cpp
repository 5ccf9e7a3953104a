#include "mlsl/model.hpp"

#include <cmath>
#include <string>

#include "mlsl/rng.hpp"

namespace mlsl {

LearnerShape MlslModel::shape_at(int level) const {
  const int d = depth();
  if (level < 1 || level > d) {
    throw ValidationError("MlslModel: level out of range");
  }
  if (level == d) return {feature_width, level_sizes[level - 1]};
  return {feature_width + level_sizes[level], level_sizes[level - 1]};
}

MlslModel MlslModel::init(int feature_width, std::vector<int> level_sizes,
                          OutputMode mode, std::uint64_t seed) {
  MlslModel m;
  m.feature_width = feature_width;
  m.level_sizes = std::move(level_sizes);
  m.output_mode = mode;
  if (m.level_sizes.empty()) {
    throw ValidationError("MlslModel: at least one level required");
  }
  const int d = static_cast<int>(m.level_sizes.size());
  for (int level = 1; level <= d; ++level) {
    LearnerShape shape{
        level == d ? feature_width : feature_width + m.level_sizes[level],
        m.level_sizes[level - 1]};
    m.learners.push_back(init_params(
        shape, derive_seed(seed, "level-" + std::to_string(level))));
  }
  m.validate();
  return m;
}

void MlslModel::validate() const {
  if (learners.empty() || level_sizes.size() != learners.size()) {
    throw ValidationError("MlslModel: level count mismatch");
  }
  for (int level = 1; level <= depth(); ++level) {
    if (!(learners[level - 1].shape == shape_at(level))) {
      throw ValidationError("MlslModel: learner " + std::to_string(level) +
                            " shape inconsistent with level sizes");
    }
  }
}

MlslForwardResult mlsl_forward(const MlslModel& m, const UnfoldTree& t) {
  m.validate();
  if (t.depth_limit != m.depth()) {
    throw ValidationError("mlsl_forward: tree depth " +
                          std::to_string(t.depth_limit) + " != model depth " +
                          std::to_string(m.depth()));
  }
  if (t.graph->feature_width() != m.feature_width) {
    throw ValidationError("mlsl_forward: edge feature width mismatch");
  }
  const int d = m.depth();

  MlslForwardResult res;
  res.activations.f.assign(t.size(), Vec());
  res.activations.cache.assign(t.size(), std::nullopt);

  // Children always carry higher ids than parents (breadth-first
  // construction), so descending id order is bottom-up.
  for (int tid = t.size() - 1; tid >= 0; --tid) {
    const UnfoldTreeNode& node = t.nodes[tid];
    if (node.depth >= d) continue;  // leaf depth: no f computed
    const int k_out = m.level_sizes[node.depth];
    const auto& kids = t.children[tid];
    if (kids.empty()) {
      res.activations.f[tid] = Vec::Zero(k_out);
      continue;
    }
    const bool deepest = node.depth == d - 1;
    std::vector<Vec> seq;
    seq.reserve(kids.size());
    for (int child : kids) {
      const Vec& edge = t.in_features(child);
      if (deepest) {
        seq.push_back(edge);
      } else {
        Vec x(edge.size() + m.level_sizes[node.depth + 1]);
        x << edge, res.activations.f[child];
        seq.push_back(std::move(x));
      }
    }
    auto fwd = lstm_forward(m.learners[node.depth], seq);
    res.activations.f[tid] = std::move(fwd.output);
    res.activations.cache[tid] = std::move(fwd.cache);
  }
  res.output = res.activations.f[t.root()];
  return res;
}

Vec softmax(const Vec& logits) {
  Vec shifted = logits.array() - logits.maxCoeff();
  Vec e = shifted.array().exp();
  return e / e.sum();
}

LossResult mlsl_loss(const Vec& output, int label) {
  if (label < 0 || label >= output.size()) {
    throw ValidationError("mlsl_loss: label out of range");
  }
  Vec shifted = output.array() - output.maxCoeff();
  Vec e = shifted.array().exp();
  double sum = e.sum();
  LossResult r;
  r.loss = std::log(sum) - shifted[label];
  r.d_output = e / sum;
  r.d_output[label] -= 1.0;
  return r;
}

LossResult mlsl_loss(const Vec& output, const Vec& target) {
  if (target.size() != output.size()) {
    throw ValidationError("mlsl_loss: target width mismatch");
  }
  LossResult r;
  Vec diff = output - target;
  r.loss = diff.squaredNorm();
  r.d_output = 2.0 * diff;
  return r;
}

MlslBackwardResult mlsl_backward(const MlslModel& m, const UnfoldTree& t,
                                 const TreeActivations& acts,
                                 const Vec& d_output) {
  m.validate();
  if (static_cast<int>(acts.f.size()) != t.size() ||
      static_cast<int>(acts.cache.size()) != t.size()) {
    throw ValidationError("mlsl_backward: activations do not match tree");
  }
  const int d = m.depth();
  const int M = m.feature_width;

  MlslBackwardResult res;
  res.instance_counts.assign(d, 0);
  res.grads.reserve(d);
  for (int level = 1; level <= d; ++level) {
    res.grads.push_back(LstmGrads::zeros(m.shape_at(level)));
  }

  // df[tid] = dLoss/df(tid); adjoints flow root -> leaves, and parents
  // precede children in id order.
  std::vector<Vec> df(t.size());
  df[t.root()] = d_output;
  for (int tid = 0; tid < t.size(); ++tid) {
    const UnfoldTreeNode& node = t.nodes[tid];
    if (node.depth >= d) continue;
    const auto& kids = t.children[tid];
    if (kids.empty()) continue;  // f was constant zero; nothing below
    if (!acts.cache[tid].has_value()) {
      throw ValidationError("mlsl_backward: missing cache for node with "
                            "children");
    }
    const int level = node.depth;  // learner index, 0-based
    auto back =
        lstm_backward(m.learners[level], *acts.cache[tid], df[tid]);
    res.instance_counts[level] += 1;
    LstmTensors& sum = res.grads[level].tensors;
    for (int g = 0; g < kNumGates; ++g) {
      sum.w_in[g] += back.grads.tensors.w_in[g];
      sum.w_rec[g] += back.grads.tensors.w_rec[g];
      sum.bias[g] += back.grads.tensors.bias[g];
    }
    if (node.depth < d - 1) {
      for (std::size_t j = 0; j < kids.size(); ++j) {
        // Edge-feature slice is data, not parameters: dropped.
        df[kids[j]] = back.d_inputs[j].tail(back.d_inputs[j].size() - M);
      }
    }
  }

  for (int level = 0; level < d; ++level) {
    if (res.instance_counts[level] > 1) {
      const double inv = 1.0 / res.instance_counts[level];
      res.grads[level].tensors.for_each_block([&](auto& b) { b *= inv; });
    }
  }
  return res;
}

}  // namespace mlsl
