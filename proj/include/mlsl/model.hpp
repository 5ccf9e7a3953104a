#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mlsl/lstm.hpp"
#include "mlsl/unfold.hpp"

namespace mlsl {

enum class OutputMode { kClassification, kRegression };

// A stack of D sequence learners, one per tree depth. Learner d (1-based)
// aggregates the children of depth-(d-1) nodes: L_D has shape (M, K_D) and
// consumes raw edge features; L_d for d < D has shape (M + K_{d+1}, K_d)
// and consumes edge features concatenated with the child's computed vector.
// The learners depend only on depth, never on the root being predicted.
struct MlslModel {
  int feature_width = 0;          // M
  std::vector<int> level_sizes;   // K_1 .. K_D
  OutputMode output_mode = OutputMode::kClassification;
  std::vector<LstmParams> learners;  // learners[d-1] = L_d

  int depth() const { return static_cast<int>(learners.size()); }
  int output_width() const { return level_sizes.front(); }
  int class_count() const { return level_sizes.front(); }

  // Expected shape of L_d, 1-based.
  LearnerShape shape_at(int level) const;

  // Fresh model with init_params per level; level d uses an independent
  // substream of seed.
  static MlslModel init(int feature_width, std::vector<int> level_sizes,
                        OutputMode mode, std::uint64_t seed);

  void validate() const;
};

// Computed vector f(v) and learner cache per tree node that has children.
// Childless nodes below the leaf depth take f = 0 (empty-sequence rule)
// and own no learner instance.
struct TreeActivations {
  std::vector<Vec> f;                           // indexed by tree node id
  std::vector<std::optional<LstmCache>> cache;  // engaged iff node has kids
};

struct MlslForwardResult {
  Vec output;  // f(root), length K_1
  TreeActivations activations;
};

// Bottom-up pass over the unfolded tree. All instances of L_d share the
// same parameters; each instance keeps its own cache for backward.
MlslForwardResult mlsl_forward(const MlslModel& m, const UnfoldTree& t);

struct LossResult {
  double loss = 0.0;
  Vec d_output;
};

// Classification: softmax cross-entropy on the K_1 outputs.
LossResult mlsl_loss(const Vec& output, int label);
// Regression: squared error against a target of the same width.
LossResult mlsl_loss(const Vec& output, const Vec& target);

struct MlslBackwardResult {
  // grads[d-1]: arithmetic mean of the per-instance parameter gradients of
  // all instances of L_d in the tree. dLoss/dw^(d) for the shared weights
  // is instance_counts[d-1] * grads[d-1].
  std::vector<LstmGrads> grads;
  std::vector<int> instance_counts;
};

// Top-down pass: at each instance the input adjoints are split, the edge-
// feature slice dropped (inputs are data), and the f(child) slice pushed
// further down.
MlslBackwardResult mlsl_backward(const MlslModel& m, const UnfoldTree& t,
                                 const TreeActivations& acts,
                                 const Vec& d_output);

Vec softmax(const Vec& logits);

}  // namespace mlsl
