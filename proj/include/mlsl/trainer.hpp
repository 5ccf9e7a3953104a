#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlsl/adadelta.hpp"
#include "mlsl/model.hpp"

namespace mlsl {

enum class UnfoldMode { kFull, kAsymmetric };
enum class VisitOrder { kLoop, kUniformRandom };

// Labeled prediction targets: root nodes of one graph plus class labels.
struct LabeledDataset {
  const Graph* graph = nullptr;
  std::vector<int> roots;   // node indices into *graph
  std::vector<int> labels;  // class indices in [0, class_count)
  int class_count = 0;

  std::size_t size() const { return roots.size(); }
  void validate() const;
};

struct TrainConfig {
  UnfoldMode unfold_mode = UnfoldMode::kAsymmetric;
  ChildOrderPolicy child_order = ChildOrderPolicy::as_loaded();
  double rho = 0.95;
  double epsilon = 1e-6;
  std::vector<double> level_scales;  // per level; empty = all 1.0
  int epochs = 1;
  int eval_every = 1;
  VisitOrder visit_order = VisitOrder::kLoop;
  std::uint64_t master_seed = 1;

  double scale_for_level(int level /*1-based*/) const;
  void validate(int depth) const;
};

std::vector<AdaDeltaState> make_optimizer(const MlslModel& m,
                                          const TrainConfig& cfg);

// Loss seam: maps (output, label) to loss and output adjoint. Defaults to
// mlsl_loss; tests may inject probes.
using LossFn = std::function<LossResult(const Vec&, int)>;

// One sample: unfold at root, order children, forward, loss, backward, one
// AdaDelta step per level with the instance-averaged gradient. Returns the
// pre-update loss. The supplied rng drives the child-order shuffle.
double train_step(MlslModel& m, const Graph& g, int root, int label,
                  const TrainConfig& cfg, std::vector<AdaDeltaState>& opt,
                  RngStream& shuffle_rng, const LossFn& loss_fn = nullptr);

// Convenience overload: shuffle stream derived from cfg.master_seed, so
// identical calls are identical.
double train_step(MlslModel& m, const Graph& g, int root, int label,
                  const TrainConfig& cfg, std::vector<AdaDeltaState>& opt);

struct EpochStats {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  std::optional<double> eval_accuracy;
  std::optional<double> eval_avg_recall;
};

struct TrainResult {
  std::vector<EpochStats> history;
};

// Runs cfg.epochs passes over the dataset (n steps per epoch regardless of
// visit order; RandomShuffle re-permutes children on every visit). When an
// eval set is given, accuracy and average recall are recorded every
// cfg.eval_every epochs. Deterministic for a fixed master seed.
TrainResult train(MlslModel& m, const LabeledDataset& data,
                  const TrainConfig& cfg,
                  const LabeledDataset* eval_data = nullptr);

struct Prediction {
  int label = 0;
  Vec probabilities;
};

// Argmax of softmax(mlsl_forward), ties toward the lowest class index.
// Prediction always uses a deterministic child order: a RandomShuffle
// training policy degrades to AsLoaded here.
Prediction predict_label(const MlslModel& m, const Graph& g, int root,
                         const TrainConfig& cfg);

struct EvalResult {
  double accuracy = 0.0;
  double avg_recall = 0.0;
  std::vector<int> predictions;
};

EvalResult evaluate(const MlslModel& m, const LabeledDataset& data,
                    const TrainConfig& cfg);

}  // namespace mlsl
