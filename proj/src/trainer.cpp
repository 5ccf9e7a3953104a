#include "mlsl/trainer.hpp"

#include <string>

#include "mlsl/metrics.hpp"

namespace mlsl {

void LabeledDataset::validate() const {
  if (!graph) throw ValidationError("LabeledDataset: no graph");
  if (roots.size() != labels.size()) {
    throw ValidationError("LabeledDataset: roots/labels size mismatch");
  }
  if (class_count < 1) {
    throw ValidationError("LabeledDataset: class count must be >= 1");
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots[i] < 0 || roots[i] >= graph->node_count()) {
      throw ValidationError("LabeledDataset: root index out of range");
    }
    if (labels[i] < 0 || labels[i] >= class_count) {
      throw ValidationError("LabeledDataset: label out of range at item " +
                            std::to_string(i));
    }
  }
}

double TrainConfig::scale_for_level(int level) const {
  if (level_scales.empty()) return 1.0;
  if (level < 1 || level > static_cast<int>(level_scales.size())) {
    throw ValidationError("TrainConfig: no scale for level " +
                          std::to_string(level));
  }
  return level_scales[level - 1];
}

void TrainConfig::validate(int depth) const {
  if (epochs < 1) throw ValidationError("TrainConfig: epochs must be >= 1");
  if (eval_every < 1) {
    throw ValidationError("TrainConfig: eval_every must be >= 1");
  }
  if (!level_scales.empty() &&
      static_cast<int>(level_scales.size()) != depth) {
    throw ValidationError("TrainConfig: level_scales size != depth");
  }
  for (double s : level_scales) {
    if (!(s > 0.0)) throw ValidationError("TrainConfig: scales must be > 0");
  }
}

std::vector<AdaDeltaState> make_optimizer(const MlslModel& m,
                                          const TrainConfig& cfg) {
  cfg.validate(m.depth());
  std::vector<AdaDeltaState> opt;
  opt.reserve(m.depth());
  for (int level = 1; level <= m.depth(); ++level) {
    opt.push_back(AdaDeltaState::create(m.shape_at(level), cfg.rho,
                                        cfg.epsilon,
                                        cfg.scale_for_level(level)));
  }
  return opt;
}

namespace {

UnfoldTree unfold_for(const Graph& g, int root, int depth, UnfoldMode mode) {
  return mode == UnfoldMode::kFull ? unfold_full(g, root, depth)
                                   : unfold_asymmetric(g, root, depth);
}

}  // namespace

double train_step(MlslModel& m, const Graph& g, int root, int label,
                  const TrainConfig& cfg, std::vector<AdaDeltaState>& opt,
                  RngStream& shuffle_rng, const LossFn& loss_fn) {
  if (static_cast<int>(opt.size()) != m.depth()) {
    throw ValidationError("train_step: optimizer state count != depth");
  }
  UnfoldTree tree = order_children(
      unfold_for(g, root, m.depth(), cfg.unfold_mode), cfg.child_order,
      shuffle_rng);
  auto fwd = mlsl_forward(m, tree);
  LossResult loss =
      loss_fn ? loss_fn(fwd.output, label) : mlsl_loss(fwd.output, label);
  auto back = mlsl_backward(m, tree, fwd.activations, loss.d_output);
  for (int level = 0; level < m.depth(); ++level) {
    adadelta_update(opt[level], m.learners[level], back.grads[level]);
  }
  return loss.loss;
}

double train_step(MlslModel& m, const Graph& g, int root, int label,
                  const TrainConfig& cfg, std::vector<AdaDeltaState>& opt) {
  RngStream shuffle_rng = derive_stream(cfg.master_seed, "child-shuffle");
  return train_step(m, g, root, label, cfg, opt, shuffle_rng);
}

TrainResult train(MlslModel& m, const LabeledDataset& data,
                  const TrainConfig& cfg, const LabeledDataset* eval_data) {
  data.validate();
  cfg.validate(m.depth());
  if (data.size() == 0) throw ValidationError("train: empty dataset");
  if (data.class_count != m.class_count() &&
      m.output_mode == OutputMode::kClassification) {
    throw ValidationError("train: dataset classes != model output width");
  }

  std::vector<AdaDeltaState> opt = make_optimizer(m, cfg);
  RngStream shuffle_rng = derive_stream(cfg.master_seed, "child-shuffle");
  RngStream visit_rng = derive_stream(cfg.master_seed, "node-visit");

  const std::size_t n = data.size();
  TrainResult res;
  res.history.reserve(cfg.epochs);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
      std::size_t i = cfg.visit_order == VisitOrder::kLoop
                          ? step
                          : visit_rng.index(n);
      loss_sum += train_step(m, *data.graph, data.roots[i], data.labels[i],
                             cfg, opt, shuffle_rng);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_sum / static_cast<double>(n);
    if (eval_data && epoch % cfg.eval_every == 0) {
      EvalResult ev = evaluate(m, *eval_data, cfg);
      stats.eval_accuracy = ev.accuracy;
      stats.eval_avg_recall = ev.avg_recall;
    }
    res.history.push_back(stats);
  }
  return res;
}

Prediction predict_label(const MlslModel& m, const Graph& g, int root,
                         const TrainConfig& cfg) {
  ChildOrderPolicy policy =
      cfg.child_order.kind == ChildOrderPolicy::Kind::kFixedByFeature
          ? cfg.child_order
          : ChildOrderPolicy::as_loaded();
  RngStream unused(0);
  UnfoldTree tree = order_children(
      unfold_for(g, root, m.depth(), cfg.unfold_mode), policy, unused);
  auto fwd = mlsl_forward(m, tree);
  Prediction p;
  p.probabilities = softmax(fwd.output);
  p.label = 0;
  for (int c = 1; c < p.probabilities.size(); ++c) {
    if (p.probabilities[c] > p.probabilities[p.label]) p.label = c;
  }
  return p;
}

EvalResult evaluate(const MlslModel& m, const LabeledDataset& data,
                    const TrainConfig& cfg) {
  data.validate();
  EvalResult res;
  res.predictions.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    res.predictions.push_back(
        predict_label(m, *data.graph, data.roots[i], cfg).label);
  }
  res.accuracy = accuracy(data.labels, res.predictions);
  res.avg_recall = average_recall(data.labels, res.predictions,
                                  data.class_count);
  return res;
}

}  // namespace mlsl
