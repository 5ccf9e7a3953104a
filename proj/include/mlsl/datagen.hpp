#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "mlsl/baselines.hpp"
#include "mlsl/graph.hpp"
#include "mlsl/trainer.hpp"

namespace mlsl {

// Observable per-user feature correlated with truthfulness but outside the
// standard crowdsourcing model (e.g. "account older than a week").
struct IndicatorSpec {
  double p_true_given_reliable = 0.9;
  double p_true_given_unreliable = 0.4;
};

// Spammer-hammer crowdsourcing instance: reliable users ("hammers") always
// report the true item label, unreliable users ("spammers") answer
// uniformly at random.
struct SynthSpec {
  int n_items = 3000;
  int n_users = 3000;
  double p_reliable = 0.6;
  int votes_per_item = 3;
  double class_balance = 0.5;  // P(true label = +1)
  std::uint64_t seed = 1;
  std::optional<IndicatorSpec> indicator;

  void validate() const;
};

struct SynthTruth {
  std::vector<int> item_labels;      // -1/+1 per item
  std::vector<bool> user_reliable;   // per user
  std::vector<bool> user_indicator;  // per user; empty when disabled
};

// -1/+1 labels map to class indices 0/1 everywhere.
inline int label_to_class(int pm_label) { return pm_label > 0 ? 1 : 0; }
inline int class_to_label(int cls) { return cls > 0 ? 1 : -1; }

// Node id helpers ("item_17", "user_4").
std::string item_node_id(int item);
std::string user_node_id(int user);

struct SynthData {
  std::unique_ptr<Graph> graph;  // one directed item->user edge per vote
  VoteMatrix votes;
  SynthTruth truth;
  LabeledDataset dataset;  // roots = items, labels = classes of true labels

  SynthData(int n_items, int n_users) : votes(n_items, n_users) {}
};

// Edge features: [vote in {-1,+1}] plus the voter's indicator bit (1/0)
// appended when enabled. Each item receives votes_per_item votes from
// distinct users drawn uniformly. Independent named substreams of
// spec.seed drive labels, reliabilities, indicators, voter choice, and
// spammer votes, so enabling the indicator never changes the votes.
SynthData gen_spammer_hammer(const SynthSpec& spec);

struct SplitDataset {
  LabeledDataset train;
  LabeledDataset test;
};

// Uniform split without replacement: n_train items for training, the rest
// for testing; disjoint and exhaustive, deterministic per seed.
SplitDataset split_items(const LabeledDataset& ds, std::size_t n_train,
                         std::uint64_t seed);

}  // namespace mlsl
