#include "mlsl/datagen.hpp"

#include <string>

#include "mlsl/rng.hpp"

namespace mlsl {

void SynthSpec::validate() const {
  if (n_items < 1 || n_users < 1) {
    throw ValidationError("SynthSpec: need at least one item and user");
  }
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError(std::string("SynthSpec: ") + name +
                            " must be in [0, 1]");
    }
  };
  prob(p_reliable, "p_reliable");
  prob(class_balance, "class_balance");
  if (indicator) {
    prob(indicator->p_true_given_reliable, "indicator_p_reliable");
    prob(indicator->p_true_given_unreliable, "indicator_p_unreliable");
  }
  if (votes_per_item < 1 || votes_per_item > n_users) {
    throw ValidationError(
        "SynthSpec: votes_per_item must be in [1, n_users]");
  }
}

std::string item_node_id(int item) { return "item_" + std::to_string(item); }
std::string user_node_id(int user) { return "user_" + std::to_string(user); }

SynthData gen_spammer_hammer(const SynthSpec& spec) {
  spec.validate();
  RngStream label_rng = derive_stream(spec.seed, "item-labels");
  RngStream reliable_rng = derive_stream(spec.seed, "user-reliable");
  RngStream indicator_rng = derive_stream(spec.seed, "user-indicator");
  RngStream voter_rng = derive_stream(spec.seed, "voter-choice");
  RngStream spam_rng = derive_stream(spec.seed, "spammer-votes");

  SynthData data(spec.n_items, spec.n_users);
  auto& truth = data.truth;
  truth.item_labels.resize(spec.n_items);
  for (int i = 0; i < spec.n_items; ++i) {
    truth.item_labels[i] = label_rng.bernoulli(spec.class_balance) ? 1 : -1;
  }
  truth.user_reliable.resize(spec.n_users);
  for (int u = 0; u < spec.n_users; ++u) {
    truth.user_reliable[u] = reliable_rng.bernoulli(spec.p_reliable);
  }
  if (spec.indicator) {
    truth.user_indicator.resize(spec.n_users);
    for (int u = 0; u < spec.n_users; ++u) {
      double p = truth.user_reliable[u]
                     ? spec.indicator->p_true_given_reliable
                     : spec.indicator->p_true_given_unreliable;
      truth.user_indicator[u] = indicator_rng.bernoulli(p);
    }
  }

  const int width = spec.indicator ? 2 : 1;
  data.graph = std::make_unique<Graph>(width);
  // Item nodes first so dataset roots line up with item indices.
  for (int i = 0; i < spec.n_items; ++i) data.graph->add_node(item_node_id(i));
  for (int u = 0; u < spec.n_users; ++u) data.graph->add_node(user_node_id(u));

  for (int i = 0; i < spec.n_items; ++i) {
    auto voters = voter_rng.sample_without_replacement(
        spec.n_users, spec.votes_per_item);
    for (std::size_t v : voters) {
      int user = static_cast<int>(v);
      int vote = truth.user_reliable[user]
                     ? truth.item_labels[i]
                     : (spam_rng.bernoulli(0.5) ? 1 : -1);
      Vec features(width);
      features[0] = vote;
      if (spec.indicator) features[1] = truth.user_indicator[user] ? 1.0 : 0.0;
      data.graph->add_edge(item_node_id(i), user_node_id(user),
                           std::move(features));
      data.votes.add_vote(i, user, vote);
    }
  }

  data.dataset.graph = data.graph.get();
  data.dataset.class_count = 2;
  data.dataset.roots.resize(spec.n_items);
  data.dataset.labels.resize(spec.n_items);
  for (int i = 0; i < spec.n_items; ++i) {
    data.dataset.roots[i] = data.graph->node_index(item_node_id(i));
    data.dataset.labels[i] = label_to_class(truth.item_labels[i]);
  }
  return data;
}

SplitDataset split_items(const LabeledDataset& ds, std::size_t n_train,
                         std::uint64_t seed) {
  ds.validate();
  if (n_train >= ds.size()) {
    throw ValidationError("split_items: n_train must be < dataset size");
  }
  RngStream rng = derive_stream(seed, "train-test-split");
  std::vector<std::size_t> order(ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  SplitDataset out;
  out.train.graph = out.test.graph = ds.graph;
  out.train.class_count = out.test.class_count = ds.class_count;
  for (std::size_t k = 0; k < order.size(); ++k) {
    LabeledDataset& part = k < n_train ? out.train : out.test;
    part.roots.push_back(ds.roots[order[k]]);
    part.labels.push_back(ds.labels[order[k]]);
  }
  return out;
}

}  // namespace mlsl
