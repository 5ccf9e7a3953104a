#include "mlsl/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "mlsl/baselines.hpp"
#include "mlsl/datagen.hpp"
#include "mlsl/io.hpp"
#include "mlsl/metrics.hpp"
#include "mlsl/trainer.hpp"

namespace mlsl {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void write_report(const std::string& out_dir, const std::string& command,
                  const RunConfig& cfg,
                  const std::vector<std::pair<std::string, std::string>>&
                      outputs,
                  const std::vector<std::pair<std::string, std::string>>&
                      metrics,
                  double wall_time_s) {
  std::string text = "mlsl run report\n";
  text += "command = " + command + "\n";
  text += "wall_time_s = " + fmt(wall_time_s) + "\n";
  text += "[config]\n" + cfg.echo();
  text += "[outputs]\n";
  for (const auto& [k, v] : outputs) text += k + " = " + v + "\n";
  text += "[metrics]\n";
  for (const auto& [k, v] : metrics) text += k + " = " + v + "\n";
  text += "[end]\n";
  write_file(join(out_dir, command + "_report.txt"), text);
}

SynthSpec synth_spec_from(const RunConfig& cfg) {
  SynthSpec spec;
  spec.n_items = static_cast<int>(cfg.get_int("n_items"));
  spec.n_users = static_cast<int>(cfg.get_int("n_users"));
  spec.p_reliable = cfg.get_double("p_reliable");
  spec.votes_per_item = static_cast<int>(cfg.get_int("votes_per_item"));
  spec.class_balance = cfg.get_double("class_balance");
  spec.seed = cfg.get_seed();
  if (cfg.get_bool("indicator")) {
    spec.indicator = IndicatorSpec{cfg.get_double("indicator_p_reliable"),
                                   cfg.get_double("indicator_p_unreliable")};
  }
  spec.validate();
  return spec;
}

TrainConfig train_config_from(const RunConfig& cfg, int depth) {
  TrainConfig tc;
  tc.unfold_mode = cfg.get_string("unfolding") == "full"
                       ? UnfoldMode::kFull
                       : UnfoldMode::kAsymmetric;
  const std::string order = cfg.get_string("child_order");
  if (order == "shuffle") {
    tc.child_order = ChildOrderPolicy::random_shuffle();
  } else if (order == "feature") {
    tc.child_order = ChildOrderPolicy::by_feature(
        static_cast<int>(cfg.get_int("feature_index")),
        cfg.get_bool("feature_ascending"));
  }
  tc.rho = cfg.get_double("rho");
  tc.epsilon = cfg.get_double("epsilon");
  std::vector<double> scales = cfg.get_double_list("scales");
  if (scales.size() == 1) {
    tc.level_scales.assign(depth, scales[0]);
  } else {
    tc.level_scales = scales;
  }
  tc.epochs = static_cast<int>(cfg.get_int("epochs"));
  tc.eval_every = static_cast<int>(cfg.get_int("eval_every"));
  tc.visit_order = cfg.get_string("visit") == "random"
                       ? VisitOrder::kUniformRandom
                       : VisitOrder::kLoop;
  tc.master_seed = cfg.get_seed();
  tc.validate(depth);
  return tc;
}

struct LoadedData {
  Graph graph;             // as stored on disk (after standardization)
  Graph traversal;         // symmetrized copy when requested
  LabeledDataset dataset;  // roots/labels against `traversal`
  std::vector<std::string> item_ids;  // label-file order
};

LoadedData load_data(const RunConfig& cfg, const std::string& command) {
  LoadedData data;
  data.graph = load_graph(cfg.require("graph", command));
  if (cfg.get_bool("standardize")) {
    data.graph = standardize_features(data.graph);
  }
  data.traversal = cfg.get_bool("symmetrize") ? with_reverse_edges(data.graph)
                                              : data.graph;
  auto labels = load_labels(cfg.require("labels", command));
  if (labels.empty()) {
    throw ValidationError(command + ": label file has no rows");
  }
  data.dataset.graph = &data.traversal;
  data.dataset.class_count = static_cast<int>(cfg.get_int("classes"));
  for (const auto& [node, label] : labels) {
    data.dataset.roots.push_back(data.traversal.node_index(node));
    data.dataset.labels.push_back(label);
    data.item_ids.push_back(node);
  }
  data.dataset.validate();
  return data;
}

// Indices of the labeled items selected by eval_on (split shared with
// training via the same master seed).
std::vector<std::size_t> selected_items(const RunConfig& cfg,
                                        std::size_t n_items,
                                        const std::string& command) {
  const std::string eval_on = cfg.get_string("eval_on");
  if (eval_on == "all") {
    std::vector<std::size_t> all(n_items);
    for (std::size_t i = 0; i < n_items; ++i) all[i] = i;
    return all;
  }
  const std::size_t n_train = static_cast<std::size_t>(cfg.get_int("n_train"));
  if (n_train == 0 || n_train >= n_items) {
    throw ValidationError(command + ": eval_on = " + eval_on +
                          " needs 0 < n_train < item count");
  }
  RngStream rng = derive_stream(cfg.get_seed(), "train-test-split");
  std::vector<std::size_t> order(n_items);
  for (std::size_t i = 0; i < n_items; ++i) order[i] = i;
  rng.shuffle(order);
  if (eval_on == "train") {
    return {order.begin(), order.begin() + n_train};
  }
  return {order.begin() + n_train, order.end()};
}

}  // namespace

void cmd_synth(const RunConfig& cfg, const std::string& out_dir) {
  Stopwatch timer;
  SynthSpec spec = synth_spec_from(cfg);
  fs::create_directories(out_dir);
  SynthData data = gen_spammer_hammer(spec);

  save_graph(*data.graph, join(out_dir, "graph.csv"));
  std::vector<std::pair<std::string, int>> labels;
  for (int i = 0; i < spec.n_items; ++i) {
    labels.emplace_back(item_node_id(i),
                        label_to_class(data.truth.item_labels[i]));
  }
  save_labels(labels, join(out_dir, "labels.csv"));

  std::string truth = "node,kind,label,reliable,indicator\n";
  for (int i = 0; i < spec.n_items; ++i) {
    truth += item_node_id(i) + ",item," +
             std::to_string(label_to_class(data.truth.item_labels[i])) +
             ",,\n";
  }
  for (int u = 0; u < spec.n_users; ++u) {
    truth += user_node_id(u) + ",user,," +
             (data.truth.user_reliable[u] ? "1" : "0") + ",";
    if (spec.indicator) {
      truth += data.truth.user_indicator[u] ? "1" : "0";
    }
    truth += "\n";
  }
  write_file(join(out_dir, "truth.csv"), truth);

  write_report(out_dir, "synth", cfg,
               {{"graph", "graph.csv"},
                {"labels", "labels.csv"},
                {"truth", "truth.csv"}},
               {{"edges", std::to_string(data.graph->edge_count())},
                {"items", std::to_string(spec.n_items)},
                {"users", std::to_string(spec.n_users)}},
               timer.seconds());
}

void cmd_train(const RunConfig& cfg, const std::string& out_dir) {
  Stopwatch timer;
  LoadedData data = load_data(cfg, "train");

  const int depth = static_cast<int>(cfg.get_int("depth"));
  std::vector<int> level_sizes = cfg.get_int_list("level_sizes");
  if (static_cast<int>(level_sizes.size()) != depth) {
    throw ValidationError("train: level_sizes must list depth entries");
  }
  const bool classification =
      cfg.get_string("output_mode") == "classification";
  if (classification && level_sizes[0] != data.dataset.class_count) {
    throw ValidationError("train: level_sizes[0] must equal classes");
  }
  TrainConfig tc = train_config_from(cfg, depth);

  MlslModel model = MlslModel::init(
      data.traversal.feature_width(), level_sizes,
      classification ? OutputMode::kClassification : OutputMode::kRegression,
      derive_seed(cfg.get_seed(), "model-init"));

  const std::size_t n_train = static_cast<std::size_t>(cfg.get_int("n_train"));
  TrainResult result;
  std::optional<SplitDataset> split;
  if (n_train > 0) {
    split = split_items(data.dataset, n_train, cfg.get_seed());
    result = train(model, split->train, tc, &split->test);
  } else {
    result = train(model, data.dataset, tc, nullptr);
  }

  fs::create_directories(out_dir);
  save_model(model, join(out_dir, "model.txt"));

  std::string history = "epoch,mean_loss,eval_accuracy,eval_avg_recall\n";
  for (const EpochStats& s : result.history) {
    history += std::to_string(s.epoch) + "," + fmt(s.mean_loss) + ",";
    if (s.eval_accuracy) history += fmt(*s.eval_accuracy);
    history += ",";
    if (s.eval_avg_recall) history += fmt(*s.eval_avg_recall);
    history += "\n";
  }
  write_file(join(out_dir, "history.csv"), history);

  std::vector<std::pair<std::string, std::string>> metrics;
  metrics.emplace_back("epochs", std::to_string(result.history.size()));
  metrics.emplace_back("final_mean_loss",
                       fmt(result.history.back().mean_loss));
  for (auto it = result.history.rbegin(); it != result.history.rend(); ++it) {
    if (it->eval_accuracy) {
      metrics.emplace_back("eval_accuracy", fmt(*it->eval_accuracy));
      metrics.emplace_back("eval_avg_recall", fmt(*it->eval_avg_recall));
      break;
    }
  }
  write_report(out_dir, "train", cfg,
               {{"model", "model.txt"}, {"history", "history.csv"}}, metrics,
               timer.seconds());
}

void cmd_eval(const RunConfig& cfg, const std::string& out_dir) {
  Stopwatch timer;
  LoadedData data = load_data(cfg, "eval");
  MlslModel model = load_model(cfg.require("model", "eval"));
  if (model.feature_width != data.traversal.feature_width()) {
    throw ValidationError("eval: model feature width " +
                          std::to_string(model.feature_width) +
                          " != graph feature width " +
                          std::to_string(data.traversal.feature_width()));
  }
  if (model.output_mode == OutputMode::kClassification &&
      model.class_count() != data.dataset.class_count) {
    throw ValidationError("eval: model classes != configured classes");
  }

  TrainConfig tc = train_config_from(cfg, model.depth());
  auto items = selected_items(cfg, data.dataset.size(), "eval");
  std::vector<int> truth, pred;
  truth.reserve(items.size());
  pred.reserve(items.size());
  for (std::size_t i : items) {
    truth.push_back(data.dataset.labels[i]);
    pred.push_back(
        predict_label(model, data.traversal, data.dataset.roots[i], tc)
            .label);
  }

  fs::create_directories(out_dir);
  write_file(join(out_dir, "metrics.csv"),
             metrics_csv(truth, pred, data.dataset.class_count));
  write_report(
      out_dir, "eval", cfg, {{"metrics", "metrics.csv"}},
      {{"items", std::to_string(items.size())},
       {"accuracy", fmt(accuracy(truth, pred))},
       {"average_recall",
        fmt(average_recall(truth, pred, data.dataset.class_count))}},
      timer.seconds());
}

namespace {

// Vote matrix over the labeled items; workers are indexed by first
// appearance in edge order. Vote values must be exactly +-1.
VoteMatrix votes_from_graph(const Graph& g,
                            const std::vector<std::string>& item_ids) {
  std::unordered_map<int, int> item_of_node;
  for (std::size_t i = 0; i < item_ids.size(); ++i) {
    item_of_node[g.node_index(item_ids[i])] = static_cast<int>(i);
  }
  std::unordered_map<int, int> worker_of_node;
  std::vector<std::tuple<int, int, int>> triples;
  for (const Edge& e : g.edges()) {
    auto it = item_of_node.find(e.src);
    if (it == item_of_node.end()) continue;
    double v = e.features[0];
    if (v != 1.0 && v != -1.0) {
      throw ValidationError(
          "baseline: vote features must be -1 or +1 (grade data?)");
    }
    auto [wit, fresh] = worker_of_node.try_emplace(
        e.dst, static_cast<int>(worker_of_node.size()));
    triples.emplace_back(it->second, wit->second, v > 0 ? 1 : -1);
    (void)fresh;
  }
  VoteMatrix votes(static_cast<int>(item_ids.size()),
                   static_cast<int>(worker_of_node.size()));
  for (auto [item, worker, value] : triples) {
    votes.add_vote(item, worker, value);
  }
  votes.validate();
  return votes;
}

GradeMatrix grades_from_graph(const Graph& g,
                              const std::vector<std::string>& item_ids,
                              double max_grade) {
  std::unordered_map<int, int> item_of_node;
  for (std::size_t i = 0; i < item_ids.size(); ++i) {
    item_of_node[g.node_index(item_ids[i])] = static_cast<int>(i);
  }
  std::unordered_map<int, int> worker_of_node;
  std::vector<std::tuple<int, int, double>> triples;
  for (const Edge& e : g.edges()) {
    auto it = item_of_node.find(e.src);
    if (it == item_of_node.end()) continue;
    double v = e.features[0];
    if (!(v >= 0.0 && v <= max_grade)) {
      throw ValidationError("baseline: grade outside [0, " +
                            std::to_string(max_grade) + "] (vote data?)");
    }
    auto [wit, fresh] = worker_of_node.try_emplace(
        e.dst, static_cast<int>(worker_of_node.size()));
    triples.emplace_back(it->second, wit->second, v);
    (void)fresh;
  }
  GradeMatrix grades(static_cast<int>(item_ids.size()),
                     static_cast<int>(worker_of_node.size()), max_grade);
  for (auto [item, worker, value] : triples) {
    grades.add_grade(item, worker, value);
  }
  return grades;
}

}  // namespace

void cmd_baseline(const RunConfig& cfg, const std::string& out_dir) {
  Stopwatch timer;
  const std::string which = cfg.require("baseline", "baseline");
  LoadedData data = load_data(cfg, "baseline");
  const int classes = data.dataset.class_count;

  std::vector<int> truth, pred;
  if (which == "majority" || which == "kos" || which == "em") {
    if (classes != 2) {
      throw ValidationError("baseline: vote baselines need classes = 2");
    }
    VoteMatrix votes = votes_from_graph(data.graph, data.item_ids);
    std::vector<int> labels;
    if (which == "majority") {
      labels = majority_vote(votes);
    } else if (which == "kos") {
      labels = kos(votes, static_cast<int>(cfg.get_int("kos_iters")),
                   derive_seed(cfg.get_seed(), "kos-init"));
    } else {
      labels = em_boolean(votes, cfg.get_double("alpha"),
                          cfg.get_double("beta"),
                          static_cast<int>(cfg.get_int("em_iters")))
                   .labels;
    }
    for (std::size_t i : selected_items(cfg, data.dataset.size(),
                                        "baseline")) {
      truth.push_back(data.dataset.labels[i]);
      pred.push_back(label_to_class(labels[i]));
    }
  } else if (which == "avg" || which == "em_grades") {
    const double max_grade = static_cast<double>(cfg.get_int("grade_max"));
    if (classes != static_cast<int>(max_grade) + 1) {
      throw ValidationError(
          "baseline: grade baselines need classes = grade_max + 1");
    }
    GradeMatrix grades =
        grades_from_graph(data.graph, data.item_ids, max_grade);
    std::vector<int> rounded =
        which == "avg"
            ? average_grade(grades)
            : em_grades(grades, static_cast<int>(cfg.get_int("em_iters")),
                        cfg.get_double("var_floor"))
                  .rounded;
    for (std::size_t i : selected_items(cfg, data.dataset.size(),
                                        "baseline")) {
      truth.push_back(data.dataset.labels[i]);
      pred.push_back(rounded[i]);
    }
  } else if (which == "proportional") {
    const std::size_t n_train =
        static_cast<std::size_t>(cfg.get_int("n_train"));
    if (n_train == 0 || n_train >= data.dataset.size()) {
      throw ValidationError(
          "baseline: proportional needs 0 < n_train < item count");
    }
    SplitDataset split =
        split_items(data.dataset, n_train, cfg.get_seed());
    std::vector<int> guesses = proportional_guess(
        split.train.labels, split.test.size(),
        derive_seed(cfg.get_seed(), "proportional"));
    truth = split.test.labels;
    pred = std::move(guesses);
  } else {
    throw ValidationError("baseline: unknown baseline '" + which + "'");
  }

  fs::create_directories(out_dir);
  write_file(join(out_dir, "metrics.csv"), metrics_csv(truth, pred, classes));
  write_report(out_dir, "baseline", cfg, {{"metrics", "metrics.csv"}},
               {{"baseline", which},
                {"items", std::to_string(truth.size())},
                {"accuracy", fmt(accuracy(truth, pred))}},
               timer.seconds());
}

void cmd_unfold(const RunConfig& cfg, const std::string& out_dir,
                std::ostream& out) {
  Stopwatch timer;
  Graph g = load_graph(cfg.require("graph", "unfold"));
  const std::string root = cfg.require("root", "unfold");
  const int depth = static_cast<int>(cfg.get_int("depth"));
  const std::string mode = cfg.get_string("unfolding");
  UnfoldTree tree = mode == "full" ? unfold_full(g, root, depth)
                                   : unfold_asymmetric(g, root, depth);

  std::ostringstream dump;
  dump << "unfolding root=" << root << " depth=" << depth << " mode=" << mode
       << " nodes=" << tree.size() << "\n";
  // Depth-first with AsLoaded child order; children printed indented under
  // their parent.
  std::vector<int> stack{tree.root()};
  while (!stack.empty()) {
    int tid = stack.back();
    stack.pop_back();
    const UnfoldTreeNode& n = tree.nodes[tid];
    dump << std::string(2 * static_cast<std::size_t>(n.depth), ' ') << "["
         << tid << "] " << g.node_id(n.graph_node) << " depth=" << n.depth;
    if (n.in_edge >= 0) {
      dump << " in=(";
      const Vec& f = tree.in_features(tid);
      for (Eigen::Index i = 0; i < f.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", f[i]);
        dump << (i ? "," : "") << buf;
      }
      dump << ")";
    }
    dump << "\n";
    const auto& kids = tree.children[tid];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }

  out << dump.str();
  fs::create_directories(out_dir);
  write_file(join(out_dir, "tree.txt"), dump.str());
  write_report(out_dir, "unfold", cfg, {{"tree", "tree.txt"}},
               {{"nodes", std::to_string(tree.size())}}, timer.seconds());
}

std::string report_embedded_config(const std::string& report_path) {
  std::ifstream in(report_path);
  if (!in) throw ValidationError("cannot open report: " + report_path);
  std::string line, config;
  bool in_config = false;
  while (std::getline(in, line)) {
    if (line == "[config]") {
      in_config = true;
      continue;
    }
    if (in_config && !line.empty() && line[0] == '[') break;
    if (in_config) config += line + "\n";
  }
  if (config.empty()) {
    throw ValidationError(report_path + ": no [config] section");
  }
  return config;
}

}  // namespace mlsl
