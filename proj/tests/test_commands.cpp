#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mlsl/commands.hpp"
#include "mlsl/io.hpp"

using namespace mlsl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mlsl_cmd_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const {
    return (path / name).string();
  }
};

std::string read_text(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

RunConfig cfg_from(const std::string& text) {
  return RunConfig::from_text(text, "test");
}

// Hand-built depth-1 model that votes with the sign of the input sum: the
// candidate weights are +-10 and everything else is neutral, so class 1
// wins exactly when the votes leans positive.
MlslModel sign_oracle_model() {
  MlslModel m;
  m.feature_width = 1;
  m.level_sizes = {2};
  m.output_mode = OutputMode::kClassification;
  LstmParams p{LearnerShape{1, 2}, LstmTensors::zeros({1, 2})};
  p.weights.w_in[kCandidate](0, 0) = -10.0;
  p.weights.w_in[kCandidate](1, 0) = 10.0;
  m.learners.push_back(std::move(p));
  return m;
}

}  // namespace

TEST_CASE("synth: counts, determinism, and fail-before-write") {
  TempDir tmp;
  RunConfig cfg = cfg_from("n_items = 25\nn_users = 40\nmaster_seed = 3\n");
  cmd_synth(cfg, tmp.sub("out"));
  std::string graph = read_text(tmp.sub("out") + "/graph.csv");
  CHECK(count_lines(graph) == 1 + 25 * 3);  // header + one row per vote
  std::string labels = read_text(tmp.sub("out") + "/labels.csv");
  CHECK(count_lines(labels) == 1 + 25);
  CHECK(fs::exists(tmp.sub("out") + "/truth.csv"));
  CHECK(fs::exists(tmp.sub("out") + "/synth_report.txt"));

  cmd_synth(cfg, tmp.sub("out2"));
  CHECK(read_text(tmp.sub("out2") + "/graph.csv") == graph);

  // Invalid spec values must be rejected before anything is written.
  RunConfig bad = cfg_from("votes_per_item = 50\nn_users = 40\n");
  CHECK_THROWS_AS(cmd_synth(bad, tmp.sub("never")), ValidationError);
  CHECK_FALSE(fs::exists(tmp.sub("never")));
}

TEST_CASE("train: history rows equal epochs; eval cells at the cadence") {
  TempDir tmp;
  cmd_synth(cfg_from("n_items = 30\nn_users = 40\nmaster_seed = 5\n"),
            tmp.sub("data"));
  RunConfig cfg = cfg_from(
      "graph = " + tmp.sub("data") + "/graph.csv\n" +
      "labels = " + tmp.sub("data") + "/labels.csv\n" +
      "depth = 1\nlevel_sizes = 2\nepochs = 6\neval_every = 3\n"
      "n_train = 20\nmaster_seed = 5\n");
  cmd_train(cfg, tmp.sub("run"));
  std::string history = read_text(tmp.sub("run") + "/history.csv");
  CHECK(count_lines(history) == 1 + 6);
  // Epochs 3 and 6 carry eval columns, the others leave them empty.
  std::istringstream in(history);
  std::string line;
  std::getline(in, line);
  for (int epoch = 1; epoch <= 6; ++epoch) {
    std::getline(in, line);
    bool has_eval = line.substr(line.find(',', line.find(',') + 1)) != ",,";
    CHECK(has_eval == (epoch % 3 == 0));
  }
  MlslModel m = load_model(tmp.sub("run") + "/model.txt");
  CHECK(m.depth() == 1);

  RunConfig mismatched = cfg_from(
      "graph = " + tmp.sub("data") + "/graph.csv\n" +
      "labels = " + tmp.sub("data") + "/labels.csv\n" +
      "depth = 2\nlevel_sizes = 2\n");
  CHECK_THROWS_AS(cmd_train(mismatched, tmp.sub("x")), ValidationError);
}

TEST_CASE("eval: a perfect oracle stub scores accuracy 1") {
  TempDir tmp;
  // p_reliable = 1: every vote equals the truth, so the sign model is an
  // oracle.
  cmd_synth(cfg_from("n_items = 40\nn_users = 60\np_reliable = 1.0\n"
                     "master_seed = 8\n"),
            tmp.sub("data"));
  save_model(sign_oracle_model(), tmp.sub("oracle_model.txt"));
  RunConfig cfg = cfg_from(
      "graph = " + tmp.sub("data") + "/graph.csv\n" +
      "labels = " + tmp.sub("data") + "/labels.csv\n" +
      "model = " + tmp.sub("oracle_model.txt") + "\n");
  cmd_eval(cfg, tmp.sub("eval"));
  std::string metrics = read_text(tmp.sub("eval") + "/metrics.csv");
  CHECK(metrics.find("accuracy,1\n") != std::string::npos);
  CHECK(metrics.find("average_recall,1\n") != std::string::npos);

  // Feature width mismatch is a validation error.
  cmd_synth(cfg_from("n_items = 10\nn_users = 20\nindicator = true\n"),
            tmp.sub("wide"));
  RunConfig wrong = cfg_from(
      "graph = " + tmp.sub("wide") + "/graph.csv\n" +
      "labels = " + tmp.sub("wide") + "/labels.csv\n" +
      "model = " + tmp.sub("oracle_model.txt") + "\n");
  CHECK_THROWS_AS(cmd_eval(wrong, tmp.sub("x")), ValidationError);
}

TEST_CASE("baseline: majority on fully reliable votes is perfect") {
  TempDir tmp;
  cmd_synth(cfg_from("n_items = 30\nn_users = 50\np_reliable = 1.0\n"
                     "master_seed = 2\n"),
            tmp.sub("data"));
  RunConfig cfg = cfg_from(
      "graph = " + tmp.sub("data") + "/graph.csv\n" +
      "labels = " + tmp.sub("data") + "/labels.csv\nbaseline = majority\n");
  cmd_baseline(cfg, tmp.sub("maj"));
  CHECK(read_text(tmp.sub("maj") + "/metrics.csv")
            .find("accuracy,1\n") != std::string::npos);
}

TEST_CASE("baseline: vote and grade data are mutually rejected") {
  TempDir tmp;
  // Vote data (features -1/+1) cannot feed the grade baselines.
  cmd_synth(cfg_from("n_items = 10\nn_users = 20\n"), tmp.sub("votes"));
  RunConfig grade_on_votes = cfg_from(
      "graph = " + tmp.sub("votes") + "/graph.csv\n" +
      "labels = " + tmp.sub("votes") + "/labels.csv\n" +
      "baseline = avg\nclasses = 11\n");
  CHECK_THROWS_AS(cmd_baseline(grade_on_votes, tmp.sub("x")),
                  ValidationError);

  // Grade data (real features) cannot feed the vote baselines.
  {
    std::ofstream g(tmp.sub("grades.csv"), std::ios::binary);
    g << "src,dst,f1\nitem_a,user_1,7.5\nitem_a,user_2,6\nitem_b,user_1,3\n";
    std::ofstream l(tmp.sub("grade_labels.csv"), std::ios::binary);
    l << "node,label\nitem_a,7\nitem_b,3\n";
  }
  RunConfig votes_on_grades = cfg_from(
      "graph = " + tmp.sub("grades.csv") + "\n" +
      "labels = " + tmp.sub("grade_labels.csv") + "\nbaseline = kos\n");
  CHECK_THROWS_AS(cmd_baseline(votes_on_grades, tmp.sub("x")),
                  ValidationError);

  // The grade baselines accept it with classes = grade_max + 1.
  RunConfig avg = cfg_from(
      "graph = " + tmp.sub("grades.csv") + "\n" +
      "labels = " + tmp.sub("grade_labels.csv") + "\n" +
      "baseline = avg\nclasses = 11\n");
  cmd_baseline(avg, tmp.sub("avg"));
  CHECK(read_text(tmp.sub("avg") + "/metrics.csv")
            .find("accuracy,1\n") != std::string::npos);
  RunConfig emg = cfg_from(
      "graph = " + tmp.sub("grades.csv") + "\n" +
      "labels = " + tmp.sub("grade_labels.csv") + "\n" +
      "baseline = em_grades\nclasses = 11\n");
  cmd_baseline(emg, tmp.sub("emg"));
  CHECK(fs::exists(tmp.sub("emg") + "/metrics.csv"));
}

TEST_CASE("baseline: proportional needs a split and follows it") {
  TempDir tmp;
  cmd_synth(cfg_from("n_items = 50\nn_users = 60\nmaster_seed = 4\n"),
            tmp.sub("data"));
  RunConfig no_split = cfg_from(
      "graph = " + tmp.sub("data") + "/graph.csv\n" +
      "labels = " + tmp.sub("data") + "/labels.csv\n" +
      "baseline = proportional\n");
  CHECK_THROWS_AS(cmd_baseline(no_split, tmp.sub("x")), ValidationError);
  RunConfig ok = cfg_from(
      "graph = " + tmp.sub("data") + "/graph.csv\n" +
      "labels = " + tmp.sub("data") + "/labels.csv\n" +
      "baseline = proportional\nn_train = 30\nmaster_seed = 4\n");
  cmd_baseline(ok, tmp.sub("prop"));
  std::string metrics = read_text(tmp.sub("prop") + "/metrics.csv");
  CHECK(metrics.find("n_samples,20\n") != std::string::npos);
}

TEST_CASE("unfold: triangle dump matches the worked example") {
  TempDir tmp;
  {
    std::ofstream g(tmp.sub("tri.csv"), std::ios::binary);
    g << "src,dst,f1\n";
    g << "a,b,1\na,c,2\nb,a,3\nb,c,4\nc,a,5\nc,b,6\n";
  }
  std::ostringstream out;
  RunConfig cfg = cfg_from("graph = " + tmp.sub("tri.csv") +
                           "\nroot = a\ndepth = 2\nunfolding = asymmetric\n");
  cmd_unfold(cfg, tmp.sub("dump"), out);
  CHECK(out.str().find("nodes=5") != std::string::npos);
  CHECK(count_lines(out.str()) == 1 + 5);
  CHECK(read_text(tmp.sub("dump") + "/tree.txt") == out.str());

  std::ostringstream out1;
  RunConfig d1 = cfg_from("graph = " + tmp.sub("tri.csv") +
                          "\nroot = a\ndepth = 1\nunfolding = full\n");
  cmd_unfold(d1, tmp.sub("dump1"), out1);
  CHECK(out1.str().find("nodes=3") != std::string::npos);

  RunConfig missing = cfg_from("graph = " + tmp.sub("tri.csv") +
                               "\nroot = zz\ndepth = 1\n");
  std::ostringstream sink;
  try {
    cmd_unfold(missing, tmp.sub("x"), sink);
    FAIL("expected unknown-root error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }
}

TEST_CASE("report embeds a parseable config") {
  TempDir tmp;
  cmd_synth(cfg_from("n_items = 12\nn_users = 25\nmaster_seed = 9\n"),
            tmp.sub("out"));
  std::string cfg_text =
      report_embedded_config(tmp.sub("out") + "/synth_report.txt");
  RunConfig cfg = RunConfig::from_text(cfg_text, "embedded");
  CHECK(cfg.get_int("n_items") == 12);
  CHECK(cfg.get_seed() == 9);
}
