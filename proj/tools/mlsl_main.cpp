#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mlsl/commands.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::string model_path;
  std::int64_t seed = -1;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "run configuration file")
      ->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override master_seed");
}

mlsl::RunConfig resolve(const CommonOpts& opts) {
  mlsl::RunConfig cfg = mlsl::RunConfig::from_file(opts.config_path);
  if (opts.seed >= 0) cfg.set("master_seed", std::to_string(opts.seed));
  if (!opts.model_path.empty()) cfg.set("model", opts.model_path);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-level sequence learners on graph neighborhoods"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* synth = app.add_subcommand("synth",
                                       "generate a synthetic vote dataset");
  CLI::App* train = app.add_subcommand("train", "train an MLSL model");
  CLI::App* eval = app.add_subcommand("eval", "evaluate a saved model");
  CLI::App* baseline =
      app.add_subcommand("baseline", "run an aggregation baseline");
  CLI::App* unfold =
      app.add_subcommand("unfold", "dump a graph unfolding");
  for (CLI::App* cmd : {synth, train, eval, baseline, unfold}) {
    add_common(cmd, opts);
  }
  eval->add_option("--model", opts.model_path, "model file (overrides config)");

  CLI11_PARSE(app, argc, argv);

  try {
    mlsl::RunConfig cfg = resolve(opts);
    if (synth->parsed()) {
      mlsl::cmd_synth(cfg, opts.out_dir);
    } else if (train->parsed()) {
      mlsl::cmd_train(cfg, opts.out_dir);
    } else if (eval->parsed()) {
      mlsl::cmd_eval(cfg, opts.out_dir);
    } else if (baseline->parsed()) {
      mlsl::cmd_baseline(cfg, opts.out_dir);
    } else if (unfold->parsed()) {
      mlsl::cmd_unfold(cfg, opts.out_dir, std::cout);
    }
  } catch (const mlsl::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
