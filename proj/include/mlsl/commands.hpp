#pragma once

#include <iosfwd>
#include <string>

#include "mlsl/config.hpp"

namespace mlsl {

// Command drivers behind the CLI. Each writes its artifacts plus a
// <command>_report.txt (wall time, resolved config, outputs, metrics)
// under out_dir. ValidationError means bad input (CLI exit 1); any other
// exception is a runtime failure (exit 2).

// graph.csv + labels.csv + truth.csv from the spammer-hammer generator.
void cmd_synth(const RunConfig& cfg, const std::string& out_dir);

// model.txt + history.csv; holdout evaluation per epoch when n_train > 0.
void cmd_train(const RunConfig& cfg, const std::string& out_dir);

// metrics.csv for a saved model over the configured item set.
void cmd_eval(const RunConfig& cfg, const std::string& out_dir);

// metrics.csv for one of majority|kos|em|avg|em_grades|proportional.
void cmd_baseline(const RunConfig& cfg, const std::string& out_dir);

// Human-readable unfolding dump to `out` (also saved as tree.txt).
void cmd_unfold(const RunConfig& cfg, const std::string& out_dir,
                std::ostream& out);

// The [config] block embedded in a run report, parseable by
// RunConfig::from_text; rerunning from it reproduces the artifacts.
std::string report_embedded_config(const std::string& report_path);

}  // namespace mlsl
