#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlsl/common.hpp"

namespace mlsl {

// Flat key = value run configuration ('#' starts a comment). The schema is
// closed: unknown keys and out-of-range values are rejected up front,
// before any command does work. Every run report embeds the resolved
// config, and re-running from that embedded copy reproduces the outputs.
class RunConfig {
 public:
  // Schema defaults only.
  RunConfig();

  static RunConfig from_file(const std::string& path);

  // Parses config text (used for files and for report-embedded configs).
  static RunConfig from_text(const std::string& text,
                             const std::string& origin);

  bool is_set(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  const std::string& get_string(const std::string& key) const;
  long get_int(const std::string& key) const;
  std::uint64_t get_seed() const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  // Path-valued keys that must be present for a given command.
  const std::string& require(const std::string& key,
                             const std::string& command) const;

  // Sorted "key = value" lines of every set key; parseable by from_text.
  std::string echo() const;

 private:
  void validate_value(const std::string& key, const std::string& value) const;

  std::map<std::string, std::string> values_;
};

}  // namespace mlsl
