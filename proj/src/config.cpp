#include "mlsl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mlsl {

namespace {

enum class ValueType { kInt, kSeed, kDouble, kBool, kString, kIntList,
                       kDoubleList, kChoice };

struct SchemaEntry {
  ValueType type;
  const char* default_value;  // nullptr = unset by default
  double min = 0.0;
  double max = 0.0;
  bool has_range = false;
  std::vector<std::string> choices;
};

const std::map<std::string, SchemaEntry>& schema() {
  auto range = [](ValueType t, const char* def, double lo, double hi) {
    return SchemaEntry{t, def, lo, hi, true, {}};
  };
  auto plain = [](ValueType t, const char* def) {
    return SchemaEntry{t, def, 0, 0, false, {}};
  };
  auto choice = [](const char* def, std::vector<std::string> opts) {
    return SchemaEntry{ValueType::kChoice, def, 0, 0, false, std::move(opts)};
  };
  static const std::map<std::string, SchemaEntry> s = {
      {"master_seed", plain(ValueType::kSeed, "1")},
      // synthetic generator
      {"n_items", range(ValueType::kInt, "3000", 1, 1e9)},
      {"n_users", range(ValueType::kInt, "3000", 1, 1e9)},
      {"p_reliable", range(ValueType::kDouble, "0.6", 0.0, 1.0)},
      {"votes_per_item", range(ValueType::kInt, "3", 1, 1e9)},
      {"class_balance", range(ValueType::kDouble, "0.5", 0.0, 1.0)},
      {"indicator", plain(ValueType::kBool, "false")},
      {"indicator_p_reliable", range(ValueType::kDouble, "0.9", 0.0, 1.0)},
      {"indicator_p_unreliable", range(ValueType::kDouble, "0.4", 0.0, 1.0)},
      // dataset paths
      {"graph", plain(ValueType::kString, nullptr)},
      {"labels", plain(ValueType::kString, nullptr)},
      {"model", plain(ValueType::kString, nullptr)},
      // model hyperparameters
      {"depth", range(ValueType::kInt, "1", 1, 64)},
      {"level_sizes", plain(ValueType::kIntList, "2")},
      {"classes", range(ValueType::kInt, "2", 2, 100000)},
      {"output_mode", choice("classification",
                             {"classification", "regression"})},
      // training
      {"unfolding", choice("asymmetric", {"full", "asymmetric"})},
      {"child_order", choice("as_loaded",
                             {"as_loaded", "shuffle", "feature"})},
      {"feature_index", range(ValueType::kInt, "0", 0, 1e6)},
      {"feature_ascending", plain(ValueType::kBool, "true")},
      {"symmetrize", plain(ValueType::kBool, "false")},
      {"standardize", plain(ValueType::kBool, "false")},
      {"epochs", range(ValueType::kInt, "20", 1, 1e7)},
      {"eval_every", range(ValueType::kInt, "1", 1, 1e7)},
      {"rho", range(ValueType::kDouble, "0.95", 1e-12, 1.0)},
      {"epsilon", range(ValueType::kDouble, "1e-6", 0.0, 1e9)},
      {"scales", plain(ValueType::kDoubleList, "1")},
      {"visit", choice("loop", {"loop", "random"})},
      {"n_train", range(ValueType::kInt, "0", 0, 1e9)},
      {"eval_on", choice("all", {"all", "train", "test"})},
      // baselines
      {"baseline", choice(nullptr, {"majority", "kos", "em", "avg",
                                    "em_grades", "proportional"})},
      {"kos_iters", range(ValueType::kInt, "2", 1, 1e6)},
      {"em_iters", range(ValueType::kInt, "20", 1, 1e6)},
      {"alpha", range(ValueType::kDouble, "1.2", 1.0, 1e6)},
      {"beta", range(ValueType::kDouble, "1.0", 1.0, 1e6)},
      {"var_floor", range(ValueType::kDouble, "0.05", 1e-9, 1e9)},
      {"grade_max", range(ValueType::kInt, "10", 1, 1e6)},
      // unfold command
      {"root", plain(ValueType::kString, nullptr)},
  };
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

long parse_int(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  long out;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw ValidationError("config: " + key + ": not an integer: '" + v + "'");
  }
  if (pos != v.size()) {
    throw ValidationError("config: " + key + ": bad integer: '" + v + "'");
  }
  return out;
}

double parse_dbl(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ValidationError("config: " + key + ": not a number: '" + v + "'");
  }
  if (pos != v.size() || !std::isfinite(out)) {
    throw ValidationError("config: " + key + ": bad number: '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ValidationError("config: " + key + ": expected true/false: '" + v +
                        "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& [key, entry] : schema()) {
    if (entry.default_value) values_[key] = entry.default_value;
  }
}

void RunConfig::validate_value(const std::string& key,
                               const std::string& value) const {
  auto it = schema().find(key);
  if (it == schema().end()) {
    throw ValidationError("config: unknown key '" + key + "'");
  }
  const SchemaEntry& e = it->second;
  auto check_range = [&](double v) {
    if (e.has_range && !(v >= e.min && v <= e.max)) {
      std::ostringstream msg;
      msg << "config: " << key << " = " << value << " out of range ["
          << e.min << ", " << e.max << "]";
      throw ValidationError(msg.str());
    }
  };
  switch (e.type) {
    case ValueType::kInt:
      check_range(static_cast<double>(parse_int(value, key)));
      break;
    case ValueType::kSeed:
      try {
        (void)std::stoull(value);
      } catch (const std::exception&) {
        throw ValidationError("config: " + key + ": bad seed '" + value +
                              "'");
      }
      break;
    case ValueType::kDouble:
      check_range(parse_dbl(value, key));
      break;
    case ValueType::kBool:
      (void)parse_bool(value, key);
      break;
    case ValueType::kString:
      if (value.empty()) {
        throw ValidationError("config: " + key + ": empty value");
      }
      break;
    case ValueType::kIntList:
      for (const auto& p : split_list(value)) {
        if (parse_int(p, key) < 1) {
          throw ValidationError("config: " + key +
                                ": entries must be >= 1");
        }
      }
      break;
    case ValueType::kDoubleList:
      for (const auto& p : split_list(value)) {
        if (!(parse_dbl(p, key) > 0.0)) {
          throw ValidationError("config: " + key + ": entries must be > 0");
        }
      }
      break;
    case ValueType::kChoice: {
      for (const auto& c : e.choices) {
        if (value == c) return;
      }
      std::string opts;
      for (const auto& c : e.choices) opts += (opts.empty() ? "" : "|") + c;
      throw ValidationError("config: " + key + " must be one of " + opts +
                            ", got '" + value + "'");
    }
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  validate_value(key, value);
  values_[key] = value;
}

bool RunConfig::is_set(const std::string& key) const {
  return values_.count(key) > 0;
}

RunConfig RunConfig::from_text(const std::string& text,
                               const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(origin + ":" + std::to_string(line_no) +
                            ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ValidationError(origin + ":" + std::to_string(line_no) +
                            ": empty key or value");
    }
    cfg.set(key, value);
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path);
}

const std::string& RunConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ValidationError("config: key '" + key + "' is not set");
  }
  return it->second;
}

long RunConfig::get_int(const std::string& key) const {
  return parse_int(get_string(key), key);
}

std::uint64_t RunConfig::get_seed() const {
  return std::stoull(get_string("master_seed"));
}

double RunConfig::get_double(const std::string& key) const {
  return parse_dbl(get_string(key), key);
}

bool RunConfig::get_bool(const std::string& key) const {
  return parse_bool(get_string(key), key);
}

std::vector<int> RunConfig::get_int_list(const std::string& key) const {
  std::vector<int> out;
  for (const auto& p : split_list(get_string(key))) {
    out.push_back(static_cast<int>(parse_int(p, key)));
  }
  return out;
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& p : split_list(get_string(key))) {
    out.push_back(parse_dbl(p, key));
  }
  return out;
}

const std::string& RunConfig::require(const std::string& key,
                                      const std::string& command) const {
  if (!is_set(key)) {
    throw ValidationError("config: '" + key + "' is required for " + command);
  }
  return get_string(key);
}

std::string RunConfig::echo() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key + " = " + value + "\n";
  }
  return out;
}

}  // namespace mlsl
